#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lenreward/types.hpp"

namespace lenreward {

struct PassKInput {
    std::int64_t n = 0;  // samples generated
    std::int64_t c = 0;  // correct among them
    std::int64_t k = 0;
};

/// Unbiased estimator 1 - C(n-c, k) / C(n, k), evaluated as a running
/// product (no raw factorials). C(a, b) = 0 when b > a.
/// Throws DomainError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(const PassKInput& input);

/// Cross-question aggregation of per-bin pass@k.
///   macro:  per question restricted to its samples in the bin (questions
///           with fewer than k samples there are skipped), averaged across
///           questions; NaN when every question is skipped.
///   pooled: all samples in the bin treated as one pool.
enum class BinAggregation { macro, pooled };

struct BinOptions {
    int bins = 16;
    std::vector<int> k_list = {1, 32};
    double epsilon = 1e-6;  // stabilizer for per-question standardization
    BinAggregation aggregation = BinAggregation::macro;

    void validate() const;
};

struct BinReport {
    int bin_index = 0;
    double mean_length = 0.0;  // mean raw token length in the bin
    std::int64_t sample_count = 0;
    std::map<int, double> pass_at;  // k -> score (NaN when undefined)
};

/// Standardizes every record's length against its question's stats, pools the
/// records, sorts by z (ties broken by question_id then rollout_id), splits
/// into equal-count bins (remainder to the earliest bins) and reports per-bin
/// mean length and pass@k for each requested k.
/// Throws DegenerateInputError on empty input.
std::vector<BinReport> bin_by_length(const std::vector<RolloutRecord>& records,
                                     const BinOptions& options = {});

/// CSV with header bin_index,mean_length,sample_count,pass@{k}... UTF-8,
/// '.' decimal separator, one row per bin.
std::string bin_report_csv(const std::vector<BinReport>& reports,
                           const std::vector<int>& k_list);

}  // namespace lenreward
