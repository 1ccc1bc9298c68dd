#include "lenreward/eval.hpp"

#include "lenreward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <tuple>

namespace lenreward {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct PooledSample {
    double z;
    const RolloutRecord* record;
};

// Per-question moments for standardization; unlike length_stats this accepts
// single-sample questions (std 0, z 0).
LengthStats eval_stats(const std::vector<const RolloutRecord*>& records) {
    const auto count = static_cast<std::int64_t>(records.size());
    std::int64_t sum = 0;
    for (const RolloutRecord* r : records) sum += r->length;
    double sq = 0.0;
    for (const RolloutRecord* r : records) {
        const double d =
            static_cast<double>(static_cast<__int128>(r->length) * count - sum) /
            static_cast<double>(count);
        sq += d * d;
    }
    LengthStats stats;
    stats.mean = static_cast<double>(sum) / static_cast<double>(count);
    stats.std = std::sqrt(sq / static_cast<double>(count));
    stats.sum = sum;
    stats.count = count;
    return stats;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double pass_at_k(const PassKInput& input) {
    if (input.n < 1) throw DomainError("pass@k needs n >= 1");
    if (input.c < 0 || input.c > input.n) {
        throw DomainError("pass@k needs 0 <= c <= n, got c=" + std::to_string(input.c) +
                          " n=" + std::to_string(input.n));
    }
    if (input.k < 1 || input.k > input.n) {
        throw DomainError("pass@k needs 1 <= k <= n, got k=" + std::to_string(input.k) +
                          " n=" + std::to_string(input.n));
    }
    if (input.n - input.c < input.k) return 1.0;  // C(n-c, k) = 0

    double prob_all_fail = 1.0;
    for (std::int64_t i = 0; i < input.k; ++i) {
        prob_all_fail *= static_cast<double>(input.n - input.c - i) /
                         static_cast<double>(input.n - i);
    }
    return 1.0 - prob_all_fail;
}

void BinOptions::validate() const {
    if (bins < 1) throw ConfigError("eval.bins", "must be >= 1");
    if (k_list.empty()) throw ConfigError("eval.k_list", "must not be empty");
    for (int k : k_list) {
        if (k < 1) throw ConfigError("eval.k_list", "every k must be >= 1");
    }
    if (!(epsilon > 0.0)) throw ConfigError("eval.epsilon", "must be > 0");
}

std::vector<BinReport> bin_by_length(const std::vector<RolloutRecord>& records,
                                     const BinOptions& options) {
    options.validate();
    if (records.empty()) throw DegenerateInputError("bin_by_length: no records");

    std::map<std::string, std::vector<const RolloutRecord*>> by_question;
    for (const RolloutRecord& r : records) by_question[r.question_id].push_back(&r);

    std::vector<PooledSample> pooled;
    pooled.reserve(records.size());
    for (auto& [qid, qrecords] : by_question) {
        const LengthStats stats = eval_stats(qrecords);
        for (const RolloutRecord* r : qrecords) {
            pooled.push_back({standardize(r->length, stats, options.epsilon), r});
        }
    }
    std::sort(pooled.begin(), pooled.end(), [](const PooledSample& a, const PooledSample& b) {
        return std::tie(a.z, a.record->question_id, a.record->rollout_id) <
               std::tie(b.z, b.record->question_id, b.record->rollout_id);
    });

    const std::size_t total = pooled.size();
    const std::size_t bins = static_cast<std::size_t>(options.bins);
    const std::size_t base = total / bins;
    const std::size_t remainder = total % bins;

    std::vector<BinReport> reports;
    reports.reserve(bins);
    std::size_t offset = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t count = base + (b < remainder ? 1 : 0);
        BinReport report;
        report.bin_index = static_cast<int>(b);
        report.sample_count = static_cast<std::int64_t>(count);

        std::int64_t length_sum = 0;
        std::int64_t bin_correct = 0;
        std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_question;  // n, c
        for (std::size_t i = offset; i < offset + count; ++i) {
            const RolloutRecord* r = pooled[i].record;
            length_sum += r->length;
            auto& [n, c] = per_question[r->question_id];
            ++n;
            if (r->correct) {
                ++c;
                ++bin_correct;
            }
        }
        report.mean_length = count == 0
                                 ? kNaN
                                 : static_cast<double>(length_sum) / static_cast<double>(count);

        for (int k : options.k_list) {
            if (options.aggregation == BinAggregation::pooled) {
                report.pass_at[k] =
                    count >= static_cast<std::size_t>(k)
                        ? pass_at_k({static_cast<std::int64_t>(count), bin_correct, k})
                        : kNaN;
                continue;
            }
            double sum = 0.0;
            std::int64_t eligible = 0;
            for (const auto& [qid, nc] : per_question) {
                if (nc.first < k) continue;  // skipped for this k
                sum += pass_at_k({nc.first, nc.second, k});
                ++eligible;
            }
            report.pass_at[k] = eligible > 0 ? sum / static_cast<double>(eligible) : kNaN;
        }
        reports.push_back(std::move(report));
        offset += count;
    }
    return reports;
}

std::string bin_report_csv(const std::vector<BinReport>& reports,
                           const std::vector<int>& k_list) {
    std::string out = "bin_index,mean_length,sample_count";
    for (int k : k_list) out += ",pass@" + std::to_string(k);
    out += "\n";
    for (const BinReport& r : reports) {
        out += std::to_string(r.bin_index);
        out += ",";
        out += format_double(r.mean_length);
        out += ",";
        out += std::to_string(r.sample_count);
        for (int k : k_list) {
            out += ",";
            const auto it = r.pass_at.find(k);
            out += format_double(it == r.pass_at.end() ? kNaN : it->second);
        }
        out += "\n";
    }
    return out;
}

}  // namespace lenreward
