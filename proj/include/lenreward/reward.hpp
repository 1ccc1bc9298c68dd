#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lenreward/types.hpp"

namespace lenreward {

struct RewardConfig {
    double alpha = 0.2;                   // scale of the length reward
    double epsilon = 1e-6;                // stabilizer added to the std when standardizing
    bool correctness_conditioned = true;  // restrict the length reward to correct rollouts

    /// Throws ConfigError when alpha < 0 or epsilon <= 0.
    void validate() const;
};

/// Population mean / standard deviation of a group's response lengths.
///
/// `sum` and `count` keep the exact integer aggregates the moments were
/// derived from; standardize() uses them so that groups shifted by a constant
/// produce bit-identical z values. Stats built by hand (count == 0) fall back
/// to the plain (length - mean) / (std + eps) formula.
struct LengthStats {
    double mean = 0.0;
    double std = 0.0;
    std::int64_t sum = 0;
    std::int64_t count = 0;
};

/// Per-rollout reward decomposition.
struct RewardBreakdown {
    double r_outcome = 0.0;  // +1 or -1
    double z = 0.0;          // standardized length
    double r_z = 0.0;        // sigmoid(-beta * z), in (0,1)
    double r_length = 0.0;   // alpha * r_z when applied, 0 when suppressed
    double r_total = 0.0;    // r_outcome + r_length
    double beta_used = 0.0;
};

/// Length mean and population std (divisor G) of a group.
/// Throws DegenerateInputError when the group has fewer than 2 rollouts.
LengthStats length_stats(const QuestionGroup& group);

/// Standardized length z = (length - mean) / (std + epsilon).
double standardize(std::int64_t length, const LengthStats& stats, double epsilon);

/// {r_z, r_length} with r_z = 1 / (1 + exp(beta * z)) = sigmoid(-beta * z)
/// and r_length = alpha * r_z. The exponent argument is clamped to +-500.
std::pair<double, double> length_reward(double z, double beta, const RewardConfig& config);

/// Combined reward. With correctness conditioning the length reward applies
/// only to correct rollouts; incorrect ones keep the bare outcome reward.
double combine(double r_outcome, double r_length, bool correct, const RewardConfig& config);

/// Scores every rollout of a group against a single difficulty signal beta.
/// Output order matches input order.
std::vector<RewardBreakdown> score_group(const QuestionGroup& group, double beta,
                                         const RewardConfig& config);

}  // namespace lenreward
