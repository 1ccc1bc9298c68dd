#include "lenreward/reward.hpp"

#include "lenreward/verify.hpp"

#include <algorithm>
#include <cmath>

namespace lenreward {

namespace {

constexpr double kSigmoidClamp = 500.0;

// Exact integer deviation count*length - sum; shift-invariant by construction,
// which is what makes RewardBreakdown bit-stable when a constant is added to
// every length in the group.
double exact_deviation(std::int64_t length, std::int64_t sum, std::int64_t count) {
    const __int128 n = static_cast<__int128>(length) * count - sum;
    return static_cast<double>(n) / static_cast<double>(count);
}

}  // namespace

void RewardConfig::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("reward.alpha", "must be finite and >= 0");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("reward.epsilon", "must be finite and > 0");
    }
}

LengthStats length_stats(const QuestionGroup& group) {
    validate_group(group);
    if (group.rollouts.size() < 2) {
        throw DegenerateInputError("group '" + group.question_id +
                                   "' needs at least 2 rollouts for length stats");
    }
    const auto count = static_cast<std::int64_t>(group.rollouts.size());
    std::int64_t sum = 0;
    for (const RolloutRecord& r : group.rollouts) sum += r.length;

    double sq = 0.0;
    for (const RolloutRecord& r : group.rollouts) {
        const double d = exact_deviation(r.length, sum, count);
        sq += d * d;
    }
    LengthStats stats;
    stats.mean = static_cast<double>(sum) / static_cast<double>(count);
    stats.std = std::sqrt(sq / static_cast<double>(count));
    stats.sum = sum;
    stats.count = count;
    return stats;
}

double standardize(std::int64_t length, const LengthStats& stats, double epsilon) {
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon", "must be >= 0");
    const double denom = stats.std + epsilon;
    const double num = stats.count > 0 ? exact_deviation(length, stats.sum, stats.count)
                                       : static_cast<double>(length) - stats.mean;
    if (num == 0.0) return 0.0;  // constant groups: z = 0 even when denom underflows
    return num / denom;
}

std::pair<double, double> length_reward(double z, double beta, const RewardConfig& config) {
    const double t = std::clamp(beta * z, -kSigmoidClamp, kSigmoidClamp);
    const double r_z = 1.0 / (1.0 + std::exp(t));
    return {r_z, config.alpha * r_z};
}

double combine(double r_outcome, double r_length, bool correct, const RewardConfig& config) {
    if (config.correctness_conditioned && !correct) return r_outcome;
    return r_outcome + r_length;
}

std::vector<RewardBreakdown> score_group(const QuestionGroup& group, double beta,
                                         const RewardConfig& config) {
    config.validate();
    const LengthStats stats = length_stats(group);

    std::vector<RewardBreakdown> out;
    out.reserve(group.rollouts.size());
    for (const RolloutRecord& r : group.rollouts) {
        RewardBreakdown b;
        b.beta_used = beta;
        b.r_outcome = outcome_reward(r.correct);
        b.z = standardize(r.length, stats, config.epsilon);
        const auto [r_z, r_len] = length_reward(b.z, beta, config);
        b.r_z = r_z;
        const bool applied = !config.correctness_conditioned || r.correct;
        b.r_length = applied ? r_len : 0.0;
        b.r_total = combine(b.r_outcome, r_len, r.correct, config);
        out.push_back(b);
    }
    return out;
}

}  // namespace lenreward
