#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lenreward/types.hpp"

namespace lenreward {

/// Pass ratios for one batch: per-question P_g plus their mean P_b.
struct PassRatios {
    std::map<std::string, double> per_question;
    double batch = 0.0;
};

/// Exponentially smoothed batch pass ratio. The optimistic 1.0 init keeps
/// early low-pass batches from flipping every question into Simple mode.
struct EmaTracker {
    double lambda = 0.99;
    double value = 1.0;
    std::int64_t steps_seen = 0;
};

/// Fraction of correct rollouts in the group.
/// Throws DegenerateInputError on an empty group.
double group_pass_ratio(const QuestionGroup& group);

/// P_g for every group plus their unweighted mean P_b.
/// Throws DegenerateInputError on an empty batch.
PassRatios batch_pass_ratio(const Batch& batch);

/// value' = lambda * value + (1 - lambda) * true_batch_ratio.
/// Throws DomainError when the ratio (or the tracker's lambda) leaves [0,1].
EmaTracker update_ema(const EmaTracker& tracker, double true_batch_ratio);

/// Difficulty signal beta = P_g - P_b. Positive means Simple (shorter
/// preferred), negative means Hard (longer preferred).
double beta_signal(double p_g, double p_b_smoothed);

}  // namespace lenreward
