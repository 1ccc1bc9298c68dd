#include "lenreward/difficulty.hpp"

#include <cmath>

namespace lenreward {

double group_pass_ratio(const QuestionGroup& group) {
    validate_group(group);
    std::int64_t correct = 0;
    for (const RolloutRecord& r : group.rollouts) correct += r.correct ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(group.rollouts.size());
}

PassRatios batch_pass_ratio(const Batch& batch) {
    validate_batch(batch);
    PassRatios ratios;
    double sum = 0.0;
    for (const QuestionGroup& group : batch.groups) {
        const double p_g = group_pass_ratio(group);
        ratios.per_question[group.question_id] = p_g;
        sum += p_g;
    }
    ratios.batch = sum / static_cast<double>(batch.groups.size());
    return ratios;
}

EmaTracker update_ema(const EmaTracker& tracker, double true_batch_ratio) {
    if (!(tracker.lambda >= 0.0 && tracker.lambda <= 1.0)) {
        throw DomainError("EMA lambda " + std::to_string(tracker.lambda) +
                          " outside [0, 1]");
    }
    if (!(true_batch_ratio >= 0.0 && true_batch_ratio <= 1.0)) {
        throw DomainError("batch pass ratio " + std::to_string(true_batch_ratio) +
                          " outside [0, 1]");
    }
    EmaTracker next = tracker;
    next.value = tracker.lambda * tracker.value + (1.0 - tracker.lambda) * true_batch_ratio;
    next.steps_seen = tracker.steps_seen + 1;
    return next;
}

double beta_signal(double p_g, double p_b_smoothed) {
    if (!(p_g >= 0.0 && p_g <= 1.0)) {
        throw DomainError("group pass ratio " + std::to_string(p_g) + " outside [0, 1]");
    }
    if (!(p_b_smoothed >= 0.0 && p_b_smoothed <= 1.0)) {
        throw DomainError("batch pass ratio " + std::to_string(p_b_smoothed) +
                          " outside [0, 1]");
    }
    return p_g - p_b_smoothed;
}

}  // namespace lenreward
