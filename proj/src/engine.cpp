#include "lenreward/engine.hpp"

namespace lenreward {

BatchScore score_batch(const Batch& batch, EmaTracker& tracker, const EngineOptions& options,
                       const BetaPolicy& beta_policy) {
    options.reward.validate();
    const PassRatios ratios = batch_pass_ratio(batch);

    if (options.ema_update_before_scoring) {
        tracker = update_ema(tracker, ratios.batch);
    }
    const double p_b_effective = tracker.value;

    BatchScore score;
    score.step = batch.step;
    score.p_b_true = ratios.batch;
    score.p_b_smoothed = p_b_effective;
    score.groups.reserve(batch.groups.size());
    for (const QuestionGroup& group : batch.groups) {
        GroupScore gs;
        gs.question_id = group.question_id;
        gs.p_g = ratios.per_question.at(group.question_id);
        gs.beta = beta_policy.mode == BetaPolicy::Mode::fixed
                      ? beta_policy.fixed_beta
                      : beta_signal(gs.p_g, p_b_effective);
        gs.rollouts = score_group(group, gs.beta, options.reward);
        score.groups.push_back(std::move(gs));
    }

    if (!options.ema_update_before_scoring) {
        tracker = update_ema(tracker, ratios.batch);
    }
    return score;
}

}  // namespace lenreward
