#pragma once

#include <string>
#include <vector>

#include "lenreward/difficulty.hpp"
#include "lenreward/reward.hpp"

namespace lenreward {

/// How beta is chosen when scoring a batch.
struct BetaPolicy {
    enum class Mode { adaptive, fixed };

    Mode mode = Mode::adaptive;
    double fixed_beta = 0.0;  // used only in fixed mode

    static BetaPolicy adaptive() { return {}; }
    static BetaPolicy fixed(double beta) { return {Mode::fixed, beta}; }
};

struct EngineOptions {
    RewardConfig reward;
    // update-then-use ordering: fold this batch's true ratio into the EMA
    // before deriving beta. Flip for the use-then-update ablation.
    bool ema_update_before_scoring = true;
};

struct GroupScore {
    std::string question_id;
    double p_g = 0.0;
    double beta = 0.0;
    std::vector<RewardBreakdown> rollouts;  // aligned with the group's rollouts
};

struct BatchScore {
    std::int64_t step = 0;
    double p_b_true = 0.0;      // instantaneous batch pass ratio
    double p_b_smoothed = 0.0;  // EMA value beta was derived from
    std::vector<GroupScore> groups;
};

/// Scores one batch end to end: pass ratios, one EMA update, per-group beta,
/// reward breakdowns. Exactly one EMA update per call.
BatchScore score_batch(const Batch& batch, EmaTracker& tracker, const EngineOptions& options,
                       const BetaPolicy& beta_policy = {});

}  // namespace lenreward
