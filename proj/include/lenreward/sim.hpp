#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lenreward/engine.hpp"
#include "lenreward/types.hpp"

namespace lenreward {

/// Synthetic question with a latent difficulty the trainer never reads;
/// difficulty only shapes the environment's success curve and the
/// easy/hard split in the reported metrics.
struct SimQuestion {
    std::string question_id;
    double difficulty = 0.5;  // d in [0,1], higher = harder
};

struct PolicyShape {
    int levels = 16;               // L discrete length levels
    std::int64_t token_unit = 64;  // tokens per level: length(l) = l * token_unit
    double init_slope = 0.25;      // initial logit decrease per level; biases the
                                   // starting policy toward short responses the way
                                   // an untuned base model answers briefly

    void validate() const;
};

/// Categorical policy over discrete length levels, one logit vector per
/// question. Level l in 1..L maps to l * token_unit tokens.
struct SimPolicy {
    PolicyShape shape;
    std::map<std::string, std::vector<double>> logits;  // question_id -> L logits

    static SimPolicy uniform(const std::vector<SimQuestion>& bank, PolicyShape shape = {});

    /// Starting policy for training: logits[l] = -init_slope * l.
    static SimPolicy initial(const std::vector<SimQuestion>& bank, PolicyShape shape = {});

    /// softmax over the question's logits; sums to 1.
    std::vector<double> probs(const std::string& question_id) const;

    /// Categorical entropy in nats, in [0, ln L].
    double entropy(const std::string& question_id) const;

    /// Mean entropy over every question the policy knows.
    double mean_entropy() const;
};

/// Success curve of the synthetic environment:
/// p(correct | l, d) = p_min + (p_max - p_min) * sigmoid(kappa * (l/L - d)).
/// Longer responses always help; difficulty shifts the curve's midpoint.
struct SimEnvConfig {
    double p_min = 0.08;
    double p_max = 0.95;
    double kappa = 32.0;

    double success_prob(int level, int levels, double difficulty) const;
    void validate() const;
};

enum class RewardMode { outcome_only, fixed_penalty, fixed_bonus, adaptive };

RewardMode reward_mode_from_string(const std::string& name);  // ConfigError on unknown
std::string to_string(RewardMode mode);

struct TrainerConfig {
    double learning_rate = 0.4;
    int group_size = 32;      // G rollouts per question
    int batch_questions = 0;  // B questions per step; 0 = the whole bank
    int steps = 300;
    double clip_low = 0.20;   // ratio clip band [1-clip_low, 1+clip_high]
    double clip_high = 0.28;
    RewardMode mode = RewardMode::adaptive;
    std::uint64_t seed = 1;

    void validate() const;
};

struct StepMetrics {
    std::int64_t step = 0;
    double mean_entropy = 0.0;  // over the whole bank, policy used for sampling
    double mean_length = 0.0;   // over this step's sampled rollouts
    double true_batch_pass_ratio = 0.0;
    double smoothed_batch_pass_ratio = 0.0;  // EMA value after this step's update
    double mean_length_easy = 0.0;           // rollouts of questions with d < 0.5
    double mean_length_hard = 0.0;           // rollouts of questions with d >= 0.5
};

/// Samples G length levels per question from the policy and draws correctness
/// from the environment's success curve. Each question gets its own RNG
/// stream derived from (seed, step, question_id), so parallel and serial
/// execution produce the same batch. Deterministic for a fixed seed.
Batch rollout_step(const SimPolicy& policy, const std::vector<SimQuestion>& questions,
                   const SimEnvConfig& env, int group_size, std::uint64_t seed,
                   std::int64_t step);

/// Group-normalized advantages (r - mean) / (std + 1e-6), population std.
/// A group whose rewards are all identical gets exact zeros, so it never
/// moves the policy.
std::vector<double> group_advantages(const std::vector<double>& rewards);

/// Group-relative policy gradient of the clipped surrogate at the sampling
/// policy (single epoch: every probability ratio is 1, so the clip band is
/// inert). Advantages come from group_advantages(). Returns one gradient
/// vector per batch question.
std::map<std::string, std::vector<double>> policy_gradient(
    const SimPolicy& policy, const Batch& batch,
    const std::vector<std::vector<double>>& rewards, const TrainerConfig& config);

/// One ascent step on the logits: theta += lr * gradient.
/// `rewards[i][j]` aligns with `batch.groups[i].rollouts[j]`.
SimPolicy grpo_update(const SimPolicy& policy, const Batch& batch,
                      const std::vector<std::vector<double>>& rewards,
                      const TrainerConfig& config);

struct SimResult {
    std::vector<StepMetrics> metrics;
    SimPolicy policy;
    EmaTracker tracker;
};

/// Full training loop: rollout -> pass ratios -> EMA -> beta per mode ->
/// rewards -> policy update, recording per-step metrics.
SimResult run_training(const std::vector<SimQuestion>& bank, const SimEnvConfig& env,
                       const TrainerConfig& trainer, const RewardConfig& reward,
                       EmaTracker tracker, bool ema_update_before_scoring = true,
                       PolicyShape shape = {});

/// Bank with the first half at difficulty d_easy and the rest at d_hard.
std::vector<SimQuestion> make_two_level_bank(int size, double d_easy = 0.0,
                                             double d_hard = 1.0);

/// Bank with difficulties drawn uniformly from [0,1] (seeded).
std::vector<SimQuestion> make_uniform_bank(int size, std::uint64_t seed);

/// CSV with one row per step, columns matching StepMetrics fields.
std::string metrics_csv(const std::vector<StepMetrics>& metrics);

/// Policy snapshot, one JSON line per question: {"question_id":..., "logits":[...]}.
std::string policy_snapshot(const SimPolicy& policy);

}  // namespace lenreward
