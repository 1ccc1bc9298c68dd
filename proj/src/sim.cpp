#include "lenreward/sim.hpp"

#include "lenreward/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string_view>
#include <unordered_map>

namespace lenreward {

namespace {

constexpr double kAdvantageEpsilon = 1e-6;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Independent stream per (seed, step, question): parallel and serial rollouts
// agree because no generator is shared across questions.
std::mt19937_64 question_stream(std::uint64_t seed, std::int64_t step, std::string_view qid) {
    const std::uint64_t s =
        mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(step))) ^ fnv1a64(qid));
    return std::mt19937_64(s);
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Fisher-Yates with rejection-sampled bounds; avoids the
// implementation-defined std::shuffle sequence.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

int sample_level(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<int>(i) + 1;
    }
    return static_cast<int>(probs.size());
}

std::string format_double(double v, const char* fmt = "%.10g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace

void PolicyShape::validate() const {
    if (levels < 2) throw ConfigError("policy.levels", "must be >= 2");
    if (token_unit < 1) throw ConfigError("policy.token_unit", "must be >= 1");
    if (!std::isfinite(init_slope)) throw ConfigError("policy.init_slope", "must be finite");
}

SimPolicy SimPolicy::uniform(const std::vector<SimQuestion>& bank, PolicyShape shape) {
    shape.validate();
    SimPolicy policy;
    policy.shape = shape;
    for (const SimQuestion& q : bank) {
        policy.logits[q.question_id] = std::vector<double>(shape.levels, 0.0);
    }
    return policy;
}

SimPolicy SimPolicy::initial(const std::vector<SimQuestion>& bank, PolicyShape shape) {
    SimPolicy policy = uniform(bank, shape);
    for (auto& [qid, theta] : policy.logits) {
        for (int l = 0; l < shape.levels; ++l) theta[l] = -shape.init_slope * l;
    }
    return policy;
}

std::vector<double> SimPolicy::probs(const std::string& question_id) const {
    const auto it = logits.find(question_id);
    if (it == logits.end()) {
        throw DomainError("policy has no question '" + question_id + "'");
    }
    const std::vector<double>& theta = it->second;
    const double max_logit = *std::max_element(theta.begin(), theta.end());
    std::vector<double> p(theta.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        p[i] = std::exp(theta[i] - max_logit);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

double SimPolicy::entropy(const std::string& question_id) const {
    double h = 0.0;
    for (double p : probs(question_id)) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double SimPolicy::mean_entropy() const {
    if (logits.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [qid, theta] : logits) sum += entropy(qid);
    return sum / static_cast<double>(logits.size());
}

double SimEnvConfig::success_prob(int level, int levels, double difficulty) const {
    const double x = kappa * (static_cast<double>(level) / static_cast<double>(levels) -
                              difficulty);
    const double s = 1.0 / (1.0 + std::exp(-x));
    return p_min + (p_max - p_min) * s;
}

void SimEnvConfig::validate() const {
    if (!(p_min >= 0.0 && p_min < p_max && p_max <= 1.0)) {
        throw ConfigError("env.p_min/p_max", "need 0 <= p_min < p_max <= 1");
    }
    if (!(kappa > 0.0)) throw ConfigError("env.kappa", "must be > 0");
}

RewardMode reward_mode_from_string(const std::string& name) {
    if (name == "outcome_only") return RewardMode::outcome_only;
    if (name == "fixed_penalty") return RewardMode::fixed_penalty;
    if (name == "fixed_bonus") return RewardMode::fixed_bonus;
    if (name == "adaptive") return RewardMode::adaptive;
    throw ConfigError("trainer.mode", "unknown mode '" + name +
                                          "' (outcome_only|fixed_penalty|fixed_bonus|adaptive)");
}

std::string to_string(RewardMode mode) {
    switch (mode) {
        case RewardMode::outcome_only: return "outcome_only";
        case RewardMode::fixed_penalty: return "fixed_penalty";
        case RewardMode::fixed_bonus: return "fixed_bonus";
        case RewardMode::adaptive: return "adaptive";
    }
    return "adaptive";
}

void TrainerConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("trainer.learning_rate", "must be > 0");
    if (group_size < 2) throw ConfigError("trainer.group_size", "must be >= 2");
    if (batch_questions < 0) throw ConfigError("trainer.batch_questions", "must be >= 0");
    if (steps < 1) throw ConfigError("trainer.steps", "must be >= 1");
    if (!(clip_low >= 0.0 && clip_low < 1.0)) {
        throw ConfigError("trainer.clip_low", "must be in [0, 1)");
    }
    if (!(clip_high >= 0.0)) throw ConfigError("trainer.clip_high", "must be >= 0");
}

Batch rollout_step(const SimPolicy& policy, const std::vector<SimQuestion>& questions,
                   const SimEnvConfig& env, int group_size, std::uint64_t seed,
                   std::int64_t step) {
    env.validate();
    if (group_size < 2) throw ConfigError("group_size", "must be >= 2");

    Batch batch;
    batch.step = step;
    batch.groups.reserve(questions.size());
    for (const SimQuestion& q : questions) {
        const std::vector<double> probs = policy.probs(q.question_id);
        std::mt19937_64 rng = question_stream(seed, step, q.question_id);

        QuestionGroup group;
        group.question_id = q.question_id;
        group.rollouts.reserve(group_size);
        for (int j = 0; j < group_size; ++j) {
            const int level = sample_level(probs, uniform01(rng));
            const double p = env.success_prob(level, policy.shape.levels, q.difficulty);
            RolloutRecord r;
            r.question_id = q.question_id;
            r.rollout_id = j + 1;
            r.length = static_cast<std::int64_t>(level) * policy.shape.token_unit;
            r.correct = uniform01(rng) < p;
            r.step = step;
            group.rollouts.push_back(std::move(r));
        }
        batch.groups.push_back(std::move(group));
    }
    return batch;
}

std::vector<double> group_advantages(const std::vector<double>& rewards) {
    if (rewards.empty()) throw DegenerateInputError("no rewards to normalize");
    const bool constant =
        std::all_of(rewards.begin(), rewards.end(),
                    [&](double v) { return v == rewards.front(); });
    if (constant) return std::vector<double>(rewards.size(), 0.0);

    const auto n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double v : rewards) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : rewards) var += (v - mean) * (v - mean);
    const double std_dev = std::sqrt(var / n);

    std::vector<double> advantages;
    advantages.reserve(rewards.size());
    for (double v : rewards) advantages.push_back((v - mean) / (std_dev + kAdvantageEpsilon));
    return advantages;
}

std::map<std::string, std::vector<double>> policy_gradient(
    const SimPolicy& policy, const Batch& batch,
    const std::vector<std::vector<double>>& rewards, const TrainerConfig& config) {
    config.validate();
    if (rewards.size() != batch.groups.size()) {
        throw DomainError("rewards not aligned with batch groups");
    }

    std::map<std::string, std::vector<double>> grads;
    for (std::size_t i = 0; i < batch.groups.size(); ++i) {
        const QuestionGroup& group = batch.groups[i];
        const std::vector<double>& r = rewards[i];
        if (r.size() != group.rollouts.size()) {
            throw DomainError("rewards not aligned with rollouts of '" + group.question_id +
                              "'");
        }
        const std::vector<double> advantages = group_advantages(r);

        const std::vector<double> probs = policy.probs(group.question_id);
        std::vector<double> grad(probs.size(), 0.0);
        for (std::size_t j = 0; j < group.rollouts.size(); ++j) {
            const RolloutRecord& rollout = group.rollouts[j];
            if (rollout.length % policy.shape.token_unit != 0) {
                throw DomainError("rollout length " + std::to_string(rollout.length) +
                                  " is not on the policy's level grid");
            }
            const std::int64_t level = rollout.length / policy.shape.token_unit;
            if (level < 1 || level > policy.shape.levels) {
                throw DomainError("rollout level " + std::to_string(level) +
                                  " outside 1.." + std::to_string(policy.shape.levels));
            }
            const double advantage = advantages[j];
            // Single-epoch update: the new and old policies coincide, so the
            // probability ratio is exactly 1 and the clip band cannot bind.
            const double ratio = 1.0;
            const double clipped =
                std::clamp(ratio, 1.0 - config.clip_low, 1.0 + config.clip_high);
            const double w = clipped * advantage / static_cast<double>(r.size());
            grad[static_cast<std::size_t>(level - 1)] += w;
            for (std::size_t l = 0; l < grad.size(); ++l) grad[l] -= w * probs[l];
        }
        grads[group.question_id] = std::move(grad);
    }
    return grads;
}

SimPolicy grpo_update(const SimPolicy& policy, const Batch& batch,
                      const std::vector<std::vector<double>>& rewards,
                      const TrainerConfig& config) {
    const auto grads = policy_gradient(policy, batch, rewards, config);
    SimPolicy next = policy;
    for (const auto& [qid, grad] : grads) {
        std::vector<double>& theta = next.logits.at(qid);
        for (std::size_t l = 0; l < theta.size(); ++l) {
            theta[l] += config.learning_rate * grad[l];
        }
    }
    return next;
}

std::vector<SimQuestion> make_two_level_bank(int size, double d_easy, double d_hard) {
    if (size < 1) throw ConfigError("bank.size", "must be >= 1");
    std::vector<SimQuestion> bank;
    bank.reserve(size);
    for (int i = 0; i < size; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "q%04d", i);
        bank.push_back({id, i < size / 2 ? d_easy : d_hard});
    }
    return bank;
}

std::vector<SimQuestion> make_uniform_bank(int size, std::uint64_t seed) {
    if (size < 1) throw ConfigError("bank.size", "must be >= 1");
    std::mt19937_64 rng(mix64(seed ^ 0x5b4e6f72d1c8a3f1ull));
    std::vector<SimQuestion> bank;
    bank.reserve(size);
    for (int i = 0; i < size; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "q%04d", i);
        bank.push_back({id, uniform01(rng)});
    }
    return bank;
}

SimResult run_training(const std::vector<SimQuestion>& bank, const SimEnvConfig& env,
                       const TrainerConfig& trainer, const RewardConfig& reward,
                       EmaTracker tracker, bool ema_update_before_scoring,
                       PolicyShape shape) {
    env.validate();
    trainer.validate();
    reward.validate();
    shape.validate();
    if (bank.empty()) throw DegenerateInputError("question bank is empty");
    std::unordered_map<std::string, double> difficulty;
    for (const SimQuestion& q : bank) {
        if (!(q.difficulty >= 0.0 && q.difficulty <= 1.0)) {
            throw DomainError("question '" + q.question_id + "' difficulty outside [0, 1]");
        }
        difficulty[q.question_id] = q.difficulty;
    }

    SimResult result;
    result.policy = SimPolicy::initial(bank, shape);
    result.metrics.reserve(trainer.steps);

    const bool whole_bank = trainer.batch_questions == 0 ||
                            trainer.batch_questions >= static_cast<int>(bank.size());

    for (int step = 0; step < trainer.steps; ++step) {
        std::vector<SimQuestion> questions;
        if (whole_bank) {
            questions = bank;
        } else {
            std::vector<std::size_t> idx(bank.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::mt19937_64 rng = question_stream(trainer.seed, step, "__batch_select__");
            for (std::size_t i = idx.size() - 1; i > 0; --i) {
                std::swap(idx[i], idx[uniform_below(rng, i + 1)]);
            }
            idx.resize(static_cast<std::size_t>(trainer.batch_questions));
            std::sort(idx.begin(), idx.end());
            for (std::size_t i : idx) questions.push_back(bank[i]);
        }

        const double sampling_entropy = result.policy.mean_entropy();
        const Batch batch = rollout_step(result.policy, questions, env, trainer.group_size,
                                         trainer.seed, step);

        std::vector<std::vector<double>> rewards;
        rewards.reserve(batch.groups.size());
        double p_b_true = 0.0;
        if (trainer.mode == RewardMode::outcome_only) {
            const PassRatios ratios = batch_pass_ratio(batch);
            p_b_true = ratios.batch;
            if (ema_update_before_scoring) tracker = update_ema(tracker, ratios.batch);
            for (const QuestionGroup& group : batch.groups) {
                std::vector<double> r;
                r.reserve(group.rollouts.size());
                for (const RolloutRecord& rollout : group.rollouts) {
                    r.push_back(outcome_reward(rollout.correct));
                }
                rewards.push_back(std::move(r));
            }
            if (!ema_update_before_scoring) tracker = update_ema(tracker, ratios.batch);
        } else {
            BetaPolicy beta_policy = BetaPolicy::adaptive();
            if (trainer.mode == RewardMode::fixed_penalty) beta_policy = BetaPolicy::fixed(1.0);
            if (trainer.mode == RewardMode::fixed_bonus) beta_policy = BetaPolicy::fixed(-1.0);
            const BatchScore score = score_batch(batch, tracker,
                                                 {reward, ema_update_before_scoring},
                                                 beta_policy);
            p_b_true = score.p_b_true;
            for (const GroupScore& gs : score.groups) {
                std::vector<double> r;
                r.reserve(gs.rollouts.size());
                for (const RewardBreakdown& b : gs.rollouts) r.push_back(b.r_total);
                rewards.push_back(std::move(r));
            }
        }

        result.policy = grpo_update(result.policy, batch, rewards, trainer);

        StepMetrics m;
        m.step = step;
        m.mean_entropy = sampling_entropy;
        m.true_batch_pass_ratio = p_b_true;
        m.smoothed_batch_pass_ratio = tracker.value;
        std::int64_t total = 0, easy = 0, hard = 0;
        std::int64_t total_n = 0, easy_n = 0, hard_n = 0;
        for (const QuestionGroup& group : batch.groups) {
            const bool is_easy = difficulty.at(group.question_id) < 0.5;
            for (const RolloutRecord& rollout : group.rollouts) {
                total += rollout.length;
                ++total_n;
                if (is_easy) {
                    easy += rollout.length;
                    ++easy_n;
                } else {
                    hard += rollout.length;
                    ++hard_n;
                }
            }
        }
        m.mean_length = total_n ? static_cast<double>(total) / total_n : kNaN;
        m.mean_length_easy = easy_n ? static_cast<double>(easy) / easy_n : kNaN;
        m.mean_length_hard = hard_n ? static_cast<double>(hard) / hard_n : kNaN;
        result.metrics.push_back(m);
    }
    result.tracker = tracker;
    return result;
}

std::string metrics_csv(const std::vector<StepMetrics>& metrics) {
    std::string out =
        "step,mean_entropy,mean_length,true_batch_pass_ratio,"
        "smoothed_batch_pass_ratio,mean_length_easy,mean_length_hard\n";
    for (const StepMetrics& m : metrics) {
        out += std::to_string(m.step);
        out += "," + format_double(m.mean_entropy);
        out += "," + format_double(m.mean_length);
        out += "," + format_double(m.true_batch_pass_ratio);
        out += "," + format_double(m.smoothed_batch_pass_ratio);
        out += "," + format_double(m.mean_length_easy);
        out += "," + format_double(m.mean_length_hard);
        out += "\n";
    }
    return out;
}

std::string policy_snapshot(const SimPolicy& policy) {
    std::string out;
    for (const auto& [qid, theta] : policy.logits) {
        out += "{\"question_id\":\"" + json_escape(qid) + "\",\"logits\":[";
        for (std::size_t i = 0; i < theta.size(); ++i) {
            if (i) out += ",";
            out += format_double(theta[i], "%.17g");
        }
        out += "]}\n";
    }
    return out;
}

}  // namespace lenreward
