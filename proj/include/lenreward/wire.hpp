#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lenreward/difficulty.hpp"
#include "lenreward/engine.hpp"
#include "lenreward/eval.hpp"
#include "lenreward/sim.hpp"

namespace lenreward {

/// Parses one JSONL rollout record. Required keys: question_id, rollout_id,
/// length, correct, step. When `correct` is absent but `predicted` and
/// `reference` are present, the verifier fills it in. Unknown keys are
/// ignored. Throws ParseError carrying the 1-based line number.
RolloutRecord parse_record_line(const std::string& line, int line_no);

/// Parses a whole stream of JSONL records; blank lines are skipped.
std::vector<RolloutRecord> parse_records(std::istream& in);

/// One-line JSON encoding of a record (keys in lexicographic order).
std::string record_to_json_line(const RolloutRecord& record);

/// Human-readable EMA checkpoint: {"lambda":..., "value":..., "steps_seen":...}.
std::string ema_state_to_string(const EmaTracker& tracker);
EmaTracker parse_ema_state(const std::string& text);
EmaTracker load_ema_state(const std::string& path);
void save_ema_state(const EmaTracker& tracker, const std::string& path);

struct BankConfig {
    int size = 64;
    std::string scheme = "two_level";  // or "uniform"
    double d_easy = 0.0;
    double d_hard = 1.0;

    void validate() const;
};

/// Everything the CLI reads from --config. Every field is optional in the
/// file; absent fields keep these defaults.
struct EngineConfig {
    RewardConfig reward;
    double ema_lambda = 0.99;
    double ema_init = 1.0;
    bool ema_update_before_scoring = true;
    int group_size = 32;  // G
    BinOptions eval;
    TrainerConfig trainer;
    SimEnvConfig env;
    BankConfig bank;
    PolicyShape policy;

    EmaTracker make_tracker() const { return {ema_lambda, ema_init, 0}; }
    EngineOptions engine_options() const { return {reward, ema_update_before_scoring}; }
    void validate() const;  // ConfigError with a field path on bad values
};

/// Parses a JSON config document. Unknown keys and invalid values are
/// rejected with a field-path error.
EngineConfig parse_config(const std::string& text);
EngineConfig load_config(const std::string& path);

/// Applies LENREWARD_* environment variable overrides; each variable maps
/// 1:1 to a config field (e.g. LENREWARD_REWARD_ALPHA -> reward.alpha).
/// Values are parsed as JSON scalars. Unknown variables under the prefix are
/// rejected. Returns the names of the variables applied.
std::vector<std::string> apply_env_overrides(EngineConfig& config,
                                             const std::string& prefix = "LENREWARD_");

}  // namespace lenreward
