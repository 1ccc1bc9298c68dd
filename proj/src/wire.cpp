#include "lenreward/wire.hpp"

#include "lenreward/verify.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

extern char** environ;

namespace lenreward {

namespace {

using nlohmann::json;

bool is_blank(const std::string& line) {
    for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::string type_name(const json& v) { return v.type_name(); }

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number, got " + type_name(v));
    return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ConfigError(path, "expected an integer, got " + type_name(v));
    }
    return v.get<std::int64_t>();
}

bool get_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected a boolean, got " + type_name(v));
    return v.get<bool>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string, got " + type_name(v));
    return v.get<std::string>();
}

std::vector<int> get_int_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array, got " + type_name(v));
    std::vector<int> out;
    for (const json& e : v) {
        if (!e.is_number_integer()) throw ConfigError(path, "expected integers");
        out.push_back(e.get<int>());
    }
    return out;
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError(path, "expected an object, got " + type_name(v));
}

void apply_reward(RewardConfig& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "alpha") c.alpha = get_number(value, path);
        else if (key == "epsilon") c.epsilon = get_number(value, path);
        else if (key == "correctness_conditioned") c.correctness_conditioned = get_bool(value, path);
        else throw ConfigError(path, "unknown field");
    }
}

void apply_eval(BinOptions& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "bins") c.bins = static_cast<int>(get_int(value, path));
        else if (key == "k_list") c.k_list = get_int_list(value, path);
        else if (key == "epsilon") c.epsilon = get_number(value, path);
        else if (key == "aggregation") {
            const std::string name = get_string(value, path);
            if (name == "macro") c.aggregation = BinAggregation::macro;
            else if (name == "pooled") c.aggregation = BinAggregation::pooled;
            else throw ConfigError(path, "expected 'macro' or 'pooled'");
        } else {
            throw ConfigError(path, "unknown field");
        }
    }
}

void apply_trainer(TrainerConfig& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "learning_rate") c.learning_rate = get_number(value, path);
        else if (key == "batch_questions") c.batch_questions = static_cast<int>(get_int(value, path));
        else if (key == "steps") c.steps = static_cast<int>(get_int(value, path));
        else if (key == "clip_low") c.clip_low = get_number(value, path);
        else if (key == "clip_high") c.clip_high = get_number(value, path);
        else if (key == "mode") c.mode = reward_mode_from_string(get_string(value, path));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(get_int(value, path));
        else throw ConfigError(path, "unknown field");
    }
}

void apply_env_section(SimEnvConfig& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "p_min") c.p_min = get_number(value, path);
        else if (key == "p_max") c.p_max = get_number(value, path);
        else if (key == "kappa") c.kappa = get_number(value, path);
        else throw ConfigError(path, "unknown field");
    }
}

void apply_bank(BankConfig& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "size") c.size = static_cast<int>(get_int(value, path));
        else if (key == "scheme") c.scheme = get_string(value, path);
        else if (key == "d_easy") c.d_easy = get_number(value, path);
        else if (key == "d_hard") c.d_hard = get_number(value, path);
        else throw ConfigError(path, "unknown field");
    }
}

void apply_policy(PolicyShape& c, const json& j, const std::string& prefix) {
    require_object(j, prefix);
    for (const auto& [key, value] : j.items()) {
        const std::string path = prefix + "." + key;
        if (key == "levels") c.levels = static_cast<int>(get_int(value, path));
        else if (key == "token_unit") c.token_unit = get_int(value, path);
        else if (key == "init_slope") c.init_slope = get_number(value, path);
        else throw ConfigError(path, "unknown field");
    }
}

void apply_config_json(EngineConfig& config, const json& root) {
    require_object(root, "config");
    for (const auto& [key, value] : root.items()) {
        if (key == "reward") apply_reward(config.reward, value, "reward");
        else if (key == "ema") {
            require_object(value, "ema");
            for (const auto& [ekey, evalue] : value.items()) {
                const std::string path = "ema." + ekey;
                if (ekey == "lambda") config.ema_lambda = get_number(evalue, path);
                else if (ekey == "init") config.ema_init = get_number(evalue, path);
                else if (ekey == "update_before_scoring")
                    config.ema_update_before_scoring = get_bool(evalue, path);
                else throw ConfigError(path, "unknown field");
            }
        }
        else if (key == "group_size") config.group_size = static_cast<int>(get_int(value, "group_size"));
        else if (key == "eval") apply_eval(config.eval, value, "eval");
        else if (key == "trainer") apply_trainer(config.trainer, value, "trainer");
        else if (key == "env") apply_env_section(config.env, value, "env");
        else if (key == "bank") apply_bank(config.bank, value, "bank");
        else if (key == "policy") apply_policy(config.policy, value, "policy");
        else throw ConfigError(key, "unknown field");
    }
    config.trainer.group_size = config.group_size;
}

// LENREWARD_REWARD_ALPHA -> {"reward":{"alpha":...}}; LENREWARD_GROUP_SIZE
// -> {"group_size":...}. The first token selects a section when it names one.
json env_override_patch(const std::string& suffix, const std::string& raw_value) {
    std::string lower;
    for (char c : suffix) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));

    json value;
    try {
        value = json::parse(raw_value);
    } catch (const json::exception&) {
        value = raw_value;  // unquoted strings like "pooled" or "adaptive"
    }

    static const char* kSections[] = {"reward", "ema", "eval", "trainer", "env", "bank", "policy"};
    for (const char* section : kSections) {
        const std::string head = std::string(section) + "_";
        if (lower.rfind(head, 0) == 0 && lower.size() > head.size()) {
            json patch = json::object();
            patch[section] = json::object();
            patch[section][lower.substr(head.size())] = value;
            return patch;
        }
    }
    if (lower == "group_size") {
        json patch = json::object();
        patch["group_size"] = value;
        return patch;
    }
    throw ConfigError("LENREWARD_" + suffix, "does not map to a config field");
}

}  // namespace

RolloutRecord parse_record_line(const std::string& line, int line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");

    RolloutRecord r;
    try {
        if (!j.contains("question_id") || !j["question_id"].is_string()) {
            throw ParseError(line_no, "missing or non-string 'question_id'");
        }
        r.question_id = j["question_id"].get<std::string>();

        for (const char* key : {"rollout_id", "length", "step"}) {
            if (!j.contains(key) || !j[key].is_number_integer()) {
                throw ParseError(line_no, std::string("missing or non-integer '") + key + "'");
            }
        }
        r.rollout_id = j["rollout_id"].get<std::int64_t>();
        r.length = j["length"].get<std::int64_t>();
        r.step = j["step"].get<std::int64_t>();
        if (r.length < 0) throw ParseError(line_no, "'length' must be >= 0");
        if (r.step < 0) throw ParseError(line_no, "'step' must be >= 0");

        if (j.contains("correct")) {
            if (!j["correct"].is_boolean()) throw ParseError(line_no, "non-boolean 'correct'");
            r.correct = j["correct"].get<bool>();
        } else if (j.contains("predicted") && j.contains("reference")) {
            if (!j["predicted"].is_string() || !j["reference"].is_string()) {
                throw ParseError(line_no, "'predicted' and 'reference' must be strings");
            }
            r.correct = verify({j["predicted"].get<std::string>(),
                                j["reference"].get<std::string>()});
        } else {
            throw ParseError(line_no, "need 'correct' or both 'predicted' and 'reference'");
        }
    } catch (const MalformedTaskError& e) {
        throw ParseError(line_no, std::string("verification: ") + e.what());
    }
    return r;
}

std::vector<RolloutRecord> parse_records(std::istream& in) {
    std::vector<RolloutRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        out.push_back(parse_record_line(line, line_no));
    }
    return out;
}

std::string record_to_json_line(const RolloutRecord& record) {
    json j;
    j["correct"] = record.correct;
    j["length"] = record.length;
    j["question_id"] = record.question_id;
    j["rollout_id"] = record.rollout_id;
    j["step"] = record.step;
    return j.dump();
}

std::string ema_state_to_string(const EmaTracker& tracker) {
    json j;
    j["lambda"] = tracker.lambda;
    j["steps_seen"] = tracker.steps_seen;
    j["value"] = tracker.value;
    return j.dump() + "\n";
}

EmaTracker parse_ema_state(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("state", std::string("invalid JSON: ") + e.what());
    }
    require_object(j, "state");
    EmaTracker t;
    bool have_lambda = false, have_value = false;
    for (const auto& [key, value] : j.items()) {
        const std::string path = "state." + key;
        if (key == "lambda") {
            t.lambda = get_number(value, path);
            have_lambda = true;
        } else if (key == "value") {
            t.value = get_number(value, path);
            have_value = true;
        } else if (key == "steps_seen") {
            t.steps_seen = get_int(value, path);
        } else {
            throw ConfigError(path, "unknown field");
        }
    }
    if (!have_lambda || !have_value) throw ConfigError("state", "needs 'lambda' and 'value'");
    if (!(t.lambda >= 0.0 && t.lambda <= 1.0)) throw ConfigError("state.lambda", "outside [0, 1]");
    if (!(t.value >= 0.0 && t.value <= 1.0)) throw ConfigError("state.value", "outside [0, 1]");
    if (t.steps_seen < 0) throw ConfigError("state.steps_seen", "must be >= 0");
    return t;
}

EmaTracker load_ema_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("state", "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_ema_state(buffer.str());
}

void save_ema_state(const EmaTracker& tracker, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("state", "cannot write '" + path + "'");
    out << ema_state_to_string(tracker);
}

void BankConfig::validate() const {
    if (size < 1) throw ConfigError("bank.size", "must be >= 1");
    if (scheme != "two_level" && scheme != "uniform") {
        throw ConfigError("bank.scheme", "expected 'two_level' or 'uniform'");
    }
    if (!(d_easy >= 0.0 && d_easy <= 1.0)) throw ConfigError("bank.d_easy", "outside [0, 1]");
    if (!(d_hard >= 0.0 && d_hard <= 1.0)) throw ConfigError("bank.d_hard", "outside [0, 1]");
}

void EngineConfig::validate() const {
    reward.validate();
    if (!(ema_lambda >= 0.0 && ema_lambda <= 1.0)) {
        throw ConfigError("ema.lambda", "outside [0, 1]");
    }
    if (!(ema_init >= 0.0 && ema_init <= 1.0)) throw ConfigError("ema.init", "outside [0, 1]");
    if (group_size < 2) throw ConfigError("group_size", "must be >= 2");
    eval.validate();
    trainer.validate();
    env.validate();
    bank.validate();
    policy.validate();
}

EngineConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    EngineConfig config;
    apply_config_json(config, root);
    config.validate();
    return config;
}

EngineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::vector<std::string> apply_env_overrides(EngineConfig& config, const std::string& prefix) {
    std::vector<std::string> applied;
    for (char** env = environ; env && *env; ++env) {
        const std::string_view entry(*env);
        const std::size_t eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view name = entry.substr(0, eq);
        if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) continue;

        const std::string suffix(name.substr(prefix.size()));
        const std::string value(entry.substr(eq + 1));
        apply_config_json(config, env_override_patch(suffix, value));
        applied.push_back(std::string(name));
    }
    if (!applied.empty()) config.validate();
    return applied;
}

}  // namespace lenreward
