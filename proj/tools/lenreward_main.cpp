#include "lenreward/engine.hpp"
#include "lenreward/eval.hpp"
#include "lenreward/sim.hpp"
#include "lenreward/verify.hpp"
#include "lenreward/wire.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace {

using lenreward::Batch;
using lenreward::EngineConfig;
using lenreward::QuestionGroup;
using lenreward::RolloutRecord;
using nlohmann::json;

struct CommonOpts {
    std::string config_path;
    std::string state_path;
    std::string input_path;
    std::string output_path;
    std::string k_arg;
    int bins = 0;              // 0 = keep config value
    std::int64_t seed = -1;    // <0 = keep config value
};

EngineConfig effective_config(const CommonOpts& opts) {
    EngineConfig config = opts.config_path.empty() ? EngineConfig{}
                                                   : lenreward::load_config(opts.config_path);
    lenreward::apply_env_overrides(config);
    if (!opts.k_arg.empty()) {
        std::vector<int> ks;
        std::stringstream ss(opts.k_arg);
        std::string token;
        while (std::getline(ss, token, ',')) {
            try {
                ks.push_back(std::stoi(token));
            } catch (const std::exception&) {
                throw lenreward::ConfigError("--k", "expected comma-separated integers");
            }
        }
        config.eval.k_list = ks;
    }
    if (opts.bins > 0) config.eval.bins = opts.bins;
    if (opts.seed >= 0) config.trainer.seed = static_cast<std::uint64_t>(opts.seed);
    config.validate();
    return config;
}

std::string read_stream(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string slurp_input(const CommonOpts& opts) {
    if (opts.input_path.empty() || opts.input_path == "-") return read_stream(std::cin);
    std::ifstream in(opts.input_path, std::ios::binary);
    if (!in) throw lenreward::ConfigError("--input", "cannot open '" + opts.input_path + "'");
    return read_stream(in);
}

void write_output(const CommonOpts& opts, const std::string& text) {
    if (opts.output_path.empty() || opts.output_path == "-") {
        std::fwrite(text.data(), 1, text.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(opts.output_path, std::ios::binary | std::ios::trunc);
    if (!out) throw lenreward::ConfigError("--output", "cannot write '" + opts.output_path + "'");
    out << text;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

json breakdown_json(const RolloutRecord& record, const lenreward::RewardBreakdown& b,
                    double p_g, double p_b_used, double p_b_true) {
    json j;
    j["beta"] = b.beta_used;
    j["correct"] = record.correct;
    j["length"] = record.length;
    j["p_b"] = p_b_used;
    j["p_b_true"] = p_b_true;
    j["p_g"] = p_g;
    j["question_id"] = record.question_id;
    j["r_length"] = b.r_length;
    j["r_outcome"] = b.r_outcome;
    j["r_total"] = b.r_total;
    j["r_z"] = b.r_z;
    j["rollout_id"] = record.rollout_id;
    j["step"] = record.step;
    j["z"] = b.z;
    return j;
}

// Assembles the records of one step into a batch; groups keep their
// first-appearance order and must come out complete.
Batch assemble_batch(std::int64_t step, const std::vector<RolloutRecord>& records,
                     int group_size) {
    std::vector<std::string> order;
    std::unordered_map<std::string, QuestionGroup> groups;
    for (const RolloutRecord& r : records) {
        auto [it, inserted] = groups.try_emplace(r.question_id);
        if (inserted) {
            it->second.question_id = r.question_id;
            order.push_back(r.question_id);
        }
        it->second.rollouts.push_back(r);
    }
    Batch batch;
    batch.step = step;
    for (const std::string& qid : order) {
        QuestionGroup& group = groups[qid];
        if (static_cast<int>(group.rollouts.size()) != group_size) {
            throw lenreward::Error("question '" + qid + "' has " +
                                   std::to_string(group.rollouts.size()) +
                                   " records at step " + std::to_string(step) +
                                   ", expected G=" + std::to_string(group_size));
        }
        batch.groups.push_back(std::move(group));
    }
    lenreward::validate_batch(batch);
    return batch;
}

std::string score_and_render(const Batch& batch, lenreward::EmaTracker& tracker,
                             const EngineConfig& config) {
    const lenreward::BatchScore score =
        lenreward::score_batch(batch, tracker, config.engine_options());
    std::string out;
    for (std::size_t i = 0; i < batch.groups.size(); ++i) {
        const QuestionGroup& group = batch.groups[i];
        const lenreward::GroupScore& gs = score.groups[i];
        for (std::size_t j = 0; j < group.rollouts.size(); ++j) {
            out += breakdown_json(group.rollouts[j], gs.rollouts[j], gs.p_g,
                                  score.p_b_smoothed, score.p_b_true)
                       .dump();
            out += "\n";
        }
    }
    return out;
}

int run_reward(const CommonOpts& opts) {
    const EngineConfig config = effective_config(opts);
    lenreward::EmaTracker tracker =
        (!opts.state_path.empty() && std::filesystem::exists(opts.state_path))
            ? lenreward::load_ema_state(opts.state_path)
            : config.make_tracker();

    std::istringstream in(slurp_input(opts));
    std::string line;
    int line_no = 0;
    std::optional<std::int64_t> current_step;
    std::vector<RolloutRecord> pending;
    std::string out;

    const auto flush = [&]() {
        if (pending.empty()) return;
        out += score_and_render(assemble_batch(*current_step, pending, config.group_size),
                                tracker, config);
        pending.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        RolloutRecord record = lenreward::parse_record_line(line, line_no);
        if (current_step && record.step != *current_step) flush();
        current_step = record.step;
        pending.push_back(std::move(record));
    }
    flush();

    if (!opts.state_path.empty()) lenreward::save_ema_state(tracker, opts.state_path);
    write_output(opts, out);
    return 0;
}

int run_passk(const CommonOpts& opts) {
    const EngineConfig config = effective_config(opts);
    std::istringstream in(slurp_input(opts));
    const std::vector<RolloutRecord> records = lenreward::parse_records(in);
    if (records.empty()) throw lenreward::Error("empty input: no rollout records");

    std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_question;  // n, c
    for (const RolloutRecord& r : records) {
        auto& [n, c] = per_question[r.question_id];
        ++n;
        if (r.correct) ++c;
    }

    const std::vector<int>& k_list = config.eval.k_list;
    std::string out = "question_id,n,c";
    for (int k : k_list) out += ",pass@" + std::to_string(k);
    out += "\n";

    std::map<int, std::pair<double, std::int64_t>> macro;  // k -> (sum, eligible)
    std::int64_t skipped = 0;
    for (const auto& [qid, nc] : per_question) {
        out += qid + "," + std::to_string(nc.first) + "," + std::to_string(nc.second);
        for (int k : k_list) {
            out += ",";
            if (nc.first < k) {
                out += "nan";
                ++skipped;
                continue;
            }
            const double score = lenreward::pass_at_k({nc.first, nc.second, k});
            out += format_double(score);
            auto& [sum, eligible] = macro[k];
            sum += score;
            ++eligible;
        }
        out += "\n";
    }

    out += "__macro__,,";
    for (int k : k_list) {
        out += ",";
        const auto it = macro.find(k);
        out += (it == macro.end() || it->second.second == 0)
                   ? "nan"
                   : format_double(it->second.first / static_cast<double>(it->second.second));
    }
    out += "\n# skipped_question_k_pairs=" + std::to_string(skipped) + "\n";
    write_output(opts, out);
    return 0;
}

int run_bins(const CommonOpts& opts) {
    const EngineConfig config = effective_config(opts);
    std::istringstream in(slurp_input(opts));
    const std::vector<RolloutRecord> records = lenreward::parse_records(in);
    const auto reports = lenreward::bin_by_length(records, config.eval);
    write_output(opts, lenreward::bin_report_csv(reports, config.eval.k_list));
    return 0;
}

int run_simulate(const CommonOpts& opts, const std::string& out_dir) {
    const EngineConfig config = effective_config(opts);
    const std::vector<lenreward::SimQuestion> bank =
        config.bank.scheme == "uniform"
            ? lenreward::make_uniform_bank(config.bank.size, config.trainer.seed)
            : lenreward::make_two_level_bank(config.bank.size, config.bank.d_easy,
                                             config.bank.d_hard);
    const lenreward::SimResult result = lenreward::run_training(
        bank, config.env, config.trainer, config.reward, config.make_tracker(),
        config.ema_update_before_scoring, config.policy);

    std::filesystem::create_directories(out_dir);
    const auto write_file = [&](const std::string& name, const std::string& text) {
        const auto path = std::filesystem::path(out_dir) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw lenreward::ConfigError("--output", "cannot write '" + path.string() + "'");
        out << text;
    };
    write_file("metrics.csv", lenreward::metrics_csv(result.metrics));
    write_file("policy.jsonl", lenreward::policy_snapshot(result.policy));
    return 0;
}

json serve_score(const json& request, lenreward::EmaTracker& tracker,
                 const EngineConfig& config) {
    if (!request.contains("records") || !request["records"].is_array() ||
        request["records"].empty()) {
        throw lenreward::Error("score request needs a non-empty 'records' array");
    }
    std::vector<RolloutRecord> records;
    int index = 0;
    for (const json& element : request["records"]) {
        records.push_back(lenreward::parse_record_line(element.dump(), ++index));
    }
    const std::int64_t step = records.front().step;
    for (const RolloutRecord& r : records) {
        if (r.step != step) {
            throw lenreward::Error("mixed steps in one batch: " + std::to_string(step) +
                                   " and " + std::to_string(r.step));
        }
    }
    const Batch batch = assemble_batch(step, records, config.group_size);
    const lenreward::BatchScore score =
        lenreward::score_batch(batch, tracker, config.engine_options());

    json rollouts = json::array();
    for (std::size_t i = 0; i < batch.groups.size(); ++i) {
        for (std::size_t j = 0; j < batch.groups[i].rollouts.size(); ++j) {
            rollouts.push_back(breakdown_json(batch.groups[i].rollouts[j],
                                              score.groups[i].rollouts[j], score.groups[i].p_g,
                                              score.p_b_smoothed, score.p_b_true));
        }
    }
    json response;
    response["ok"] = true;
    response["type"] = "scores";
    response["step"] = score.step;
    response["p_b"] = score.p_b_smoothed;
    response["p_b_true"] = score.p_b_true;
    response["rollouts"] = std::move(rollouts);
    return response;
}

int run_serve(const CommonOpts& opts, const std::string& transport) {
    if (transport != "stdio") {
        throw lenreward::ConfigError("--transport", "only 'stdio' is supported");
    }
    if (opts.state_path.empty()) {
        throw lenreward::ConfigError("--state", "serve requires a state path");
    }
    const EngineConfig config = effective_config(opts);
    lenreward::EmaTracker tracker = std::filesystem::exists(opts.state_path)
                                        ? lenreward::load_ema_state(opts.state_path)
                                        : config.make_tracker();
    lenreward::save_ema_state(tracker, opts.state_path);

    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        json response;
        bool shutdown = false;
        try {
            json request;
            try {
                request = json::parse(line);
            } catch (const json::exception& e) {
                throw lenreward::Error(std::string("invalid JSON request: ") + e.what());
            }
            if (!request.is_object() || !request.contains("type") ||
                !request["type"].is_string()) {
                throw lenreward::Error("request needs a string 'type'");
            }
            const std::string type = request["type"].get<std::string>();
            if (type == "score") {
                response = serve_score(request, tracker, config);
                lenreward::save_ema_state(tracker, opts.state_path);
            } else if (type == "snapshot") {
                response["ok"] = true;
                response["type"] = "snapshot";
                response["state"] = {{"lambda", tracker.lambda},
                                     {"steps_seen", tracker.steps_seen},
                                     {"value", tracker.value}};
            } else if (type == "shutdown") {
                lenreward::save_ema_state(tracker, opts.state_path);
                response["ok"] = true;
                response["type"] = "shutdown";
                shutdown = true;
            } else {
                throw lenreward::Error("unknown request type '" + type + "'");
            }
        } catch (const lenreward::Error& e) {
            response = json{{"ok", false}, {"error", e.what()}};
        }
        std::cout << response.dump() << "\n" << std::flush;
        if (shutdown) break;
    }
    lenreward::save_ema_state(tracker, opts.state_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive dual-mode length reward engine: scoring, pass@k / length-bin "
                 "evaluation, training simulator, and a streaming reward service."};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string out_dir = "sim_out";
    std::string transport = "stdio";

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "JSON config file");
        cmd->add_option("--state", opts.state_path, "EMA state checkpoint path");
        cmd->add_option("--input,-i", opts.input_path, "input file ('-' = stdin)");
        cmd->add_option("--output,-o", opts.output_path, "output file ('-' = stdout)");
        cmd->add_option("--seed", opts.seed, "RNG seed override");
        cmd->add_option("--bins", opts.bins, "number of length bins");
        cmd->add_option("--k", opts.k_arg, "comma-separated k list, e.g. \"1,32\"");
    };

    CLI::App* reward = app.add_subcommand(
        "reward", "score JSONL rollout records with the adaptive dual length reward");
    add_common(reward);
    CLI::App* passk = app.add_subcommand("passk", "per-question and macro pass@k report");
    add_common(passk);
    CLI::App* bins = app.add_subcommand("bins", "standardized-length bin report");
    add_common(bins);
    CLI::App* simulate = app.add_subcommand("simulate", "run the toy training loop");
    add_common(simulate);
    simulate->add_option("--out-dir", out_dir, "directory for metrics.csv and policy.jsonl");
    CLI::App* serve = app.add_subcommand("serve", "line-delimited streaming reward service");
    add_common(serve);
    serve->add_option("--transport", transport, "transport (stdio)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (reward->parsed()) return run_reward(opts);
        if (passk->parsed()) return run_passk(opts);
        if (bins->parsed()) return run_bins(opts);
        if (simulate->parsed()) return run_simulate(opts, out_dir);
        if (serve->parsed()) return run_serve(opts, transport);
    } catch (const lenreward::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const lenreward::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const lenreward::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
