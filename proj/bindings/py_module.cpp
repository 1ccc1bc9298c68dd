#include "lenreward/difficulty.hpp"
#include "lenreward/engine.hpp"
#include "lenreward/eval.hpp"
#include "lenreward/reward.hpp"
#include "lenreward/sim.hpp"
#include "lenreward/verify.hpp"
#include "lenreward/wire.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lenreward;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive dual-mode length reward engine: verifier, reward shaping, "
              "difficulty signals, pass@k / length-bin evaluation, and a toy "
              "group-relative training simulator.";

    py::register_exception<Error>(m, "EngineError", PyExc_ValueError);

    // ---- core types ----
    py::class_<RolloutRecord>(m, "RolloutRecord")
        .def(py::init([](std::string question_id, std::int64_t rollout_id, std::int64_t length,
                         bool correct, std::int64_t step) {
                 return RolloutRecord{std::move(question_id), rollout_id, length, correct, step};
             }),
             py::arg("question_id"), py::arg("rollout_id"), py::arg("length"),
             py::arg("correct"), py::arg("step") = 0)
        .def_readwrite("question_id", &RolloutRecord::question_id)
        .def_readwrite("rollout_id", &RolloutRecord::rollout_id)
        .def_readwrite("length", &RolloutRecord::length)
        .def_readwrite("correct", &RolloutRecord::correct)
        .def_readwrite("step", &RolloutRecord::step)
        .def("__repr__", [](const RolloutRecord& r) { return record_to_json_line(r); });

    py::class_<QuestionGroup>(m, "QuestionGroup")
        .def(py::init([](std::string question_id, std::vector<RolloutRecord> rollouts) {
                 return QuestionGroup{std::move(question_id), std::move(rollouts)};
             }),
             py::arg("question_id"), py::arg("rollouts"))
        .def_readwrite("question_id", &QuestionGroup::question_id)
        .def_readwrite("rollouts", &QuestionGroup::rollouts)
        .def("__len__", &QuestionGroup::size);

    py::class_<Batch>(m, "Batch")
        .def(py::init([](std::int64_t step, std::vector<QuestionGroup> groups) {
                 return Batch{step, std::move(groups)};
             }),
             py::arg("step"), py::arg("groups"))
        .def_readwrite("step", &Batch::step)
        .def_readwrite("groups", &Batch::groups);

    // ---- verifier ----
    m.def(
        "canonicalize", [](const std::string& answer) { return canonicalize(answer); },
        py::arg("answer"));
    m.def(
        "verify",
        [](const std::string& predicted, const std::string& reference) {
            return verify({predicted, reference});
        },
        py::arg("predicted"), py::arg("reference"));
    m.def("outcome_reward", &outcome_reward, py::arg("correct"));

    // ---- reward ----
    py::class_<RewardConfig>(m, "RewardConfig")
        .def(py::init([](double alpha, double epsilon, bool correctness_conditioned) {
                 RewardConfig c{alpha, epsilon, correctness_conditioned};
                 c.validate();
                 return c;
             }),
             py::arg("alpha") = 0.2, py::arg("epsilon") = 1e-6,
             py::arg("correctness_conditioned") = true)
        .def_readwrite("alpha", &RewardConfig::alpha)
        .def_readwrite("epsilon", &RewardConfig::epsilon)
        .def_readwrite("correctness_conditioned", &RewardConfig::correctness_conditioned);

    py::class_<LengthStats>(m, "LengthStats")
        .def(py::init<>())
        .def_readwrite("mean", &LengthStats::mean)
        .def_readwrite("std", &LengthStats::std)
        .def_readwrite("sum", &LengthStats::sum)
        .def_readwrite("count", &LengthStats::count);

    py::class_<RewardBreakdown>(m, "RewardBreakdown")
        .def_readonly("r_outcome", &RewardBreakdown::r_outcome)
        .def_readonly("z", &RewardBreakdown::z)
        .def_readonly("r_z", &RewardBreakdown::r_z)
        .def_readonly("r_length", &RewardBreakdown::r_length)
        .def_readonly("r_total", &RewardBreakdown::r_total)
        .def_readonly("beta_used", &RewardBreakdown::beta_used);

    m.def("length_stats", &length_stats, py::arg("group"));
    m.def("standardize", &standardize, py::arg("length"), py::arg("stats"),
          py::arg("epsilon") = 1e-6);
    m.def("length_reward", &length_reward, py::arg("z"), py::arg("beta"),
          py::arg("config") = RewardConfig{});
    m.def("combine", &combine, py::arg("r_outcome"), py::arg("r_length"), py::arg("correct"),
          py::arg("config") = RewardConfig{});
    m.def("score_group", &score_group, py::arg("group"), py::arg("beta"),
          py::arg("config") = RewardConfig{});

    // ---- difficulty ----
    py::class_<PassRatios>(m, "PassRatios")
        .def_readonly("per_question", &PassRatios::per_question)
        .def_readonly("batch", &PassRatios::batch);

    py::class_<EmaTracker>(m, "EmaTracker")
        .def(py::init([](double lambda, double value, std::int64_t steps_seen) {
                 return EmaTracker{lambda, value, steps_seen};
             }),
             py::arg("lambda_") = 0.99, py::arg("value") = 1.0, py::arg("steps_seen") = 0)
        .def_readwrite("lambda_", &EmaTracker::lambda)
        .def_readwrite("value", &EmaTracker::value)
        .def_readwrite("steps_seen", &EmaTracker::steps_seen)
        .def("__repr__", [](const EmaTracker& t) { return ema_state_to_string(t); });

    m.def("group_pass_ratio", &group_pass_ratio, py::arg("group"));
    m.def("batch_pass_ratio", &batch_pass_ratio, py::arg("batch"));
    m.def("update_ema", &update_ema, py::arg("tracker"), py::arg("true_batch_ratio"));
    m.def("beta_signal", &beta_signal, py::arg("p_g"), py::arg("p_b_smoothed"));

    // ---- engine ----
    py::class_<BetaPolicy> beta_policy(m, "BetaPolicy");
    py::enum_<BetaPolicy::Mode>(beta_policy, "Mode")
        .value("adaptive", BetaPolicy::Mode::adaptive)
        .value("fixed", BetaPolicy::Mode::fixed);
    beta_policy.def(py::init<>())
        .def_static("adaptive", &BetaPolicy::adaptive)
        .def_static("fixed", &BetaPolicy::fixed, py::arg("beta"))
        .def_readwrite("mode", &BetaPolicy::mode)
        .def_readwrite("fixed_beta", &BetaPolicy::fixed_beta);

    py::class_<EngineOptions>(m, "EngineOptions")
        .def(py::init([](RewardConfig reward, bool ema_update_before_scoring) {
                 return EngineOptions{reward, ema_update_before_scoring};
             }),
             py::arg("reward") = RewardConfig{}, py::arg("ema_update_before_scoring") = true)
        .def_readwrite("reward", &EngineOptions::reward)
        .def_readwrite("ema_update_before_scoring", &EngineOptions::ema_update_before_scoring);

    py::class_<GroupScore>(m, "GroupScore")
        .def_readonly("question_id", &GroupScore::question_id)
        .def_readonly("p_g", &GroupScore::p_g)
        .def_readonly("beta", &GroupScore::beta)
        .def_readonly("rollouts", &GroupScore::rollouts);

    py::class_<BatchScore>(m, "BatchScore")
        .def_readonly("step", &BatchScore::step)
        .def_readonly("p_b_true", &BatchScore::p_b_true)
        .def_readonly("p_b_smoothed", &BatchScore::p_b_smoothed)
        .def_readonly("groups", &BatchScore::groups);

    m.def("score_batch", &score_batch, py::arg("batch"), py::arg("tracker"),
          py::arg("options") = EngineOptions{}, py::arg("beta_policy") = BetaPolicy{});

    // ---- eval ----
    py::enum_<BinAggregation>(m, "BinAggregation")
        .value("macro", BinAggregation::macro)
        .value("pooled", BinAggregation::pooled);

    py::class_<BinOptions>(m, "BinOptions")
        .def(py::init([](int bins, std::vector<int> k_list, double epsilon,
                         BinAggregation aggregation) {
                 BinOptions o{bins, std::move(k_list), epsilon, aggregation};
                 o.validate();
                 return o;
             }),
             py::arg("bins") = 16, py::arg("k_list") = std::vector<int>{1, 32},
             py::arg("epsilon") = 1e-6, py::arg("aggregation") = BinAggregation::macro)
        .def_readwrite("bins", &BinOptions::bins)
        .def_readwrite("k_list", &BinOptions::k_list)
        .def_readwrite("epsilon", &BinOptions::epsilon)
        .def_readwrite("aggregation", &BinOptions::aggregation);

    py::class_<BinReport>(m, "BinReport")
        .def_readonly("bin_index", &BinReport::bin_index)
        .def_readonly("mean_length", &BinReport::mean_length)
        .def_readonly("sample_count", &BinReport::sample_count)
        .def_readonly("pass_at", &BinReport::pass_at);

    m.def(
        "pass_at_k",
        [](std::int64_t n, std::int64_t c, std::int64_t k) { return pass_at_k({n, c, k}); },
        py::arg("n"), py::arg("c"), py::arg("k"));
    m.def("bin_by_length", &bin_by_length, py::arg("records"), py::arg("options") = BinOptions{});
    m.def("bin_report_csv", &bin_report_csv, py::arg("reports"), py::arg("k_list"));

    // ---- sim ----
    py::enum_<RewardMode>(m, "RewardMode")
        .value("outcome_only", RewardMode::outcome_only)
        .value("fixed_penalty", RewardMode::fixed_penalty)
        .value("fixed_bonus", RewardMode::fixed_bonus)
        .value("adaptive", RewardMode::adaptive);

    py::class_<SimQuestion>(m, "SimQuestion")
        .def(py::init([](std::string question_id, double difficulty) {
                 return SimQuestion{std::move(question_id), difficulty};
             }),
             py::arg("question_id"), py::arg("difficulty"))
        .def_readwrite("question_id", &SimQuestion::question_id)
        .def_readwrite("difficulty", &SimQuestion::difficulty);

    py::class_<PolicyShape>(m, "PolicyShape")
        .def(py::init([](int levels, std::int64_t token_unit, double init_slope) {
                 PolicyShape s{levels, token_unit, init_slope};
                 s.validate();
                 return s;
             }),
             py::arg("levels") = 16, py::arg("token_unit") = 64, py::arg("init_slope") = 0.25)
        .def_readwrite("levels", &PolicyShape::levels)
        .def_readwrite("token_unit", &PolicyShape::token_unit)
        .def_readwrite("init_slope", &PolicyShape::init_slope);

    py::class_<SimPolicy>(m, "SimPolicy")
        .def_static("uniform", &SimPolicy::uniform, py::arg("bank"),
                    py::arg("shape") = PolicyShape{})
        .def_static("initial", &SimPolicy::initial, py::arg("bank"),
                    py::arg("shape") = PolicyShape{})
        .def_readwrite("shape", &SimPolicy::shape)
        .def_readwrite("logits", &SimPolicy::logits)
        .def("probs", &SimPolicy::probs, py::arg("question_id"))
        .def("entropy", &SimPolicy::entropy, py::arg("question_id"))
        .def("mean_entropy", &SimPolicy::mean_entropy);

    py::class_<SimEnvConfig>(m, "SimEnvConfig")
        .def(py::init([](double p_min, double p_max, double kappa) {
                 SimEnvConfig e{p_min, p_max, kappa};
                 e.validate();
                 return e;
             }),
             py::arg("p_min") = 0.08, py::arg("p_max") = 0.95, py::arg("kappa") = 32.0)
        .def_readwrite("p_min", &SimEnvConfig::p_min)
        .def_readwrite("p_max", &SimEnvConfig::p_max)
        .def_readwrite("kappa", &SimEnvConfig::kappa)
        .def("success_prob", &SimEnvConfig::success_prob, py::arg("level"), py::arg("levels"),
             py::arg("difficulty"));

    py::class_<TrainerConfig>(m, "TrainerConfig")
        .def(py::init([](double learning_rate, int group_size, int batch_questions, int steps,
                         double clip_low, double clip_high, RewardMode mode,
                         std::uint64_t seed) {
                 TrainerConfig c{learning_rate, group_size, batch_questions, steps,
                                 clip_low,      clip_high,  mode,            seed};
                 c.validate();
                 return c;
             }),
             py::arg("learning_rate") = 0.4, py::arg("group_size") = 32,
             py::arg("batch_questions") = 0, py::arg("steps") = 300,
             py::arg("clip_low") = 0.20, py::arg("clip_high") = 0.28,
             py::arg("mode") = RewardMode::adaptive, py::arg("seed") = 1)
        .def_readwrite("learning_rate", &TrainerConfig::learning_rate)
        .def_readwrite("group_size", &TrainerConfig::group_size)
        .def_readwrite("batch_questions", &TrainerConfig::batch_questions)
        .def_readwrite("steps", &TrainerConfig::steps)
        .def_readwrite("clip_low", &TrainerConfig::clip_low)
        .def_readwrite("clip_high", &TrainerConfig::clip_high)
        .def_readwrite("mode", &TrainerConfig::mode)
        .def_readwrite("seed", &TrainerConfig::seed);

    py::class_<StepMetrics>(m, "StepMetrics")
        .def_readonly("step", &StepMetrics::step)
        .def_readonly("mean_entropy", &StepMetrics::mean_entropy)
        .def_readonly("mean_length", &StepMetrics::mean_length)
        .def_readonly("true_batch_pass_ratio", &StepMetrics::true_batch_pass_ratio)
        .def_readonly("smoothed_batch_pass_ratio", &StepMetrics::smoothed_batch_pass_ratio)
        .def_readonly("mean_length_easy", &StepMetrics::mean_length_easy)
        .def_readonly("mean_length_hard", &StepMetrics::mean_length_hard);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("metrics", &SimResult::metrics)
        .def_readonly("policy", &SimResult::policy)
        .def_readonly("tracker", &SimResult::tracker);

    m.def("rollout_step", &rollout_step, py::arg("policy"), py::arg("questions"),
          py::arg("env"), py::arg("group_size"), py::arg("seed"), py::arg("step"));
    m.def("group_advantages", &group_advantages, py::arg("rewards"));
    m.def("policy_gradient", &policy_gradient, py::arg("policy"), py::arg("batch"),
          py::arg("rewards"), py::arg("config"));
    m.def("grpo_update", &grpo_update, py::arg("policy"), py::arg("batch"), py::arg("rewards"),
          py::arg("config"));
    m.def("run_training", &run_training, py::arg("bank"), py::arg("env"), py::arg("trainer"),
          py::arg("reward") = RewardConfig{}, py::arg("tracker") = EmaTracker{},
          py::arg("ema_update_before_scoring") = true, py::arg("shape") = PolicyShape{});
    m.def("make_two_level_bank", &make_two_level_bank, py::arg("size"),
          py::arg("d_easy") = 0.0, py::arg("d_hard") = 1.0);
    m.def("make_uniform_bank", &make_uniform_bank, py::arg("size"), py::arg("seed"));
    m.def("metrics_csv", &metrics_csv, py::arg("metrics"));
    m.def("policy_snapshot", &policy_snapshot, py::arg("policy"));

    // ---- wire ----
    m.def("parse_record_line", &parse_record_line, py::arg("line"), py::arg("line_no") = 1);
    m.def("record_to_json_line", &record_to_json_line, py::arg("record"));
    m.def("ema_state_to_string", &ema_state_to_string, py::arg("tracker"));
    m.def("parse_ema_state", &parse_ema_state, py::arg("text"));
}
