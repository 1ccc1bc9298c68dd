#include "lenreward/difficulty.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

using lenreward::Batch;
using lenreward::DegenerateInputError;
using lenreward::DomainError;
using lenreward::EmaTracker;
using lenreward::QuestionGroup;
using testutil::make_group;

namespace {

QuestionGroup group_with_correct(const std::string& qid, int size, int correct,
                                 std::int64_t step = 0) {
    std::vector<std::int64_t> lengths(size, 100);
    std::vector<bool> flags(size, false);
    for (int j = 0; j < correct; ++j) flags[j] = true;
    return make_group(qid, lengths, flags, step);
}

}  // namespace

TEST_CASE("group pass ratio counts correct rollouts") {
    CHECK(lenreward::group_pass_ratio(group_with_correct("q", 32, 32)) == 1.0);
    CHECK(lenreward::group_pass_ratio(group_with_correct("q", 32, 0)) == 0.0);
    CHECK(lenreward::group_pass_ratio(group_with_correct("q", 32, 8)) == 0.25);
    CHECK_THROWS_AS((void)lenreward::group_pass_ratio(QuestionGroup{"q", {}}),
                    DegenerateInputError);
}

TEST_CASE("batch pass ratio is the mean of group ratios") {
    Batch two;
    two.groups = {group_with_correct("a", 4, 4), group_with_correct("b", 4, 0)};
    CHECK(lenreward::batch_pass_ratio(two).batch == 0.5);

    Batch one;
    one.groups = {group_with_correct("a", 8, 3)};
    CHECK(lenreward::batch_pass_ratio(one).batch == lenreward::group_pass_ratio(one.groups[0]));

    Batch four;
    four.groups = {group_with_correct("a", 4, 1), group_with_correct("b", 4, 2),
                   group_with_correct("c", 4, 3), group_with_correct("d", 4, 4)};
    // oracle: (0.25 + 0.5 + 0.75 + 1.0) / 4
    CHECK(lenreward::batch_pass_ratio(four).batch == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(lenreward::batch_pass_ratio(four).per_question.at("b") == 0.5);

    CHECK_THROWS_AS((void)lenreward::batch_pass_ratio(Batch{}), DegenerateInputError);
}

TEST_CASE("ema update") {
    EmaTracker t;  // lambda 0.99, value 1.0
    const EmaTracker next = lenreward::update_ema(t, 0.5);
    CHECK(next.value == doctest::Approx(0.995).epsilon(1e-12));
    CHECK(next.steps_seen == 1);

    EmaTracker no_smoothing{0.0, 1.0, 0};
    CHECK(lenreward::update_ema(no_smoothing, 0.3).value == 0.3);

    CHECK_THROWS_AS((void)lenreward::update_ema(t, -0.1), DomainError);
    CHECK_THROWS_AS((void)lenreward::update_ema(t, 1.1), DomainError);
    EmaTracker bad_lambda{1.5, 1.0, 0};
    CHECK_THROWS_AS((void)lenreward::update_ema(bad_lambda, 0.5), DomainError);
}

TEST_CASE("ema matches the closed form under a constant input") {
    // value_t = p + (1-p) * lambda^t from init 1.0
    EmaTracker t;
    const double p = 0.5;
    for (int step = 1; step <= 10; ++step) t = lenreward::update_ema(t, p);
    const double oracle = p + (1.0 - p) * std::pow(0.99, 10);
    CHECK(t.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(t.value == doctest::Approx(0.9521910375).epsilon(1e-9));
    CHECK(t.steps_seen == 10);
}

TEST_CASE("ema is a contraction and monotone under one-sided input") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        EmaTracker t{testutil::uniform01(rng), testutil::uniform01(rng), 0};
        const double x = testutil::uniform01(rng);
        const EmaTracker next = lenreward::update_ema(t, x);
        CHECK(std::abs(next.value - x) <= t.lambda * std::abs(t.value - x) + 1e-15);
        CHECK(next.value >= 0.0);
        CHECK(next.value <= 1.0);
    }
    // inputs never above the current value keep the track non-increasing
    EmaTracker t;
    double previous = t.value;
    for (int i = 0; i < 200; ++i) {
        const double x = testutil::uniform01(rng) * previous;
        t = lenreward::update_ema(t, x);
        CHECK(t.value <= previous + 1e-15);
        previous = t.value;
    }
}

TEST_CASE("beta signal") {
    CHECK(lenreward::beta_signal(0.75, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(lenreward::beta_signal(0.2, 0.9) == doctest::Approx(-0.7).epsilon(1e-12));
    CHECK(lenreward::beta_signal(0.4, 0.4) == 0.0);
    CHECK_THROWS_AS((void)lenreward::beta_signal(1.2, 0.5), DomainError);

    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
        const double beta = lenreward::beta_signal(testutil::uniform01(rng),
                                                   testutil::uniform01(rng));
        CHECK(beta >= -1.0);
        CHECK(beta <= 1.0);
    }
}

TEST_CASE("beta has zero mean against the instantaneous batch ratio") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        Batch batch;
        const int n_groups = static_cast<int>(testutil::uniform_int(rng, 1, 24));
        const int size = static_cast<int>(testutil::uniform_int(rng, 2, 48));
        for (int g = 0; g < n_groups; ++g) {
            const int correct = static_cast<int>(testutil::uniform_int(rng, 0, size));
            batch.groups.push_back(group_with_correct("q" + std::to_string(g), size, correct));
        }
        const lenreward::PassRatios ratios = lenreward::batch_pass_ratio(batch);
        double mean_beta = 0.0;
        for (const auto& [qid, p_g] : ratios.per_question) {
            mean_beta += lenreward::beta_signal(p_g, ratios.batch);
        }
        mean_beta /= static_cast<double>(ratios.per_question.size());
        CHECK(std::abs(mean_beta) <= 1e-12);
    }
}
