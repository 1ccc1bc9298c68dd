#include "lenreward/verify.hpp"

#include <doctest.h>

#include <random>
#include <vector>

#include "test_util.hpp"

using lenreward::canonicalize;
using lenreward::MalformedTaskError;
using lenreward::outcome_reward;
using lenreward::verify;

TEST_CASE("verify strips one boxed wrapper") {
    CHECK(verify({"\\boxed{42}", "42"}));
    CHECK(verify({"$\\boxed{42}$", "42"}));
    CHECK(verify({"  \\boxed{ 42 }  ", "42"}));
    CHECK_FALSE(verify({"\\boxed{1}+\\boxed{2}", "3"}));  // not an enclosing wrapper
}

TEST_CASE("verify compares exact rationals") {
    // oracle: 0.5 = 5/10 and 1/2 cross-multiply to 5*2 = 10*1
    CHECK(5 * 2 == 10 * 1);
    CHECK(verify({"0.5", "1/2"}));
    CHECK(verify({"0.50", "1/2"}));
    CHECK(verify({"+0.5", "2/4"}));
    CHECK(verify({"007", "7"}));
    CHECK(verify({"-3/6", "-0.5"}));
    CHECK(verify({"1 / 2", "0.5"}));
    CHECK_FALSE(verify({"43", "42"}));
    CHECK_FALSE(verify({"0.333", "1/3"}));
    // 20-digit decimals stay exact
    CHECK(verify({"0.33333333333333333333",
                  "33333333333333333333/100000000000000000000"}));
    CHECK_FALSE(verify({"0.33333333333333333333",
                        "33333333333333333334/100000000000000000000"}));
}

TEST_CASE("verify falls back to canonical string comparison") {
    CHECK(verify({"x", "x"}));
    CHECK(verify({"Sqrt(2)", "sqrt(2)"}));
    CHECK(verify({"a  b", "a b"}));
    CHECK(verify({"1/0", "1/0"}));  // zero denominator is not a rational
    CHECK_FALSE(verify({"1/0", "2/0"}));
    CHECK_FALSE(verify({"1/2 m", "0.5 m"}));  // units force the string path
}

TEST_CASE("verify rejects empty sides as malformed, not incorrect") {
    CHECK_THROWS_AS((void)verify({"", "42"}), MalformedTaskError);
    CHECK_THROWS_AS((void)verify({"42", "   "}), MalformedTaskError);
}

TEST_CASE("canonicalize is idempotent") {
    const std::vector<std::string> inputs = {
        "42", "  42  ", "\\boxed{42}", "\\boxed{\\boxed{42}}", "$\\boxed{ 1/2 }$",
        "$$x$$", "a  B\tc", "\\BOXED{42}", "$", "$$", "\\boxed{", "{42}", "1 / 2",
    };
    for (const std::string& s : inputs) {
        const std::string once = canonicalize(s);
        CHECK(canonicalize(once) == once);
    }
    CHECK(canonicalize("\\boxed{\\boxed{42}}") == "42");
    CHECK(canonicalize("\\BOXED{42}") == "42");

    std::mt19937_64 rng(20240811);
    const std::string alphabet = "ab 01./$\\{}boxed+-";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        const int len = static_cast<int>(testutil::uniform_int(rng, 0, 24));
        for (int j = 0; j < len; ++j) {
            s.push_back(alphabet[rng() % alphabet.size()]);
        }
        const std::string once = canonicalize(s);
        CHECK(canonicalize(once) == once);
    }
}

TEST_CASE("verify is symmetric under canonicalization") {
    const std::vector<std::string> pool = {"42",     "0.5",  "1/2",        "\\boxed{42}",
                                           "2/4",    "x y",  "$0.25$",     "sqrt(2)",
                                           "-1/3",   "007",  "0.1428571",  "a"};
    for (const std::string& a : pool) {
        for (const std::string& b : pool) {
            CHECK(verify({a, b}) == verify({b, a}));
        }
    }
}

TEST_CASE("outcome reward is exactly +-1") {
    CHECK(outcome_reward(true) == 1.0);
    CHECK(outcome_reward(false) == -1.0);
    CHECK(outcome_reward(verify({"x", "x"})) == 1.0);
}
