#include "lenreward/eval.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_util.hpp"

using lenreward::BinAggregation;
using lenreward::BinOptions;
using lenreward::BinReport;
using lenreward::DomainError;
using lenreward::PassKInput;
using lenreward::RolloutRecord;

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long result = 1;
    for (int i = 0; i < k; ++i) {
        result = result * (n - i) / (i + 1);
    }
    return result;
}

// Exhaustive oracle: count k-subsets of n samples (first c correct) that
// contain at least one correct sample.
long long subsets_with_correct(int n, int c, int k) {
    long long hit = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        if ((mask & ((1u << c) - 1u)) != 0) ++hit;
    }
    return hit;
}

RolloutRecord record(const std::string& qid, std::int64_t id, std::int64_t length,
                     bool correct) {
    return {qid, id, length, correct, 0};
}

}  // namespace

TEST_CASE("pass@k saturation and domain") {
    CHECK(lenreward::pass_at_k({16, 16, 4}) == 1.0);
    CHECK(lenreward::pass_at_k({16, 0, 4}) == 0.0);
    CHECK_THROWS_AS((void)lenreward::pass_at_k({4, 2, 5}), DomainError);
    CHECK_THROWS_AS((void)lenreward::pass_at_k({4, 5, 2}), DomainError);
    CHECK_THROWS_AS((void)lenreward::pass_at_k({4, 2, 0}), DomainError);
}

TEST_CASE("pass@k equals the exhaustive subset count") {
    // n=4, c=2, k=2: 5 of the 6 two-subsets contain a correct sample
    CHECK(subsets_with_correct(4, 2, 2) == 5);
    CHECK(lenreward::pass_at_k({4, 2, 2}) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));

    for (int n = 1; n <= 10; ++n) {
        for (int c = 0; c <= n; ++c) {
            for (int k = 1; k <= n; ++k) {
                const long long total = binomial(n, k);
                const long long hit = subsets_with_correct(n, c, k);
                const double oracle =
                    static_cast<double>(hit) / static_cast<double>(total);
                CHECK(lenreward::pass_at_k({n, c, k}) ==
                      doctest::Approx(oracle).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("pass@k agrees with Monte-Carlo sampling") {
    std::mt19937_64 rng(30);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = static_cast<int>(testutil::uniform_int(rng, 1, 16));
        const int c = static_cast<int>(testutil::uniform_int(rng, 0, n));
        const int k = static_cast<int>(testutil::uniform_int(rng, 1, n));
        int idx[16];
        long long hit = 0;
        const int draws = 20000;
        for (int draw = 0; draw < draws; ++draw) {
            for (int i = 0; i < n; ++i) idx[i] = i;
            for (int i = 0; i < k; ++i) {
                const int pick = i + static_cast<int>(rng() % static_cast<unsigned>(n - i));
                std::swap(idx[i], idx[pick]);
                if (idx[i] < c) {
                    ++hit;
                    break;
                }
            }
        }
        const double mc = static_cast<double>(hit) / draws;
        CHECK(std::abs(lenreward::pass_at_k({n, c, k}) - mc) <= 0.02);
    }
}

TEST_CASE("pass@k is monotone in k and in c") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const int n = static_cast<int>(testutil::uniform_int(rng, 2, 16));
        const int c = static_cast<int>(testutil::uniform_int(rng, 0, n));
        const int k = static_cast<int>(testutil::uniform_int(rng, 1, n - 1));
        CHECK(lenreward::pass_at_k({n, c, k + 1}) >= lenreward::pass_at_k({n, c, k}));
        if (c < n) {
            CHECK(lenreward::pass_at_k({n, c + 1, k}) >= lenreward::pass_at_k({n, c, k}));
        }
    }
}

TEST_CASE("bins: all-correct input saturates pass@1") {
    std::vector<RolloutRecord> records;
    std::mt19937_64 rng(32);
    for (int q = 0; q < 4; ++q) {
        for (int j = 0; j < 32; ++j) {
            records.push_back(record("q" + std::to_string(q), j + 1,
                                     testutil::uniform_int(rng, 10, 900), true));
        }
    }
    BinOptions options;
    options.k_list = {1};
    for (const BinReport& r : lenreward::bin_by_length(records, options)) {
        CHECK(r.pass_at.at(1) == 1.0);
    }
}

TEST_CASE("bins: single question, 16 records, 16 singleton bins") {
    std::vector<RolloutRecord> records;
    for (int j = 0; j < 16; ++j) {
        records.push_back(record("q", j + 1, 10 * (j + 1), j % 2 == 0));
    }
    BinOptions options;
    options.k_list = {1};
    const auto reports = lenreward::bin_by_length(records, options);
    REQUIRE(reports.size() == 16);
    for (int b = 0; b < 16; ++b) {
        CHECK(reports[b].sample_count == 1);
        CHECK(reports[b].mean_length == 10.0 * (b + 1));
        CHECK(reports[b].pass_at.at(1) == (b % 2 == 0 ? 1.0 : 0.0));
    }
}

TEST_CASE("bins: macro pass@32 trend rises with z on a monotone corpus") {
    std::mt19937_64 rng(33);
    std::vector<RolloutRecord> records;
    for (int q = 0; q < 4; ++q) {
        const double mu = testutil::uniform(rng, 300.0, 900.0);
        const double sigma = testutil::uniform(rng, 40.0, 120.0);
        std::vector<double> lengths;
        for (int j = 0; j < 2048; ++j) {
            double g = 0.0;  // Irwin-Hall(12) approximate normal, portable
            for (int t = 0; t < 12; ++t) g += testutil::uniform01(rng);
            lengths.push_back(std::max(1.0, mu + sigma * (g - 6.0)));
        }
        double mean = 0.0;
        for (double l : lengths) mean += l;
        mean /= static_cast<double>(lengths.size());
        double var = 0.0;
        for (double l : lengths) var += (l - mean) * (l - mean);
        const double std_dev = std::sqrt(var / static_cast<double>(lengths.size()));
        for (int j = 0; j < 2048; ++j) {
            const double z = (lengths[j] - mean) / (std_dev + 1e-6);
            const double p = 0.03 + 0.4 / (1.0 + std::exp(-1.5 * z));
            records.push_back(record("q" + std::to_string(q), j + 1,
                                     static_cast<std::int64_t>(lengths[j]),
                                     testutil::uniform01(rng) < p));
        }
    }
    BinOptions options;
    options.k_list = {1, 32};
    options.aggregation = BinAggregation::macro;
    const auto reports = lenreward::bin_by_length(records, options);
    REQUIRE(reports.size() == 16);
    std::vector<double> bin_index, pass32;
    for (const BinReport& r : reports) {
        REQUIRE(std::isfinite(r.pass_at.at(32)));  // every question has >= 32 samples per bin
        bin_index.push_back(r.bin_index);
        pass32.push_back(r.pass_at.at(32));
    }
    CHECK(testutil::spearman(bin_index, pass32) > 0.8);
}

TEST_CASE("bins are permutation invariant and counts sum to the total") {
    std::mt19937_64 rng(34);
    std::vector<RolloutRecord> records;
    for (int q = 0; q < 6; ++q) {
        for (int j = 0; j < 37; ++j) {
            records.push_back(record("q" + std::to_string(q), j + 1,
                                     testutil::uniform_int(rng, 0, 5000),
                                     testutil::uniform01(rng) < 0.4));
        }
    }
    BinOptions options;
    options.bins = 7;
    options.k_list = {1, 4};
    const auto base = lenreward::bin_by_length(records, options);

    std::vector<RolloutRecord> shuffled = records;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[rng() % (i + 1)]);
    }
    const auto moved = lenreward::bin_by_length(shuffled, options);

    REQUIRE(base.size() == moved.size());
    std::int64_t total = 0;
    for (std::size_t b = 0; b < base.size(); ++b) {
        CHECK(base[b].sample_count == moved[b].sample_count);
        CHECK(base[b].mean_length == moved[b].mean_length);
        for (int k : options.k_list) {
            const double lhs = base[b].pass_at.at(k);
            const double rhs = moved[b].pass_at.at(k);
            CHECK((std::isnan(lhs) ? std::isnan(rhs) : lhs == rhs));
        }
        total += base[b].sample_count;
    }
    CHECK(total == static_cast<std::int64_t>(records.size()));
    // counts differ by at most one across bins
    std::int64_t lo = records.size(), hi = 0;
    for (const auto& r : base) {
        lo = std::min(lo, r.sample_count);
        hi = std::max(hi, r.sample_count);
    }
    CHECK(hi - lo <= 1);
}

TEST_CASE("bin report CSV shape") {
    std::vector<RolloutRecord> records;
    for (int j = 0; j < 8; ++j) records.push_back(record("q", j + 1, 100 + j, j % 2 == 0));
    BinOptions options;
    options.bins = 2;
    options.k_list = {1, 2};
    const auto reports = lenreward::bin_by_length(records, options);
    const std::string csv = lenreward::bin_report_csv(reports, options.k_list);
    CHECK(csv.rfind("bin_index,mean_length,sample_count,pass@1,pass@2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find(',') != std::string::npos);
    CHECK(csv.find(';') == std::string::npos);
}

TEST_CASE("bins reject empty input") {
    CHECK_THROWS_AS((void)lenreward::bin_by_length({}, BinOptions{}),
                    lenreward::DegenerateInputError);
}
