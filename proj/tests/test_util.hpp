#pragma once

#include "lenreward/types.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline lenreward::QuestionGroup make_group(const std::string& qid,
                                           const std::vector<std::int64_t>& lengths,
                                           const std::vector<bool>& correct,
                                           std::int64_t step = 0) {
    lenreward::QuestionGroup group;
    group.question_id = qid;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        lenreward::RolloutRecord r;
        r.question_id = qid;
        r.rollout_id = static_cast<std::int64_t>(j) + 1;
        r.length = lengths[j];
        r.correct = j < correct.size() && correct[j];
        r.step = step;
        group.rollouts.push_back(std::move(r));
    }
    return group;
}

inline lenreward::QuestionGroup random_group(std::mt19937_64& rng, const std::string& qid,
                                             int size, std::int64_t max_length = 1000000,
                                             std::int64_t step = 0) {
    std::vector<std::int64_t> lengths;
    std::vector<bool> correct;
    for (int j = 0; j < size; ++j) {
        lengths.push_back(uniform_int(rng, 0, max_length));
        correct.push_back(uniform01(rng) < 0.5);
    }
    return make_group(qid, lengths, correct, step);
}

// Spearman rank correlation with average ranks on ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace testutil
