#pragma once

#include <string>
#include <string_view>

#include "lenreward/errors.hpp"

namespace lenreward {

/// A predicted answer paired with the ground truth it is checked against.
struct VerificationTask {
    std::string predicted;
    std::string reference;
};

/// Canonical comparison form of an answer string: trims, unwraps enclosing
/// $...$ / \boxed{...} layers until none remain, collapses internal
/// whitespace runs to a single space, lowercases. Idempotent.
std::string canonicalize(std::string_view s);

/// Rule-based verifier. True iff both sides agree after canonicalization;
/// when both canonical forms parse as exact rationals (integer, a/b fraction
/// or finite decimal) they are compared as rationals, otherwise byte-wise.
/// Throws MalformedTaskError when either side trims to empty.
bool verify(const VerificationTask& task);

/// Binary outcome reward: +1 for a correct answer, -1 otherwise.
double outcome_reward(bool correct);

}  // namespace lenreward
