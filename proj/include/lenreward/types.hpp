#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lenreward/errors.hpp"

namespace lenreward {

/// One sampled response: which question it answers, how long it is, and
/// whether the verifier accepted it.
struct RolloutRecord {
    std::string question_id;
    std::int64_t rollout_id = 0;  // index within the group, unique per (question_id, step)
    std::int64_t length = 0;      // response length in tokens, >= 0
    bool correct = false;
    std::int64_t step = 0;        // training step the sample was drawn at
};

/// The group of rollouts sampled for a single question at one step.
struct QuestionGroup {
    std::string question_id;
    std::vector<RolloutRecord> rollouts;

    std::size_t size() const { return rollouts.size(); }
};

/// All groups sampled at one training step.
struct Batch {
    std::int64_t step = 0;
    std::vector<QuestionGroup> groups;
};

/// Checks the group invariants: at least one rollout, shared question_id and
/// step, unique rollout ids, non-negative lengths. Throws DomainError.
void validate_group(const QuestionGroup& group);

/// Checks batch invariants: at least one group, every group valid and sharing
/// the batch step. Throws DegenerateInputError / DomainError.
void validate_batch(const Batch& batch);

}  // namespace lenreward
