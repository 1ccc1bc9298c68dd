#include "lenreward/types.hpp"

#include <unordered_set>

namespace lenreward {

void validate_group(const QuestionGroup& group) {
    if (group.rollouts.empty()) {
        throw DegenerateInputError("group '" + group.question_id + "' has no rollouts");
    }
    std::unordered_set<std::int64_t> seen;
    seen.reserve(group.rollouts.size());
    const std::int64_t step = group.rollouts.front().step;
    for (const RolloutRecord& r : group.rollouts) {
        if (r.question_id != group.question_id) {
            throw DomainError("group '" + group.question_id + "' contains rollout for '" +
                              r.question_id + "'");
        }
        if (r.step != step) {
            throw DomainError("group '" + group.question_id + "' mixes steps " +
                              std::to_string(step) + " and " + std::to_string(r.step));
        }
        if (r.length < 0) {
            throw DomainError("group '" + group.question_id + "' rollout " +
                              std::to_string(r.rollout_id) + " has negative length");
        }
        if (!seen.insert(r.rollout_id).second) {
            throw DomainError("group '" + group.question_id + "' repeats rollout_id " +
                              std::to_string(r.rollout_id));
        }
    }
}

void validate_batch(const Batch& batch) {
    if (batch.groups.empty()) {
        throw DegenerateInputError("batch at step " + std::to_string(batch.step) +
                                   " has no groups");
    }
    std::unordered_set<std::string> questions;
    questions.reserve(batch.groups.size());
    for (const QuestionGroup& group : batch.groups) {
        validate_group(group);
        if (group.rollouts.front().step != batch.step) {
            throw DomainError("group '" + group.question_id + "' is at step " +
                              std::to_string(group.rollouts.front().step) +
                              ", batch is at step " + std::to_string(batch.step));
        }
        if (!questions.insert(group.question_id).second) {
            throw DomainError("batch at step " + std::to_string(batch.step) +
                              " repeats question '" + group.question_id + "'");
        }
    }
}

}  // namespace lenreward
