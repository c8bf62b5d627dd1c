#ifndef SING_BACKWARD_H
#define SING_BACKWARD_H

#include "task_model.h"

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sing {
using Rng = std::mt19937_64;

enum class BackwardKind {
    ExplicitOriginal,
    ExplicitInverse,
    Regression
};

const char *to_string(BackwardKind kind);
BackwardKind parse_backward_kind(const std::string &name);

class GoalCompletionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InapplicableRegression : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// pre' = (pre ∪ add) \ del, add' = del, del' = add; names are kept.
Action derive_inverse(const Action &action);
std::vector<Action> derive_inverse_operators(const StripsTask &task);

inline constexpr int GOAL_COMPLETION_ATTEMPTS = 100;

/*
  Random full state satisfying the goal. With a variable map each variable
  the goal leaves open gets a uniform value; otherwise each non-goal fact is
  included with probability 1/2. Candidates where none of the backward
  actions applies are redrawn, up to GOAL_COMPLETION_ATTEMPTS times.
*/
State complete_goal_state(const StripsTask &task,
                          std::span<const Action> backward_actions, Rng &rng);

bool is_regressable(const StripsTask &task, const PartialState &state,
                    const Action &action);
// (s \ add) ∪ pre; throws InapplicableRegression when not regressable.
PartialState regress(const StripsTask &task, const PartialState &state,
                     const Action &action);
PartialState regression_start(const StripsTask &task);

/*
  A backward search space: explicit kinds act on full states with either
  the task's own actions or their derived inverses; regression acts on
  partial states with the task's actions.
*/
class BackwardSpace {
    const StripsTask &task;
    BackwardKind kind_;
    std::vector<Action> inverse_actions;
    std::vector<std::vector<int>> achievers;

public:
    BackwardSpace(const StripsTask &task, BackwardKind kind);

    BackwardKind kind() const {
        return kind_;
    }
    const StripsTask &strips_task() const {
        return task;
    }
    // Actions applied forward during explicit backward search.
    std::span<const Action> explicit_actions() const;

    FactSet start(Rng &rng) const;

    /*
      Distinct successor nodes in ascending FactSet order; two actions
      reaching the same node contribute it once.
    */
    void successors(const FactSet &node, std::vector<FactSet> &out) const;
};
}

#endif
