#ifndef SING_TASK_MODEL_H
#define SING_TASK_MODEL_H

#include "fact_set.h"
#include "strips_task.h"

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sing {
// Full state: the set of facts that hold.
using State = FactSet;

/*
  Regression node: the facts that are required to hold. In the finite-domain
  view a variable is undefined when none of its facts is in the set; in
  pure-STRIPS mode every fact outside the set is undefined.
*/
using PartialState = FactSet;

enum class Layout {
    Boolean,
    Multivalued
};

const char *to_string(Layout layout);
Layout parse_layout(const std::string &name);

struct StateVector {
    std::vector<float> values;
    Layout layout = Layout::Boolean;
};

struct Plan {
    std::vector<int> actions;
};

struct PlanValidation {
    bool valid = false;
    // first step that failed, or plan length when only the goal test failed
    int failed_step = -1;
    State end_state;
};

class InapplicableAction : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedEncoding : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

State initial_state(const StripsTask &task);
bool is_goal(const StripsTask &task, const State &state);
bool is_applicable(const State &state, const Action &action);

// s ∪ add \ del; throws InapplicableAction unless pre ⊆ s.
State apply_action(const State &state, const Action &action);

// Unchecked variant for hot loops; writes into `out`.
void apply_unchecked(const State &state, const Action &action, State &out);

std::vector<std::pair<int, State>> successors(
    const State &state, std::span<const Action> actions);

PlanValidation validate_plan(const StripsTask &task, const Plan &plan);

/*
  Boolean: one entry per fact. Multivalued: one entry per variable holding
  the value index; needs the variable map and a fully defined state.
*/
StateVector encode_state(const FactSet &state, Layout layout,
                         const StripsTask &task);
void encode_state_into(const FactSet &state, Layout layout,
                       const StripsTask &task, std::span<float> out);
int encoded_length(const StripsTask &task, Layout layout);

// Inverse of the boolean encoding for full states.
State decode_boolean(const StateVector &vector);

/*
  Applicable-action lookup that avoids scanning every action: each action
  is filed under its first precondition fact. Results are in ascending
  action-index order.
*/
class SuccessorGenerator {
    std::span<const Action> actions;
    std::vector<std::vector<int>> by_first_pre;
    std::vector<int> unconditional;

public:
    SuccessorGenerator(std::span<const Action> actions, int num_facts);
    void applicable(const State &state, std::vector<int> &out) const;
};

// "(name arg1 arg2)" per line.
std::string format_plan(const StripsTask &task, const Plan &plan);
Plan parse_plan(const StripsTask &task, const std::string &text);
}

#endif
