#ifndef SING_STRIPS_TASK_H
#define SING_STRIPS_TASK_H

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sing {
enum class Direction {
    Forward,
    DerivedInverse
};

struct Action {
    std::string name;
    std::vector<int> pre;
    std::vector<int> add;
    std::vector<int> del;
    Direction direction = Direction::Forward;

    // Sorts and deduplicates pre/add/del and removes add facts from del.
    void normalize();
};

/*
  Finite-domain view of a STRIPS task: every variable owns a group of facts,
  exactly one of which holds in any full state. Only present when the task
  was built from a SAS+ source.
*/
struct VariableMap {
    std::vector<std::string> names;
    // value_facts[var][value] = fact index
    std::vector<std::vector<int>> value_facts;
    std::vector<int> fact_var;
    std::vector<int> fact_value;

    int num_variables() const {
        return static_cast<int>(value_facts.size());
    }
    int domain_size(int var) const {
        return static_cast<int>(value_facts[var].size());
    }
};

struct StripsTask {
    std::vector<std::string> fact_names;
    std::vector<Action> actions;
    std::vector<int> init;
    std::vector<int> goal;
    std::optional<VariableMap> variables;

    int num_facts() const {
        return static_cast<int>(fact_names.size());
    }
    int num_actions() const {
        return static_cast<int>(actions.size());
    }

    // Hash over fact names and the variable structure; identifies the
    // search space independently of init and goal.
    std::uint64_t fingerprint() const;

    // Throws TaskError if an index is out of range or add and del overlap.
    void check_invariants() const;
};

class TaskError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
}

#endif
