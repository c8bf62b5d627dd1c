#ifndef SING_SEARCH_H
#define SING_SEARCH_H

#include "nn.h"
#include "task_model.h"
#include "timer.h"

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sing {
constexpr double INFINITE_H = std::numeric_limits<double>::infinity();

enum class HeuristicKind {
    Nn,
    Blind,
    GoalCount,
    Ff
};

const char *to_string(HeuristicKind kind);
HeuristicKind parse_heuristic_kind(const std::string &name);

class FingerprintMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// |G \ state|
int h_goalcount(const StripsTask &task, const State &state);

/*
  FF heuristic: unit-cost relaxed planning graph to fixpoint, then a
  backward sweep choosing for each subgoal an achiever from the earliest
  layer (lowest action index on ties). Returns the number of distinct
  chosen actions, or INFINITE_H if some goal is relaxed-unreachable.
*/
class FfHeuristic {
    const StripsTask &task;
    std::vector<std::vector<int>> pre_of_fact;
    std::vector<std::vector<int>> achievers;
    std::vector<int> fact_layer;
    std::vector<int> action_layer;
    std::vector<int> unsatisfied;
    std::vector<int> marked_true;
    std::vector<char> selected;

public:
    explicit FfHeuristic(const StripsTask &task);
    double operator()(const State &state);
};

double h_ff(const StripsTask &task, const State &state);

/*
  Learned heuristic: encode, forward, clamp at 0. The model must have been
  trained on a task with the same fingerprint (when it carries one) and
  must match the task's encoding width.
*/
class NnHeuristic {
    const StripsTask &task;
    const nn::MlpModel &model;
    nn::Workspace workspace;
    std::vector<float> buffer;

public:
    NnHeuristic(const StripsTask &task, const nn::MlpModel &model);
    double operator()(const State &state);
};

double h_nn_eval(const nn::MlpModel &model, Layout layout,
                 const StripsTask &task, const State &state);

// Any of the four heuristics behind one call operator.
class Heuristic {
    HeuristicKind kind_;
    const StripsTask &task;
    std::unique_ptr<FfHeuristic> ff;
    std::unique_ptr<NnHeuristic> nn;

public:
    Heuristic(HeuristicKind kind, const StripsTask &task,
              const nn::MlpModel *model = nullptr);
    HeuristicKind kind() const {
        return kind_;
    }
    double operator()(const State &state);
};

struct Budget {
    double time_limit = 1800.0;
    std::uint64_t memory_limit = 8ull << 30;
    std::optional<std::uint64_t> expansion_limit;
};

enum class SearchStatus {
    Solved,
    Unsolvable,
    OutOfBudget
};

const char *to_string(SearchStatus status);

struct SearchResult {
    SearchStatus status = SearchStatus::OutOfBudget;
    std::optional<Plan> plan;
    std::uint64_t expansions = 0;
    std::uint64_t generated = 0;
    std::uint64_t evaluations = 0;
    double wall_time = 0.0;
    std::uint64_t peak_open = 0;
    std::uint64_t peak_closed = 0;
};

/*
  Eager greedy best-first search. Open list ordered by (h, insertion
  order); a state is stored on first generation and never reopened; states
  with infinite h are pruned. The goal test happens when a node is taken
  from the open list.
*/
SearchResult gbfs(const StripsTask &task, Heuristic &heuristic,
                  const Budget &budget);
}

#endif
