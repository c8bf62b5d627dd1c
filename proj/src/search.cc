#include "sing/search.h"

#include <algorithm>
#include <queue>
#include <unordered_map>

using namespace std;

namespace sing {
const char *to_string(HeuristicKind kind) {
    switch (kind) {
    case HeuristicKind::Nn:
        return "nn";
    case HeuristicKind::Blind:
        return "blind";
    case HeuristicKind::GoalCount:
        return "gc";
    case HeuristicKind::Ff:
        return "ff";
    }
    return "?";
}

HeuristicKind parse_heuristic_kind(const string &name) {
    if (name == "nn")
        return HeuristicKind::Nn;
    if (name == "blind")
        return HeuristicKind::Blind;
    if (name == "gc" || name == "goal-count")
        return HeuristicKind::GoalCount;
    if (name == "ff")
        return HeuristicKind::Ff;
    throw invalid_argument("unknown heuristic '" + name + "'");
}

const char *to_string(SearchStatus status) {
    switch (status) {
    case SearchStatus::Solved:
        return "solved";
    case SearchStatus::Unsolvable:
        return "unsolvable";
    case SearchStatus::OutOfBudget:
        return "out-of-budget";
    }
    return "?";
}

int h_goalcount(const StripsTask &task, const State &state) {
    int missing = 0;
    for (int g : task.goal)
        if (!state.test(g))
            ++missing;
    return missing;
}

FfHeuristic::FfHeuristic(const StripsTask &task)
    : task(task),
      pre_of_fact(task.num_facts()),
      achievers(task.num_facts()),
      fact_layer(task.num_facts()),
      action_layer(task.num_actions()),
      unsatisfied(task.num_actions()),
      marked_true(task.num_facts()),
      selected(task.num_actions()) {
    for (int a = 0; a < task.num_actions(); ++a) {
        for (int p : task.actions[a].pre)
            pre_of_fact[p].push_back(a);
        for (int f : task.actions[a].add)
            achievers[f].push_back(a);
    }
}

double FfHeuristic::operator()(const State &state) {
    constexpr int UNREACHED = numeric_limits<int>::max();
    const int num_facts = task.num_facts();
    const int num_actions = task.num_actions();
    fill(fact_layer.begin(), fact_layer.end(), UNREACHED);
    fill(action_layer.begin(), action_layer.end(), UNREACHED);

    // layered reachability: layer k holds facts first reached after k steps
    vector<int> frontier;
    for (int f = 0; f < num_facts; ++f)
        if (state.test(f)) {
            fact_layer[f] = 0;
            frontier.push_back(f);
        }
    vector<int> ready;
    for (int a = 0; a < num_actions; ++a) {
        unsatisfied[a] = static_cast<int>(task.actions[a].pre.size());
        if (unsatisfied[a] == 0)
            ready.push_back(a);
    }
    for (int f : frontier)
        for (int a : pre_of_fact[f])
            if (--unsatisfied[a] == 0)
                ready.push_back(a);

    int layer = 0;
    while (!ready.empty()) {
        vector<int> next_facts;
        for (int a : ready) {
            action_layer[a] = layer;
            for (int f : task.actions[a].add)
                if (fact_layer[f] == UNREACHED) {
                    fact_layer[f] = layer + 1;
                    next_facts.push_back(f);
                }
        }
        ready.clear();
        for (int f : next_facts)
            for (int a : pre_of_fact[f])
                if (--unsatisfied[a] == 0)
                    ready.push_back(a);
        ++layer;
    }

    int max_goal_layer = 0;
    for (int g : task.goal) {
        if (fact_layer[g] == UNREACHED)
            return INFINITE_H;
        max_goal_layer = max(max_goal_layer, fact_layer[g]);
    }
    if (max_goal_layer == 0)
        return 0;

    // goals[k]: open subgoals first reached at layer k
    vector<vector<int>> goals(max_goal_layer + 1);
    // lowest layer of a chosen action adding the fact; a subgoal first
    // reached at layer k is covered iff this is < k
    fill(marked_true.begin(), marked_true.end(), UNREACHED);
    fill(selected.begin(), selected.end(), 0);
    vector<char> queued(num_facts, 0);
    for (int g : task.goal)
        if (fact_layer[g] > 0 && !queued[g]) {
            queued[g] = 1;
            goals[fact_layer[g]].push_back(g);
        }
    int count = 0;
    for (int k = max_goal_layer; k > 0; --k) {
        for (int g : goals[k]) {
            if (marked_true[g] < k)
                continue;
            int chosen = -1;
            for (int a : achievers[g])
                if (action_layer[a] == k - 1) {
                    chosen = a;
                    break;
                }
            if (!selected[chosen]) {
                selected[chosen] = 1;
                ++count;
            }
            for (int f : task.actions[chosen].add)
                marked_true[f] = min(marked_true[f], k - 1);
            for (int p : task.actions[chosen].pre)
                if (fact_layer[p] > 0 && !queued[p]) {
                    queued[p] = 1;
                    goals[fact_layer[p]].push_back(p);
                }
        }
    }
    return count;
}

double h_ff(const StripsTask &task, const State &state) {
    FfHeuristic h(task);
    return h(state);
}

static void check_model(const StripsTask &task, const nn::MlpModel &model) {
    if (model.fingerprint && *model.fingerprint != task.fingerprint())
        throw FingerprintMismatch(
            "model was trained on a different search space");
    if (model.input_dim != encoded_length(task, model.layout))
        throw FingerprintMismatch(
            "model input width " + std::to_string(model.input_dim) +
            " does not match the task encoding width " +
            std::to_string(encoded_length(task, model.layout)));
}

NnHeuristic::NnHeuristic(const StripsTask &task, const nn::MlpModel &model)
    : task(task), model(model), buffer(model.input_dim) {
    check_model(task, model);
}

double NnHeuristic::operator()(const State &state) {
    encode_state_into(state, model.layout, task, buffer);
    return max(0.0, nn::forward(model, buffer, workspace));
}

double h_nn_eval(const nn::MlpModel &model, Layout layout,
                 const StripsTask &task, const State &state) {
    if (layout != model.layout)
        throw FingerprintMismatch("model layout differs from requested one");
    NnHeuristic h(task, model);
    return h(state);
}

Heuristic::Heuristic(HeuristicKind kind, const StripsTask &task,
                     const nn::MlpModel *model)
    : kind_(kind), task(task) {
    if (kind == HeuristicKind::Ff)
        ff = make_unique<FfHeuristic>(task);
    if (kind == HeuristicKind::Nn) {
        if (!model)
            throw invalid_argument("the nn heuristic needs a model");
        nn = make_unique<NnHeuristic>(task, *model);
    }
}

double Heuristic::operator()(const State &state) {
    switch (kind_) {
    case HeuristicKind::Blind:
        return 0;
    case HeuristicKind::GoalCount:
        return h_goalcount(task, state);
    case HeuristicKind::Ff:
        return (*ff)(state);
    case HeuristicKind::Nn:
        return (*nn)(state);
    }
    return 0;
}

namespace {
struct NodeInfo {
    int parent = -1;
    int action = -1;
};

struct OpenEntry {
    double h;
    uint64_t order;
    int node;
    bool operator>(const OpenEntry &other) const {
        if (h != other.h)
            return h > other.h;
        return order > other.order;
    }
};

constexpr int BUDGET_CHECK_INTERVAL = 256;
}

SearchResult gbfs(const StripsTask &task, Heuristic &heuristic,
                  const Budget &budget) {
    Timer timer;
    Deadline deadline = Deadline::after(budget.time_limit);
    SearchResult result;

    vector<State> states;
    vector<NodeInfo> info;
    unordered_map<FactSet, int, FactSetHash> index;
    priority_queue<OpenEntry, vector<OpenEntry>, greater<OpenEntry>> open;
    uint64_t order = 0;
    const size_t state_bytes =
        sizeof(State) + ((task.num_facts() + 63) / 64) * sizeof(uint64_t);
    // rough per-node footprint: state copy in the node table and the hash
    // map, hash bucket, parent info, open entry
    const uint64_t node_bytes =
        2 * state_bytes + 4 * sizeof(void *) + sizeof(NodeInfo) +
        sizeof(OpenEntry);

    auto finish = [&](SearchStatus status) {
        result.status = status;
        result.wall_time = timer.seconds();
        result.peak_closed = states.size();
        return result;
    };

    State init = initial_state(task);
    double h0 = heuristic(init);
    ++result.evaluations;
    states.push_back(init);
    info.push_back({});
    index.emplace(init, 0);
    if (h0 != INFINITE_H)
        open.push({h0, order++, 0});
    result.peak_open = open.size();

    SuccessorGenerator generator(task.actions, task.num_facts());
    vector<int> applicable;
    State succ;
    uint64_t iterations = 0;
    while (!open.empty()) {
        if (++iterations % BUDGET_CHECK_INTERVAL == 0) {
            if (deadline.expired() ||
                states.size() * node_bytes > budget.memory_limit)
                return finish(SearchStatus::OutOfBudget);
        }
        OpenEntry top = open.top();
        open.pop();
        const int id = top.node;
        if (is_goal(task, states[id])) {
            Plan plan;
            for (int n = id; info[n].parent != -1; n = info[n].parent)
                plan.actions.push_back(info[n].action);
            reverse(plan.actions.begin(), plan.actions.end());
            result.plan = move(plan);
            return finish(SearchStatus::Solved);
        }
        if (budget.expansion_limit &&
            result.expansions >= *budget.expansion_limit)
            return finish(SearchStatus::OutOfBudget);
        ++result.expansions;
        generator.applicable(states[id], applicable);
        for (int a : applicable) {
            apply_unchecked(states[id], task.actions[a], succ);
            ++result.generated;
            auto [it, inserted] =
                index.try_emplace(succ, static_cast<int>(states.size()));
            if (!inserted)
                continue;
            states.push_back(succ);
            info.push_back({id, a});
            double h = heuristic(succ);
            ++result.evaluations;
            if (h != INFINITE_H)
                open.push({h, order++, it->second});
        }
        result.peak_open = max<uint64_t>(result.peak_open, open.size());
    }
    return finish(SearchStatus::Unsolvable);
}
}
