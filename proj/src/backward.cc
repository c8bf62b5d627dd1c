#include "sing/backward.h"

#include <algorithm>

using namespace std;

namespace sing {
const char *to_string(BackwardKind kind) {
    switch (kind) {
    case BackwardKind::ExplicitOriginal:
        return "explicit-original";
    case BackwardKind::ExplicitInverse:
        return "explicit-inverse";
    case BackwardKind::Regression:
        return "regression";
    }
    return "?";
}

BackwardKind parse_backward_kind(const string &name) {
    if (name == "explicit-original" || name == "eo")
        return BackwardKind::ExplicitOriginal;
    if (name == "explicit-inverse" || name == "ei")
        return BackwardKind::ExplicitInverse;
    if (name == "regression" || name == "r")
        return BackwardKind::Regression;
    throw invalid_argument("unknown backward space '" + name + "'");
}

Action derive_inverse(const Action &action) {
    Action inverse;
    inverse.name = action.name;
    inverse.direction = Direction::DerivedInverse;
    set_union(action.pre.begin(), action.pre.end(), action.add.begin(),
              action.add.end(), back_inserter(inverse.pre));
    inverse.pre.erase(remove_if(inverse.pre.begin(), inverse.pre.end(),
                                [&](int f) {
                                    return binary_search(action.del.begin(),
                                                         action.del.end(), f);
                                }),
                      inverse.pre.end());
    inverse.add = action.del;
    inverse.del = action.add;
    return inverse;
}

vector<Action> derive_inverse_operators(const StripsTask &task) {
    vector<Action> result;
    result.reserve(task.actions.size());
    for (const Action &a : task.actions)
        result.push_back(derive_inverse(a));
    return result;
}

static bool any_applicable(const State &s, span<const Action> actions) {
    for (const Action &a : actions)
        if (s.contains_all(a.pre))
            return true;
    return false;
}

State complete_goal_state(const StripsTask &task,
                          span<const Action> backward_actions, Rng &rng) {
    const int n = task.num_facts();
    for (int attempt = 0; attempt < GOAL_COMPLETION_ATTEMPTS; ++attempt) {
        State s(n, task.goal);
        if (task.variables) {
            const VariableMap &vars = *task.variables;
            vector<bool> assigned(vars.num_variables(), false);
            for (int f : task.goal)
                assigned[vars.fact_var[f]] = true;
            for (int v = 0; v < vars.num_variables(); ++v) {
                if (assigned[v])
                    continue;
                uniform_int_distribution<int> pick(0, vars.domain_size(v) - 1);
                s.set(vars.value_facts[v][pick(rng)]);
            }
        } else {
            bernoulli_distribution coin(0.5);
            for (int f = 0; f < n; ++f)
                if (!s.test(f) && coin(rng))
                    s.set(f);
        }
        if (any_applicable(s, backward_actions))
            return s;
    }
    throw GoalCompletionFailure(
        "no expandable goal state after " +
        std::to_string(GOAL_COMPLETION_ATTEMPTS) + " candidates");
}

bool is_regressable(const StripsTask &task, const PartialState &s,
                    const Action &a) {
    if (!s.contains_any(a.add) || s.contains_any(a.del))
        return false;
    if (!task.variables)
        return true;
    // the result must stay a partial assignment: a precondition value may
    // only meet a value of its variable that the action itself adds
    const VariableMap &vars = *task.variables;
    for (int p : a.pre) {
        if (s.test(p))
            continue;
        for (int f : vars.value_facts[vars.fact_var[p]]) {
            if (f != p && s.test(f) &&
                !binary_search(a.add.begin(), a.add.end(), f))
                return false;
        }
    }
    return true;
}

PartialState regress(const StripsTask &task, const PartialState &s,
                     const Action &a) {
    if (!is_regressable(task, s, a))
        throw InapplicableRegression("action " + a.name +
                                     " cannot be regressed through");
    PartialState result = s;
    for (int f : a.add)
        result.reset(f);
    for (int f : a.pre)
        result.set(f);
    return result;
}

PartialState regression_start(const StripsTask &task) {
    return PartialState(task.num_facts(), task.goal);
}

BackwardSpace::BackwardSpace(const StripsTask &task, BackwardKind kind)
    : task(task), kind_(kind) {
    if (kind == BackwardKind::ExplicitInverse)
        inverse_actions = derive_inverse_operators(task);
    if (kind == BackwardKind::Regression) {
        achievers.resize(task.num_facts());
        for (int i = 0; i < task.num_actions(); ++i)
            for (int f : task.actions[i].add)
                achievers[f].push_back(i);
    }
}

span<const Action> BackwardSpace::explicit_actions() const {
    if (kind_ == BackwardKind::ExplicitInverse)
        return inverse_actions;
    return task.actions;
}

FactSet BackwardSpace::start(Rng &rng) const {
    if (kind_ == BackwardKind::Regression)
        return regression_start(task);
    return complete_goal_state(task, explicit_actions(), rng);
}

void BackwardSpace::successors(const FactSet &node,
                               vector<FactSet> &out) const {
    out.clear();
    if (kind_ == BackwardKind::Regression) {
        vector<int> candidates;
        for (int f : node.indices())
            for (int a : achievers[f])
                candidates.push_back(a);
        sort(candidates.begin(), candidates.end());
        candidates.erase(unique(candidates.begin(), candidates.end()),
                         candidates.end());
        for (int a : candidates) {
            const Action &action = task.actions[a];
            if (!is_regressable(task, node, action))
                continue;
            PartialState next = node;
            for (int f : action.add)
                next.reset(f);
            for (int f : action.pre)
                next.set(f);
            out.push_back(move(next));
        }
    } else {
        for (const Action &action : explicit_actions()) {
            if (!node.contains_all(action.pre))
                continue;
            State next;
            apply_unchecked(node, action, next);
            out.push_back(move(next));
        }
    }
    sort(out.begin(), out.end());
    out.erase(unique(out.begin(), out.end()), out.end());
}
}
