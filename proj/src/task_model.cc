#include "sing/task_model.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>
#include <unordered_map>

using namespace std;

namespace sing {
const char *to_string(Layout layout) {
    return layout == Layout::Boolean ? "boolean" : "sas";
}

Layout parse_layout(const string &name) {
    if (name == "boolean" || name == "bool" || name == "b")
        return Layout::Boolean;
    if (name == "sas" || name == "multivalued")
        return Layout::Multivalued;
    throw invalid_argument("unknown layout '" + name + "'");
}

State initial_state(const StripsTask &task) {
    return State(task.num_facts(), task.init);
}

bool is_goal(const StripsTask &task, const State &state) {
    return state.contains_all(task.goal);
}

bool is_applicable(const State &state, const Action &action) {
    return state.contains_all(action.pre);
}

void apply_unchecked(const State &state, const Action &action, State &out) {
    out = state;
    for (int f : action.del)
        out.reset(f);
    for (int f : action.add)
        out.set(f);
}

State apply_action(const State &state, const Action &action) {
    if (!is_applicable(state, action))
        throw InapplicableAction("action " + action.name +
                                 " is not applicable");
    State result;
    apply_unchecked(state, action, result);
    return result;
}

vector<pair<int, State>> successors(const State &state,
                                    span<const Action> actions) {
    vector<pair<int, State>> result;
    for (size_t i = 0; i < actions.size(); ++i) {
        if (!is_applicable(state, actions[i]))
            continue;
        State next;
        apply_unchecked(state, actions[i], next);
        result.emplace_back(static_cast<int>(i), move(next));
    }
    return result;
}

PlanValidation validate_plan(const StripsTask &task, const Plan &plan) {
    PlanValidation result;
    State state = initial_state(task);
    for (size_t step = 0; step < plan.actions.size(); ++step) {
        int a = plan.actions[step];
        if (a < 0 || a >= task.num_actions() ||
            !is_applicable(state, task.actions[a])) {
            result.failed_step = static_cast<int>(step);
            result.end_state = move(state);
            return result;
        }
        State next;
        apply_unchecked(state, task.actions[a], next);
        state = move(next);
    }
    result.valid = is_goal(task, state);
    if (!result.valid)
        result.failed_step = static_cast<int>(plan.actions.size());
    result.end_state = move(state);
    return result;
}

int encoded_length(const StripsTask &task, Layout layout) {
    if (layout == Layout::Boolean)
        return task.num_facts();
    if (!task.variables)
        throw UnsupportedEncoding(
            "multivalued layout needs a finite-domain (SAS+) task");
    return task.variables->num_variables();
}

void encode_state_into(const FactSet &state, Layout layout,
                       const StripsTask &task, span<float> out) {
    if (layout == Layout::Boolean) {
        fill(out.begin(), out.end(), 0.0f);
        for (int f : state.indices())
            out[f] = 1.0f;
        return;
    }
    if (!task.variables)
        throw UnsupportedEncoding(
            "multivalued layout needs a finite-domain (SAS+) task");
    const VariableMap &vars = *task.variables;
    fill(out.begin(), out.end(), -1.0f);
    for (int f : state.indices()) {
        int var = vars.fact_var[f];
        if (out[var] >= 0.0f)
            throw UnsupportedEncoding("variable " + vars.names[var] +
                                      " has more than one value");
        out[var] = static_cast<float>(vars.fact_value[f]);
    }
    for (size_t v = 0; v < out.size(); ++v)
        if (out[v] < 0.0f)
            throw UnsupportedEncoding(
                "undefined variable " + vars.names[v] +
                " has no value index in the multivalued layout");
}

StateVector encode_state(const FactSet &state, Layout layout,
                         const StripsTask &task) {
    StateVector vec;
    vec.layout = layout;
    vec.values.resize(encoded_length(task, layout));
    encode_state_into(state, layout, task, vec.values);
    return vec;
}

State decode_boolean(const StateVector &vec) {
    State s(static_cast<int>(vec.values.size()));
    for (size_t i = 0; i < vec.values.size(); ++i)
        if (vec.values[i] != 0.0f)
            s.set(static_cast<int>(i));
    return s;
}

SuccessorGenerator::SuccessorGenerator(span<const Action> actions,
                                       int num_facts)
    : actions(actions), by_first_pre(num_facts) {
    for (size_t i = 0; i < actions.size(); ++i) {
        if (actions[i].pre.empty())
            unconditional.push_back(static_cast<int>(i));
        else
            by_first_pre[actions[i].pre.front()].push_back(
                static_cast<int>(i));
    }
}

void SuccessorGenerator::applicable(const State &state,
                                    vector<int> &out) const {
    out.clear();
    out.insert(out.end(), unconditional.begin(), unconditional.end());
    const auto &words = state.raw_words();
    for (size_t w = 0; w < words.size(); ++w) {
        uint64_t bits = words[w];
        while (bits) {
            int f = static_cast<int>(w * 64 + countr_zero(bits));
            bits &= bits - 1;
            for (int a : by_first_pre[f])
                if (state.contains_all(actions[a].pre))
                    out.push_back(a);
        }
    }
    sort(out.begin(), out.end());
}

string format_plan(const StripsTask &task, const Plan &plan) {
    string out;
    for (int a : plan.actions)
        out += "(" + task.actions[a].name + ")\n";
    return out;
}

Plan parse_plan(const StripsTask &task, const string &text) {
    unordered_map<string, int> by_name;
    auto lower = [](string s) {
        transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
            return static_cast<char>(tolower(c));
        });
        return s;
    };
    for (int i = task.num_actions() - 1; i >= 0; --i)
        by_name[lower(task.actions[i].name)] = i;
    Plan plan;
    istringstream in(text);
    string line;
    while (getline(in, line)) {
        size_t semi = line.find(';');
        if (semi != string::npos)
            line.erase(semi);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == string::npos)
            continue;
        size_t e = line.find_last_not_of(" \t\r");
        string name = line.substr(b, e - b + 1);
        if (name.front() == '(' && name.back() == ')')
            name = name.substr(1, name.size() - 2);
        auto it = by_name.find(lower(name));
        if (it == by_name.end())
            throw invalid_argument("unknown action '" + name + "' in plan");
        plan.actions.push_back(it->second);
    }
    return plan;
}
}
