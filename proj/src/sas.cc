#include "sing/sas.h"

#include <algorithm>
#include <charconv>
#include <cstdio>

using namespace std;

namespace sing {
SasFormatError::SasFormatError(const string &message, int line)
    : runtime_error("SAS file line " + to_string(line) + ": " + message) {
}

namespace {
class LineReader {
    string_view text;
    size_t pos = 0;
    int line_no = 0;

public:
    explicit LineReader(string_view text)
        : text(text) {
    }

    int line() const {
        return line_no;
    }

    [[noreturn]] void error(const string &message) const {
        throw SasFormatError(message, line_no);
    }

    string_view next_line() {
        if (pos >= text.size()) {
            ++line_no;
            error("unexpected end of file");
        }
        size_t end = text.find('\n', pos);
        if (end == string_view::npos)
            end = text.size();
        string_view result = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!result.empty() && result.back() == '\r')
            result.remove_suffix(1);
        return result;
    }

    void expect(string_view magic) {
        string_view got = next_line();
        if (got != magic)
            error("expected '" + string(magic) + "', got '" + string(got) +
                  "'");
    }

    vector<int> read_ints(size_t count) {
        string_view l = next_line();
        vector<int> values;
        size_t i = 0;
        while (i < l.size()) {
            while (i < l.size() && (l[i] == ' ' || l[i] == '\t'))
                ++i;
            if (i >= l.size())
                break;
            int v = 0;
            auto [ptr, ec] = from_chars(l.data() + i, l.data() + l.size(), v);
            if (ec != errc())
                error("expected integer in '" + string(l) + "'");
            i = ptr - l.data();
            values.push_back(v);
        }
        if (values.size() != count)
            error("expected " + to_string(count) + " integers, got '" +
                  string(l) + "'");
        return values;
    }

    int read_int() {
        return read_ints(1)[0];
    }

    int read_count(const string &what) {
        int n = read_int();
        if (n < 0)
            error("negative " + what);
        return n;
    }
};

void check_fact(LineReader &in, const SasTask &task, int var, int value,
                bool allow_any = false) {
    if (var < 0 || var >= static_cast<int>(task.variables.size()))
        in.error("variable index " + to_string(var) + " out of range");
    if (allow_any && value == ANY_VALUE)
        return;
    if (value < 0 || value >= task.variables[var].domain_size())
        in.error("value " + to_string(value) + " out of range for variable " +
                 to_string(var));
}
}

SasTask read_sas(string_view text) {
    LineReader in(text);
    SasTask task;

    in.expect("begin_version");
    int version = in.read_int();
    if (version != 3)
        in.error("unsupported version " + to_string(version) +
                 " (expected 3)");
    in.expect("end_version");

    in.expect("begin_metric");
    task.use_metric = in.read_int() != 0;
    in.expect("end_metric");

    int num_vars = in.read_count("variable count");
    for (int v = 0; v < num_vars; ++v) {
        in.expect("begin_variable");
        SasVariable var;
        var.name = string(in.next_line());
        int layer = in.read_int();
        if (layer != -1)
            in.error("derived variable '" + var.name +
                     "' (axioms are not supported)");
        int size = in.read_count("domain size");
        if (size < 1)
            in.error("empty domain for variable '" + var.name + "'");
        for (int i = 0; i < size; ++i)
            var.value_names.emplace_back(in.next_line());
        in.expect("end_variable");
        task.variables.push_back(move(var));
    }

    int num_mutexes = in.read_count("mutex group count");
    for (int m = 0; m < num_mutexes; ++m) {
        in.expect("begin_mutex_group");
        int n = in.read_count("mutex group size");
        vector<SasFact> group;
        for (int i = 0; i < n; ++i) {
            vector<int> f = in.read_ints(2);
            check_fact(in, task, f[0], f[1]);
            group.emplace_back(f[0], f[1]);
        }
        in.expect("end_mutex_group");
        task.mutex_groups.push_back(move(group));
    }

    in.expect("begin_state");
    for (int v = 0; v < num_vars; ++v) {
        int value = in.read_int();
        check_fact(in, task, v, value);
        task.init.push_back(value);
    }
    in.expect("end_state");

    in.expect("begin_goal");
    int num_goals = in.read_count("goal count");
    for (int i = 0; i < num_goals; ++i) {
        vector<int> f = in.read_ints(2);
        check_fact(in, task, f[0], f[1]);
        task.goal.emplace_back(f[0], f[1]);
    }
    in.expect("end_goal");

    int num_ops = in.read_count("operator count");
    for (int o = 0; o < num_ops; ++o) {
        in.expect("begin_operator");
        SasOperator op;
        op.name = string(in.next_line());
        int num_prevail = in.read_count("prevail count");
        for (int i = 0; i < num_prevail; ++i) {
            vector<int> f = in.read_ints(2);
            check_fact(in, task, f[0], f[1]);
            op.effects.push_back({f[0], f[1], f[1]});
        }
        int num_effects = in.read_count("effect count");
        for (int i = 0; i < num_effects; ++i) {
            string_view l = in.next_line();
            // "ncond [var val]* var pre post"; only unconditional effects
            if (l.empty() || l[0] != '0' || (l.size() > 1 && l[1] != ' '))
                in.error("conditional effects are not supported");
            int var = 0, pre = 0, post = 0;
            string rest(l.substr(1));
            if (sscanf(rest.c_str(), "%d %d %d", &var, &pre, &post) != 3)
                in.error("malformed effect line '" + string(l) + "'");
            check_fact(in, task, var, pre, true);
            check_fact(in, task, var, post);
            op.effects.push_back({var, pre, post});
        }
        int cost = in.read_int();
        if (task.use_metric && cost != 1)
            in.error("operator '" + op.name + "' has cost " +
                     to_string(cost) + " (only unit costs are supported)");
        in.expect("end_operator");
        task.operators.push_back(move(op));
    }

    int num_axioms = in.read_count("axiom count");
    if (num_axioms != 0)
        in.error("axioms are not supported");
    return task;
}

StripsTask sas_to_strips(const SasTask &sas) {
    StripsTask task;
    VariableMap vars;
    for (const SasVariable &var : sas.variables) {
        vars.names.push_back(var.name);
        vector<int> facts;
        for (int val = 0; val < var.domain_size(); ++val) {
            int f = task.num_facts();
            facts.push_back(f);
            vars.fact_var.push_back(static_cast<int>(vars.names.size()) - 1);
            vars.fact_value.push_back(val);
            task.fact_names.push_back(var.name + "=" + var.value_names[val]);
        }
        vars.value_facts.push_back(move(facts));
    }

    for (const SasOperator &op : sas.operators) {
        Action action;
        action.name = op.name;
        for (const SasEffect &e : op.effects) {
            const vector<int> &facts = vars.value_facts[e.var];
            if (e.pre != ANY_VALUE) {
                action.pre.push_back(facts[e.pre]);
                if (e.pre != e.post) {
                    action.add.push_back(facts[e.post]);
                    action.del.push_back(facts[e.pre]);
                }
            } else {
                action.add.push_back(facts[e.post]);
                for (int val = 0; val < static_cast<int>(facts.size()); ++val)
                    if (val != e.post)
                        action.del.push_back(facts[val]);
            }
        }
        action.normalize();
        task.actions.push_back(move(action));
    }

    for (size_t v = 0; v < sas.init.size(); ++v)
        task.init.push_back(vars.value_facts[v][sas.init[v]]);
    for (const auto &[var, val] : sas.goal)
        task.goal.push_back(vars.value_facts[var][val]);
    sort(task.goal.begin(), task.goal.end());
    task.variables = move(vars);
    return task;
}
}
