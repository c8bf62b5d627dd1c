#include "sing/pddl.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

using namespace std;

namespace sing::pddl {
namespace {
using SubtypeTest = function<bool(const string &, const string &)>;

string atom_key(const string &predicate, const vector<string> &args) {
    string key = predicate;
    for (const string &a : args)
        key += " " + a;
    return key;
}

string display_name(const string &predicate, const vector<string> &args) {
    return "(" + atom_key(predicate, args) + ")";
}

class Grounder {
    const DomainAst &domain;
    const ProblemAst &problem;
    const GroundingOptions &options;
    const map<string, string> &object_types;
    SubtypeTest is_subtype;

    vector<string> object_names;
    unordered_map<string, int> object_ids;
    map<string, vector<int>> objects_of_type;
    set<string> static_predicates;
    unordered_set<string> init_atoms;

    unordered_map<string, int> fact_ids;
    StripsTask task;

    const vector<int> &objects_of(const string &type) {
        auto it = objects_of_type.find(type);
        if (it != objects_of_type.end())
            return it->second;
        vector<int> objs;
        for (size_t i = 0; i < object_names.size(); ++i)
            if (is_subtype(object_types.at(object_names[i]), type))
                objs.push_back(static_cast<int>(i));
        return objects_of_type.emplace(type, move(objs)).first->second;
    }

    void collect_objects() {
        // constants first, then problem objects, both in declaration order
        auto add = [this](const string &name) {
            if (object_ids.emplace(name, object_names.size()).second)
                object_names.push_back(name);
        };
        for (const TypedName &c : domain.constants)
            add(c.name);
        for (const TypedName &o : problem.objects)
            add(o.name);
    }

    void collect_static_predicates() {
        if (!options.compile_static_predicates)
            return;
        set<string> changed;
        for (const ActionSchema &a : domain.actions) {
            for (const Atom &e : a.add_effects)
                changed.insert(e.predicate);
            for (const Atom &e : a.del_effects)
                changed.insert(e.predicate);
        }
        for (const PredicateDecl &p : domain.predicates)
            if (!changed.count(p.name))
                static_predicates.insert(p.name);
    }

    void enumerate_facts() {
        for (const PredicateDecl &p : domain.predicates) {
            if (static_predicates.count(p.name))
                continue;
            vector<const vector<int> *> domains;
            for (const TypedName &param : p.params)
                domains.push_back(&objects_of(param.type));
            vector<string> args(p.params.size());
            function<void(size_t)> rec = [&](size_t depth) {
                if (depth == args.size()) {
                    add_fact(p.name, args);
                    return;
                }
                for (int obj : *domains[depth]) {
                    args[depth] = object_names[obj];
                    rec(depth + 1);
                }
            };
            rec(0);
        }
    }

    int add_fact(const string &predicate, const vector<string> &args) {
        auto [it, inserted] =
            fact_ids.emplace(atom_key(predicate, args), task.num_facts());
        if (inserted)
            task.fact_names.push_back(display_name(predicate, args));
        return it->second;
    }

    int fact_id(const string &predicate, const vector<string> &args) const {
        auto it = fact_ids.find(atom_key(predicate, args));
        return it == fact_ids.end() ? -1 : it->second;
    }

    vector<string> bind(const Atom &atom,
                        const unordered_map<string, int> &binding) const {
        vector<string> args;
        args.reserve(atom.args.size());
        for (const string &a : atom.args) {
            if (a[0] == '?')
                args.push_back(object_names[binding.at(a)]);
            else
                args.push_back(a);
        }
        return args;
    }

    void ground_schema(const ActionSchema &schema) {
        const size_t n = schema.params.size();
        unordered_map<string, size_t> param_pos;
        for (size_t i = 0; i < n; ++i)
            param_pos[schema.params[i].name] = i;

        // static preconditions are checked as soon as their last
        // parameter is bound; constant-only ones before binding starts
        vector<vector<const Atom *>> static_checks(n + 1);
        vector<const Atom *> fluent_pre;
        for (const Atom &atom : schema.precondition) {
            if (!static_predicates.count(atom.predicate)) {
                fluent_pre.push_back(&atom);
                continue;
            }
            size_t last = 0;
            for (const string &a : atom.args)
                if (a[0] == '?')
                    last = max(last, param_pos.at(a) + 1);
            static_checks[last].push_back(&atom);
        }

        unordered_map<string, int> binding;
        vector<bool> used(object_names.size(), false);
        auto statics_hold = [&](size_t depth) {
            for (const Atom *atom : static_checks[depth])
                if (!init_atoms.count(
                        atom_key(atom->predicate, bind(*atom, binding))))
                    return false;
            return true;
        };
        if (!statics_hold(0))
            return;

        function<void(size_t)> rec = [&](size_t depth) {
            if (depth == n) {
                emit_action(schema, fluent_pre, binding);
                return;
            }
            const TypedName &param = schema.params[depth];
            for (int obj : objects_of(param.type)) {
                if (options.distinct_parameters && used[obj])
                    continue;
                binding[param.name] = obj;
                used[obj] = true;
                if (statics_hold(depth + 1))
                    rec(depth + 1);
                used[obj] = false;
            }
            binding.erase(param.name);
        };
        rec(0);
    }

    void emit_action(const ActionSchema &schema,
                     const vector<const Atom *> &fluent_pre,
                     const unordered_map<string, int> &binding) {
        Action action;
        action.name = schema.name;
        for (const TypedName &param : schema.params)
            action.name += " " + object_names[binding.at(param.name)];
        auto resolve = [&](const Atom &atom, vector<int> &out) {
            int f = fact_id(atom.predicate, bind(atom, binding));
            if (f < 0)
                return false;
            out.push_back(f);
            return true;
        };
        // an atom outside F means the binding is not type-consistent
        for (const Atom *atom : fluent_pre)
            if (!resolve(*atom, action.pre))
                return;
        for (const Atom &atom : schema.add_effects)
            if (!resolve(atom, action.add))
                return;
        for (const Atom &atom : schema.del_effects)
            if (!resolve(atom, action.del))
                return;
        action.normalize();
        if (task.actions.size() >= options.max_actions)
            throw GroundingError("grounding exceeds the action cap of " +
                                 to_string(options.max_actions));
        task.actions.push_back(move(action));
    }

public:
    Grounder(const DomainAst &domain, const ProblemAst &problem,
             const GroundingOptions &options,
             const map<string, string> &object_types, SubtypeTest is_subtype)
        : domain(domain), problem(problem), options(options),
          object_types(object_types), is_subtype(move(is_subtype)) {
    }

    StripsTask run() {
        collect_objects();
        collect_static_predicates();
        for (const Atom &atom : problem.init)
            init_atoms.insert(atom_key(atom.predicate, atom.args));
        enumerate_facts();

        // a static goal atom that fails in the initial state stays as an
        // unreachable fact
        vector<int> goal;
        for (const Atom &atom : problem.goal) {
            if (static_predicates.count(atom.predicate)) {
                if (!init_atoms.count(atom_key(atom.predicate, atom.args)))
                    goal.push_back(add_fact(atom.predicate, atom.args));
                continue;
            }
            int f = fact_id(atom.predicate, atom.args);
            if (f < 0)
                throw GroundingError("goal atom " +
                                     display_name(atom.predicate, atom.args) +
                                     " is not type-consistent");
            goal.push_back(f);
        }

        for (const ActionSchema &schema : domain.actions)
            ground_schema(schema);

        for (const Atom &atom : problem.init) {
            if (static_predicates.count(atom.predicate))
                continue;
            int f = fact_id(atom.predicate, atom.args);
            if (f < 0)
                throw GroundingError("initial atom " +
                                     display_name(atom.predicate, atom.args) +
                                     " is not type-consistent");
            task.init.push_back(f);
        }
        sort(task.init.begin(), task.init.end());
        task.init.erase(unique(task.init.begin(), task.init.end()),
                        task.init.end());
        sort(goal.begin(), goal.end());
        goal.erase(unique(goal.begin(), goal.end()), goal.end());
        task.goal = move(goal);
        return move(task);
    }
};
}

StripsTask ground_checked(const DomainAst &domain, const ProblemAst &problem,
                          const GroundingOptions &options,
                          const map<string, string> &object_types,
                          const SubtypeTest &is_subtype) {
    return Grounder(domain, problem, options, object_types, is_subtype).run();
}
}
