#include "oracles.h"

#include "sing/backward.h"
#include "sing/sas.h"

#include "doctest.h"

#include <algorithm>
#include <set>

using namespace std;
using namespace sing;
using oracle::make_task;

namespace {
bool contains(const vector<int> &v, int x) {
    return find(v.begin(), v.end(), x) != v.end();
}

// SAS task with v0 (2 values) and v1 (3 values).
StripsTask two_variable_task(vector<SasFact> goal) {
    SasTask sas;
    sas.variables.push_back({"v0", {"a", "b"}});
    sas.variables.push_back({"v1", {"a", "b", "c"}});
    sas.init = {0, 0};
    sas.goal = goal;
    sas.operators.push_back({"swap0", {{0, 0, 1}}});
    sas.operators.push_back({"swap0-back", {{0, 1, 0}}});
    sas.operators.push_back({"set1", {{1, ANY_VALUE, 1}}});
    return sas_to_strips(sas);
}
}

TEST_CASE("derived inverse operators") {
    StripsTask task = make_task(2, {{{0}, {1}, {0}}, {{0}, {1}, {}}}, {0}, {1});
    Action inv = derive_inverse(task.actions[0]);
    CHECK(inv.pre == vector<int>{1});
    CHECK(inv.add == vector<int>{0});
    CHECK(inv.del == vector<int>{1});
    CHECK(inv.direction == Direction::DerivedInverse);
    CHECK(inv.name == task.actions[0].name);
    Action inv2 = derive_inverse(task.actions[1]);
    CHECK(inv2.pre == vector<int>{0, 1});
    CHECK(inv2.add.empty());
    CHECK(inv2.del == vector<int>{1});
}

TEST_CASE("visitall move inverse un-visits the target") {
    StripsTask task = oracle::bench_task(BenchmarkDomain::Visitall, 2, 0);
    auto it = find_if(task.actions.begin(), task.actions.end(),
                      [](const Action &a) { return a.name == "move p-1-1 p-1-2"; });
    REQUIRE(it != task.actions.end());
    int at_from = oracle::fact_index(task, "(at-robot p-1-1)");
    int at_to = oracle::fact_index(task, "(at-robot p-1-2)");
    int visited_to = oracle::fact_index(task, "(visited p-1-2)");
    Action inv = derive_inverse(*it);
    CHECK(contains(inv.add, at_from));
    CHECK(contains(inv.del, at_to));
    CHECK(contains(inv.del, visited_to));

    int visited_from = oracle::fact_index(task, "(visited p-1-1)");
    FactSet s(task.num_facts(), vector<int>{at_from, visited_from});
    State t = apply_action(s, *it);
    CHECK(is_applicable(t, inv));
    CHECK(apply_action(t, inv) == s);
}

TEST_CASE("inverse round trip on random tasks") {
    mt19937_64 rng(3);
    int checked = 0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        StripsTask task = oracle::random_task(10, 8, seed);
        for (const Action &a : task.actions) {
            FactSet s(task.num_facts());
            for (int f = 0; f < task.num_facts(); ++f)
                if (rng() % 2)
                    s.set(f);
            for (int f : a.pre)
                s.set(f);
            for (int f : a.del)
                s.set(f);
            for (int f : a.add)
                s.reset(f);
            if (!s.contains_all(a.pre))
                continue;
            State t = apply_action(s, a);
            Action inv = derive_inverse(a);
            REQUIRE(is_applicable(t, inv));
            CHECK(apply_action(t, inv) == s);
            ++checked;
        }
    }
    CHECK(checked > 500);
}

TEST_CASE("goal completion with a variable map") {
    StripsTask task = two_variable_task({{0, 0}});
    vector<Action> inverse = derive_inverse_operators(task);
    const auto &vf = task.variables->value_facts;
    set<int> v1_values;
    for (uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        State s = complete_goal_state(task, inverse, rng);
        CHECK(s.test(vf[0][0]));
        CHECK(!s.test(vf[0][1]));
        int count = 0;
        for (int x = 0; x < 3; ++x)
            if (s.test(vf[1][x])) {
                ++count;
                v1_values.insert(x);
            }
        CHECK(count == 1);
    }
    CHECK(v1_values.size() == 3);
}

TEST_CASE("goal completion of a full goal is deterministic") {
    StripsTask task = two_variable_task({{0, 1}, {1, 2}});
    vector<Action> inverse = derive_inverse_operators(task);
    Rng a(1), b(99);
    State s = complete_goal_state(task, inverse, a);
    CHECK(s == complete_goal_state(task, inverse, b));
    const auto &vf = task.variables->value_facts;
    CHECK(s == FactSet(task.num_facts(), vector<int>{vf[0][1], vf[1][2]}));
}

TEST_CASE("goal completion gives up on unexpandable candidates") {
    StripsTask task = make_task(2, {}, {}, {0});
    Action needs_missing;
    needs_missing.pre = {0, 1};
    needs_missing.del = {1};
    // fact 1 is drawn with probability 1/2, so this one is expandable soon
    Rng rng(4);
    State s = complete_goal_state(task, vector<Action>{needs_missing}, rng);
    CHECK(s.test(0));
    CHECK(s.test(1));
    // no backward action at all: every candidate is rejected
    Rng rng2(4);
    CHECK_THROWS_AS(complete_goal_state(task, vector<Action>{}, rng2),
                    GoalCompletionFailure);
}

TEST_CASE("regression rules") {
    // at-A = 0, at-B = 1
    StripsTask task = make_task(2, {{{0}, {1}, {0}}}, {0}, {1});
    PartialState s(2, vector<int>{1});
    CHECK(is_regressable(task, s, task.actions[0]));
    CHECK(regress(task, s, task.actions[0]) == PartialState(2, vector<int>{0}));

    // p = 0, q = 1; a: pre={}, add={q}
    StripsTask t2 = make_task(2, {{{}, {1}, {}}}, {}, {0, 1});
    PartialState pq(2, vector<int>{0, 1});
    CHECK(regress(t2, pq, t2.actions[0]) == PartialState(2, vector<int>{0}));

    PartialState p(2, vector<int>{0});
    CHECK(!is_regressable(t2, p, t2.actions[0]));
    CHECK_THROWS_AS(regress(t2, p, t2.actions[0]), InapplicableRegression);

    // deleting a required fact blocks regression
    StripsTask t3 = make_task(2, {{{}, {1}, {0}}}, {}, {0, 1});
    CHECK(!is_regressable(t3, pq, t3.actions[0]));
}

TEST_CASE("regression in the finite-domain view leaves variables undefined") {
    StripsTask task = two_variable_task({{0, 1}, {1, 1}});
    const auto &vf = task.variables->value_facts;
    PartialState start = regression_start(task);
    CHECK(start == FactSet(task.num_facts(), vector<int>{vf[0][1], vf[1][1]}));
    // set1 has no precondition on v1: v1 becomes undefined
    PartialState r = regress(task, start, task.actions[2]);
    CHECK(r == FactSet(task.num_facts(), vector<int>{vf[0][1]}));
}

TEST_CASE("regression start") {
    StripsTask task = two_variable_task({{0, 1}});
    PartialState s = regression_start(task);
    CHECK(s.count() == 1);
    StripsTask full = two_variable_task({{0, 1}, {1, 0}});
    CHECK(regression_start(full).count() == 2);
    StripsTask none = two_variable_task({});
    CHECK(regression_start(none).count() == 0);
}

TEST_CASE("regressed states are sound on random tasks") {
    mt19937_64 rng(8);
    int sequences = 0;
    for (uint64_t seed = 0; seed < 300; ++seed) {
        StripsTask task = oracle::random_task(8, 6, seed);
        BackwardSpace space(task, BackwardKind::Regression);
        Rng r(seed);
        PartialState node = space.start(r);
        vector<int> path;
        for (int step = 0; step < 5; ++step) {
            vector<int> options;
            for (int a = 0; a < task.num_actions(); ++a)
                if (is_regressable(task, node, task.actions[a]))
                    options.push_back(a);
            if (options.empty())
                break;
            int a = options[rng() % options.size()];
            node = regress(task, node, task.actions[a]);
            path.push_back(a);
        }
        if (path.empty())
            continue;
        ++sequences;
        // every superset of the node replays to a goal state
        vector<int> free;
        for (int f = 0; f < task.num_facts(); ++f)
            if (!node.test(f))
                free.push_back(f);
        for (uint32_t mask = 0; mask < (1u << free.size()); ++mask) {
            State s = node;
            for (size_t i = 0; i < free.size(); ++i)
                if (mask >> i & 1)
                    s.set(free[i]);
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                REQUIRE(is_applicable(s, task.actions[*it]));
                s = apply_action(s, task.actions[*it]);
            }
            CHECK(is_goal(task, s));
        }
    }
    CHECK(sequences > 50);
}

TEST_CASE("backward successors are distinct and sorted") {
    StripsTask task = oracle::npuzzle_task(oracle::goal_board());
    for (BackwardKind kind :
         {BackwardKind::ExplicitOriginal, BackwardKind::ExplicitInverse,
          BackwardKind::Regression}) {
        BackwardSpace space(task, kind);
        Rng rng(2);
        FactSet start = space.start(rng);
        vector<FactSet> succ;
        space.successors(start, succ);
        CHECK(!succ.empty());
        CHECK(is_sorted(succ.begin(), succ.end()));
        CHECK(adjacent_find(succ.begin(), succ.end()) == succ.end());
    }
}
