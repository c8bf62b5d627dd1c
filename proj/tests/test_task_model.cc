#include "oracles.h"

#include "sing/sas.h"
#include "sing/task_model.h"

#include "doctest.h"

#include <random>

using namespace std;
using namespace sing;
using oracle::make_task;

TEST_CASE("apply_action") {
    // facts p=0, q=1
    StripsTask task = make_task(2, {{{0}, {1}, {0}}, {{0}, {1}, {}}}, {0}, {1});
    FactSet p(2, vector<int>{0});
    CHECK(apply_action(p, task.actions[0]) == FactSet(2, vector<int>{1}));
    FactSet pq(2, vector<int>{0, 1});
    CHECK(apply_action(pq, task.actions[1]) == pq);
    CHECK_THROWS_AS(apply_action(FactSet(2), task.actions[0]),
                    InapplicableAction);
    // input state unchanged
    CHECK(p == FactSet(2, vector<int>{0}));
}

TEST_CASE("boolean encoding") {
    StripsTask task = make_task(3, {}, {}, {});
    StateVector v =
        encode_state(FactSet(3, vector<int>{0, 2}), Layout::Boolean, task);
    CHECK(v.values == vector<float>{1, 0, 1});
    CHECK(decode_boolean(v) == FactSet(3, vector<int>{0, 2}));
}

TEST_CASE("multivalued encoding and undefined variables") {
    SasTask sas;
    sas.variables.push_back({"v0", {"a", "b"}});
    sas.variables.push_back({"v1", {"a", "b", "c"}});
    sas.init = {1, 2};
    StripsTask task = sas_to_strips(sas);
    const auto &vf = task.variables->value_facts;
    FactSet s(task.num_facts(), vector<int>{vf[0][1], vf[1][2]});
    CHECK(encode_state(s, Layout::Multivalued, task).values ==
          vector<float>{1, 2});
    CHECK(encode_state(s, Layout::Boolean, task).values ==
          vector<float>{0, 1, 0, 0, 1});

    // v0 undefined: its two bits are zero; no multivalued encoding
    FactSet partial(task.num_facts(), vector<int>{vf[1][0]});
    StateVector b = encode_state(partial, Layout::Boolean, task);
    CHECK(b.values[vf[0][0]] == 0);
    CHECK(b.values[vf[0][1]] == 0);
    CHECK_THROWS_AS(encode_state(partial, Layout::Multivalued, task),
                    UnsupportedEncoding);
    CHECK_THROWS_AS(
        encode_state(s, Layout::Multivalued, make_task(5, {}, {}, {})),
        UnsupportedEncoding);
    CHECK(encoded_length(task, Layout::Multivalued) == 2);
    CHECK(encoded_length(task, Layout::Boolean) == 5);
}

TEST_CASE("boolean and multivalued views agree on full states") {
    SasTask sas;
    for (int v = 0; v < 3; ++v)
        sas.variables.push_back({"v" + to_string(v), {"a", "b", "c"}});
    sas.init = {0, 0, 0};
    StripsTask task = sas_to_strips(sas);
    for (int code = 0; code < 27; ++code) {
        vector<int> values{code % 3, code / 3 % 3, code / 9};
        FactSet s(task.num_facts());
        for (int v = 0; v < 3; ++v)
            s.set(task.variables->value_facts[v][values[v]]);
        StateVector mv = encode_state(s, Layout::Multivalued, task);
        StateVector bv = encode_state(s, Layout::Boolean, task);
        for (int v = 0; v < 3; ++v)
            for (int x = 0; x < 3; ++x)
                CHECK((bv.values[task.variables->value_facts[v][x]] == 1) ==
                      (mv.values[v] == x));
    }
}

TEST_CASE("validate_plan") {
    StripsTask trivial = make_task(2, {}, {0, 1}, {1});
    CHECK(validate_plan(trivial, Plan{}).valid);
    StripsTask task = make_task(3, {{{0}, {1}, {0}}, {{1}, {2}, {1}}}, {0}, {2});
    PlanValidation empty = validate_plan(task, Plan{});
    CHECK(!empty.valid);
    CHECK(empty.failed_step == 0);
    CHECK(validate_plan(task, Plan{{0, 1}}).valid);
    PlanValidation wrong = validate_plan(task, Plan{{1}});
    CHECK(!wrong.valid);
    CHECK(wrong.failed_step == 0);
}

TEST_CASE("8-puzzle successors") {
    // blank in a corner: two moves; blank in the center: four
    StripsTask task = oracle::npuzzle_task(oracle::goal_board());
    State init = initial_state(task);
    auto succ = successors(init, task.actions);
    CHECK(succ.size() == 2);
    for (auto &[a, s] : succ) {
        auto board = oracle::board_of(task, s);
        REQUIRE(board);
        auto expected = oracle::board_neighbors(oracle::goal_board());
        CHECK(find(expected.begin(), expected.end(), *board) != expected.end());
    }
    oracle::Board center = oracle::goal_board();
    swap(center[0], center[4]);
    StripsTask task2 = oracle::npuzzle_task(center);
    CHECK(successors(initial_state(task2), task2.actions).size() == 4);
}

TEST_CASE("successor generator agrees with the plain scan") {
    mt19937_64 rng(5);
    for (uint64_t seed = 0; seed < 50; ++seed) {
        StripsTask task = oracle::random_task(10, 8, seed);
        SuccessorGenerator gen(task.actions, task.num_facts());
        for (int trial = 0; trial < 20; ++trial) {
            FactSet s(task.num_facts());
            for (int f = 0; f < task.num_facts(); ++f)
                if (rng() % 2)
                    s.set(f);
            vector<int> fast;
            gen.applicable(s, fast);
            vector<int> slow;
            for (auto &[a, t] : successors(s, task.actions))
                slow.push_back(a);
            CHECK(fast == slow);
            CHECK(slow.size() <= task.actions.size());
            for (auto &[a, t] : successors(s, task.actions)) {
                for (int f : task.actions[a].add)
                    CHECK(t.test(f));
                for (int f : task.actions[a].del)
                    CHECK(!t.test(f));
            }
        }
    }
    StripsTask stuck = make_task(2, {{{1}, {0}, {}}}, {0}, {1});
    CHECK(successors(initial_state(stuck), stuck.actions).empty());
}

TEST_CASE("plan text round trip") {
    StripsTask task = oracle::blocks_task(3, 2);
    Plan plan{{0, 3, 5}};
    string text = format_plan(task, plan);
    CHECK(text.front() == '(');
    CHECK(parse_plan(task, text).actions == plan.actions);
}
