#include "oracles.h"

#include "sing/experiment.h"
#include "sing/pddl.h"

#include "doctest.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

using namespace std;
using namespace sing;
using oracle::make_task;

namespace {
// five facts in a chain 0 -> 1 -> 2 -> 3 -> 4
StripsTask toy_task() {
    vector<oracle::ActionSpec> actions;
    for (int i = 0; i < 4; ++i)
        actions.push_back({{i}, {i + 1}, {i}});
    return make_task(5, actions, {0}, {4});
}

PipelineConfig small_config() {
    PipelineConfig c;
    c.sampler.nsearches = 20;
    c.sampler.nsamples = 50;
    c.training.max_epochs = 20;
    c.budget.time_limit = 60;
    return c;
}

RunRecord record(const string &domain, const string &config, bool solved,
                 uint64_t expansions, double search_time) {
    RunRecord r;
    r.domain = domain;
    r.config = config;
    r.status = solved ? SearchStatus::Solved : SearchStatus::OutOfBudget;
    r.expansions = expansions;
    r.search_time = search_time;
    if (solved)
        r.plan_length = 3;
    return r;
}
}

TEST_CASE("defaults") {
    PipelineConfig c;
    CHECK(c.sampler.space == BackwardKind::Regression);
    CHECK(c.sampler.strategy == SearchStrategy::Dfs);
    CHECK(c.sampler.layout == Layout::Boolean);
    CHECK(c.training.loss == nn::LossKind::RelativeError);
    CHECK(c.hidden == vector<int>{16});
    CHECK(c.sampler.nsearches == 500);
    CHECK(c.sampler.nsamples == 200);
    CHECK(c.id() == "regression-dfs-boolean-re-h16");
}

TEST_CASE("pipeline on a toy task") {
    PipelineConfig c;
    RunRecord r = run_pipeline(toy_task(), c);
    CHECK(r.error == "");
    CHECK(r.status == SearchStatus::Solved);
    CHECK(r.sampling_time > 0);
    CHECK(r.training_time > 0);
    CHECK(r.search_time > 0);
    CHECK(r.plan_length == 4);
    CHECK(r.num_samples > 0);
    CHECK(r.total_time() <= c.budget.time_limit);
    CHECK(validate_plan(toy_task(), *r.plan).valid);
}

TEST_CASE("pipeline under a one-second budget") {
    StripsTask task = oracle::npuzzle_task(oracle::goal_board());
    PipelineConfig c;
    c.budget.time_limit = 1.0;
    RunRecord r;
    CHECK_NOTHROW(r = run_pipeline(task, c));
    CHECK(r.status == SearchStatus::OutOfBudget);
    CHECK(r.search_time == 0.0);
    CHECK(!r.error.empty());
    CHECK(r.total_time() <= 1.0 + 0.5);
}

TEST_CASE("pipeline errors are recorded") {
    PipelineConfig c = small_config();
    c.sampler.nsamples = 0;
    RunRecord r = run_pipeline(toy_task(), c);
    CHECK(!r.error.empty());
    CHECK(r.status != SearchStatus::Solved);

    PipelineConfig solve = small_config();
    solve.mode = PipelineMode::SolveWithModel;
    CHECK(!run_pipeline(toy_task(), solve).error.empty());
}

TEST_CASE("train-only and solve-with-model") {
    StripsTask task = toy_task();
    PipelineConfig train = small_config();
    train.mode = PipelineMode::TrainOnly;
    nn::MlpModel model;
    RunRecord r = run_pipeline(task, train, &model);
    CHECK(r.error == "");
    CHECK(model.input_dim == 5);

    PipelineConfig solve = small_config();
    solve.mode = PipelineMode::SolveWithModel;
    solve.model = &model;
    RunRecord s = run_pipeline(task, solve);
    CHECK(s.status == SearchStatus::Solved);
    CHECK(s.sampling_time == 0.0);
    CHECK(s.training_time == 0.0);
}

TEST_CASE("pipeline determinism") {
    Benchmark b = gen_benchmark(BenchmarkDomain::Npuzzle, 3, 1, 4);
    StripsTask task = oracle::npuzzle_task_from_pddl(b.instances[0].problem);
    PipelineConfig c = small_config();
    RunRecord a = run_pipeline(task, c), b2 = run_pipeline(task, c);
    CHECK(a.num_samples == b2.num_samples);
    CHECK(a.expansions == b2.expansions);
    CHECK(a.generated == b2.generated);
    CHECK(a.train_loss == b2.train_loss);
}

TEST_CASE("portfolio") {
    PipelineConfig reg = small_config();
    PipelineConfig exp = small_config();
    exp.sampler.space = BackwardKind::ExplicitInverse;
    RunRecord ok = run_portfolio(toy_task(), reg, exp, 60);
    CHECK(ok.status == SearchStatus::Solved);
    CHECK(ok.legs.size() == 1);

    StripsTask dead = make_task(3, {{{0}, {1}, {0}}, {{2}, {1}, {2}}}, {0}, {1, 2});
    Timer t;
    RunRecord fail = run_portfolio(dead, reg, exp, 4);
    CHECK(fail.status == SearchStatus::OutOfBudget);
    CHECK(fail.legs.size() == 2);
    CHECK(t.seconds() <= 4 * 1.05);
}

TEST_CASE("generated 8-puzzles are solvable") {
    Benchmark b = gen_benchmark(BenchmarkDomain::Npuzzle, 3, 50, 1);
    REQUIRE(b.instances.size() == 50);
    vector<int> dist = oracle::bfs_distances(oracle::goal_board());
    for (auto &inst : b.instances) {
        StripsTask task = oracle::npuzzle_task_from_pddl(inst.problem);
        auto board = oracle::board_of(task, initial_state(task));
        REQUIRE(board);
        CHECK(dist[oracle::rank(*board)] >= 0);
    }
}

TEST_CASE("generator determinism and ranges") {
    for (BenchmarkDomain d :
         {BenchmarkDomain::Npuzzle, BenchmarkDomain::Pancake,
          BenchmarkDomain::Blocks, BenchmarkDomain::Visitall}) {
        Benchmark a = gen_benchmark(d, 4, 3, 9), b = gen_benchmark(d, 4, 3, 9);
        CHECK(a.domain == b.domain);
        for (int i = 0; i < 3; ++i)
            CHECK(a.instances[i].problem == b.instances[i].problem);
        Benchmark c = gen_benchmark(d, 4, 3, 10);
        CHECK(c.instances[0].problem != a.instances[0].problem);
    }
    CHECK_THROWS_AS(gen_benchmark(BenchmarkDomain::Npuzzle, 7, 1, 0),
                    out_of_range);
    CHECK_THROWS_AS(gen_benchmark(BenchmarkDomain::Pancake, 2, 1, 0),
                    out_of_range);
    CHECK_THROWS_AS(gen_benchmark(BenchmarkDomain::Blocks, 26, 1, 0),
                    out_of_range);
    CHECK_NOTHROW(gen_benchmark(BenchmarkDomain::Npuzzle, 6, 1, 0));
    CHECK_NOTHROW(gen_benchmark(BenchmarkDomain::Pancake, 14, 1, 0));
    CHECK_NOTHROW(gen_benchmark(BenchmarkDomain::Blocks, 25, 1, 0));
}

TEST_CASE("pancake instances, including the sorted stack") {
    Benchmark b = gen_benchmark(BenchmarkDomain::Pancake, 3, 60, 2);
    int sorted = 0;
    for (auto &inst : b.instances) {
        auto [d, p] = pddl::parse_pddl(b.domain, inst.problem);
        StripsTask task = pddl::ground(d, p);
        Heuristic h(HeuristicKind::Blind, task);
        SearchResult r = gbfs(task, h, Budget{});
        REQUIRE(r.status == SearchStatus::Solved);
        CHECK(validate_plan(task, *r.plan).valid);
        if (r.plan->actions.empty()) {
            ++sorted;
            CHECK(is_goal(task, initial_state(task)));
        }
    }
    CHECK(sorted > 0);
}

TEST_CASE("blocks configurations are uniform") {
    // 3 blocks: 13 tower configurations
    map<string, int> freq;
    const int draws = 6500;
    Benchmark b = gen_benchmark(BenchmarkDomain::Blocks, 3, draws, 5);
    for (auto &inst : b.instances) {
        auto p = pddl::parse_problem(inst.problem);
        vector<string> atoms;
        for (auto &a : p.init)
            if (a.predicate == "on" || a.predicate == "ontable")
                atoms.push_back(a.predicate + " " +
                                (a.args.empty() ? "" : a.args[0]) + " " +
                                (a.args.size() > 1 ? a.args[1] : ""));
        sort(atoms.begin(), atoms.end());
        string key;
        for (auto &a : atoms)
            key += a + ";";
        ++freq[key];
    }
    CHECK(freq.size() == 13);
    for (auto &[k, n] : freq) {
        CHECK(n > 350);
        CHECK(n < 650);
    }
}

TEST_CASE("report arithmetic") {
    vector<RunRecord> records{
        record("d", "c", true, 10, 1.0), record("d", "c", true, 30, 2.0),
        record("d", "c", false, 99, 5.0), record("d", "c", false, 5, 5.0),
        record("d", "none", false, 1, 1.0)};
    vector<ReportRow> rows = report(records);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].coverage == 50.0);
    CHECK(rows[0].median_expansions == 20.0);
    CHECK(rows[0].median_expansions_per_second == 12.5);
    CHECK(rows[0].median_runtime == 1.5);
    CHECK(!rows[1].median_expansions);
    string text = format_report_text(rows);
    CHECK(text.find("—") != string::npos);
    CHECK(text.find("50.0") != string::npos);
    string csv = format_report_csv(rows);
    CHECK(csv.find("d,none,1,0,0.0,—,—,—") != string::npos);
    CHECK(median({}) == nullopt);
    CHECK(median({3, 1, 2}) == 2.0);
}

TEST_CASE("report medians match a recomputation from the raw CSV") {
    mt19937_64 rng(4);
    vector<RunRecord> records;
    for (int i = 0; i < 60; ++i)
        records.push_back(record(i % 2 ? "a" : "b", i % 3 ? "x" : "y",
                                 rng() % 3 != 0, rng() % 1000,
                                 0.01 + (rng() % 100) / 10.0));
    ostringstream csv;
    csv << records_csv_header() << "\n";
    for (auto &r : records)
        csv << record_to_csv(r) << "\n";

    // independent parse: split lines, sort, take the middle
    map<pair<string, string>, vector<double>> exps;
    map<pair<string, string>, pair<int, int>> cover;
    istringstream in(csv.str());
    string line;
    getline(in, line);
    while (getline(in, line)) {
        vector<string> c;
        stringstream ss(line);
        string cell;
        while (getline(ss, cell, ','))
            c.push_back(cell);
        auto key = make_pair(c[1], c[2]);
        ++cover[key].second;
        if (c[3] == "solved") {
            ++cover[key].first;
            exps[key].push_back(stod(c[7]));
        }
    }
    istringstream again(csv.str());
    vector<ReportRow> rows = report(read_records(again));
    CHECK(rows.size() == cover.size());
    for (const ReportRow &row : rows) {
        auto key = make_pair(row.domain, row.config);
        auto v = exps[key];
        sort(v.begin(), v.end());
        double m = v.size() % 2 ? v[v.size() / 2]
                                : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
        CHECK(*row.median_expansions == m);
        CHECK(row.coverage ==
              doctest::Approx(100.0 * cover[key].first / cover[key].second));
    }
}

TEST_CASE("record round trips") {
    RunRecord r = record("npuzzle", "regression-dfs-boolean-re-h16", true, 42, 0.5);
    r.instance = "i,1";
    r.train_loss = 1.25;
    r.error = "say \"hi\"";
    r.legs.push_back(record("x", "y", false, 1, 1));
    RunRecord j = record_from_json(record_to_json(r));
    CHECK(j.instance == r.instance);
    CHECK(j.expansions == 42);
    CHECK(j.train_loss == 1.25);
    CHECK(!j.validation_loss);
    CHECK(j.legs.size() == 1);
    CHECK(j.error == r.error);
    istringstream csv(records_csv_header() + "\n" + record_to_csv(r) + "\n");
    vector<RunRecord> back = read_records(csv);
    REQUIRE(back.size() == 1);
    CHECK(back[0].instance == "i,1");
    CHECK(back[0].error == r.error);
    CHECK(back[0].plan_length == 3);
}

TEST_CASE("ablation pivot counts wins over baselines") {
    vector<RunRecord> records{
        record("d1", "learned", true, 10, 1), record("d1", "gc", true, 50, 1),
        record("d1", "ff", true, 5, 1),       record("d2", "learned", true, 10, 1),
        record("d2", "gc", false, 1, 1),      record("d2", "ff", false, 1, 1)};
    string pivot = format_ablation_pivot(report(records));
    istringstream in(pivot);
    string header, row;
    getline(in, header);
    getline(in, row);
    CHECK(header.find("> gc") != string::npos);
    CHECK(header.find("> ff") != string::npos);
    istringstream cells(row);
    string name;
    int domains, gc, ff;
    cells >> name >> domains >> gc >> ff;
    CHECK(name == "learned");
    CHECK(domains == 2);
    CHECK(gc == 2);
    CHECK(ff == 1);
}
