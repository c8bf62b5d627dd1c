#include "oracles.h"

#include "sing/backward.h"
#include "sing/experiment.h"
#include "sing/sampler.h"
#include "sing/search.h"
#include "sing/timer.h"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace std;
using namespace sing;

namespace {
struct Outcome {
    bool pass = false;
    string detail;
};

string fmt(const char *format, auto... args) {
    char buffer[512];
    snprintf(buffer, sizeof(buffer), format, args...);
    return buffer;
}

double median_of(vector<double> v) {
    sort(v.begin(), v.end());
    size_t n = v.size();
    if (n == 0)
        return 0.0;
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

oracle::Board random_board(Rng &rng, int moves) {
    oracle::Board b = oracle::goal_board();
    for (int i = 0; i < moves; ++i) {
        auto next = oracle::board_neighbors(b);
        b = next[rng() % next.size()];
    }
    return b;
}

// 1: apply-then-inverse restores the state
Outcome inverse_round_trip(uint64_t seed) {
    Timer timer;
    struct Family {
        BenchmarkDomain domain;
        int size;
    };
    const Family families[] = {{BenchmarkDomain::Npuzzle, 3},
                               {BenchmarkDomain::Pancake, 5},
                               {BenchmarkDomain::Blocks, 4},
                               {BenchmarkDomain::Visitall, 4}};
    const int per_domain = 2000;
    int failures = 0, total = 0;
    string detail;
    for (const Family &family : families) {
        StripsTask task = oracle::bench_task(family.domain, family.size, seed);
        Rng rng(mix_seed(seed, static_cast<uint64_t>(family.domain)));
        int done = 0, bad = 0;
        while (done < per_domain) {
            const Action &a = task.actions[rng() % task.actions.size()];
            FactSet add(task.num_facts(), a.add);
            FactSet s(task.num_facts());
            for (int f = 0; f < task.num_facts(); ++f)
                if (!add.test(f) && (rng() & 1))
                    s.set(f);
            for (int f : a.pre)
                s.set(f);
            for (int f : a.del)
                s.set(f);
            // the triple needs pre ⊆ s, del ⊆ s and add ∩ s = ∅
            bool usable = true;
            for (int f : a.add)
                usable = usable && !s.test(f);
            if (!usable)
                continue;
            ++done;
            State next = apply_action(s, a);
            Action inverse = derive_inverse(a);
            if (!is_applicable(next, inverse) || !(apply_action(next, inverse) == s))
                ++bad;
        }
        failures += bad;
        total += done;
        detail += fmt("%s %d/%d, ", to_string(family.domain), done - bad, done);
    }
    double seconds = timer.seconds();
    detail += fmt("%.2f s", seconds);
    return {failures == 0 && seconds < 5.0, detail};
}

// 2: forward replay from completions of regressed partial states
Outcome regression_soundness(uint64_t seed) {
    Timer timer;
    vector<pair<string, StripsTask>> tasks;
    tasks.emplace_back("npuzzle", oracle::npuzzle_task(oracle::goal_board()));
    tasks.emplace_back("blocks", oracle::blocks_task(4, seed));
    int bad_sequences = 0;
    long long replays = 0;
    string detail;
    for (auto &[name, task] : tasks) {
        Rng rng(mix_seed(seed, 2));
        int bad = 0, lengths = 0;
        for (int i = 0; i < 500; ++i) {
            PartialState p = regression_start(task);
            vector<int> sequence;
            int length = 1 + static_cast<int>(rng() % 6);
            for (int step = 0; step < length; ++step) {
                vector<int> options;
                for (int a = 0; a < task.num_actions(); ++a)
                    if (is_regressable(task, p, task.actions[a]))
                        options.push_back(a);
                if (options.empty())
                    break;
                int a = options[rng() % options.size()];
                p = regress(task, p, task.actions[a]);
                sequence.push_back(a);
            }
            lengths += static_cast<int>(sequence.size());
            vector<int> free;
            for (int f = 0; f < task.num_facts(); ++f)
                if (!p.test(f))
                    free.push_back(f);
            vector<State> completions;
            if (free.size() <= 6) {
                for (uint32_t mask = 0; mask < (1u << free.size()); ++mask) {
                    State c = p;
                    for (size_t j = 0; j < free.size(); ++j)
                        if (mask >> j & 1)
                            c.set(free[j]);
                    completions.push_back(c);
                }
            } else {
                completions.push_back(p);
                while (completions.size() < 64) {
                    State c = p;
                    for (int f : free)
                        if (rng() & 1)
                            c.set(f);
                    completions.push_back(c);
                }
            }
            bool ok = true;
            for (const State &c : completions) {
                State s = c;
                for (auto it = sequence.rbegin(); it != sequence.rend() && ok;
                     ++it) {
                    const Action &a = task.actions[*it];
                    if (!is_applicable(s, a))
                        ok = false;
                    else
                        s = apply_action(s, a);
                }
                ok = ok && is_goal(task, s);
                ++replays;
            }
            if (!ok)
                ++bad;
        }
        bad_sequences += bad;
        detail += fmt("%s %d/500 (mean length %.2f), ", name.c_str(), 500 - bad,
                      lengths / 500.0);
    }
    double seconds = timer.seconds();
    detail += fmt("%lld replays, %.2f s", replays, seconds);
    return {bad_sequences == 0 && seconds < 60.0, detail};
}

// 3: DFS labels never undercut the exact distance
Outcome dfs_label_bound(uint64_t seed) {
    Timer timer;
    StripsTask task = oracle::npuzzle_task(oracle::goal_board());
    BackwardSpace space(task, BackwardKind::ExplicitInverse);
    Rng rng(mix_seed(seed, 3));
    const int starts = 20, nsamples = 5000;
    long long checked = 0, violations = 0, illegal = 0;
    bool oracle_size_ok = true;
    for (int i = 0; i < starts; ++i) {
        oracle::Board start = i == 0 ? oracle::goal_board() : random_board(rng, 200);
        vector<int> dist = oracle::bfs_distances(start);
        long long reachable = count_if(dist.begin(), dist.end(),
                                       [](int d) { return d >= 0; });
        oracle_size_ok = oracle_size_ok && reachable == 181440;
        vector<NodeSample> samples = backward_dfs(
            space, oracle::state_of(task, start), nsamples, rng);
        for (const NodeSample &s : samples) {
            auto board = oracle::board_of(task, s.node);
            if (!board) {
                ++illegal;
                continue;
            }
            ++checked;
            if (s.label < dist[oracle::rank(*board)])
                ++violations;
        }
    }
    double seconds = timer.seconds();
    return {oracle_size_ok && violations == 0 && illegal == 0 && checked > 0 &&
                seconds < 120.0,
            fmt("%lld samples from %d starts, %lld below the oracle, %lld "
                "illegal boards, %.2f s",
                checked, starts, violations, illegal, seconds)};
}

// 4: visitall is not invertible with its own operators
Outcome visitall_yield(uint64_t seed) {
    Timer timer;
    StripsTask task = oracle::bench_task(BenchmarkDomain::Visitall, 4, seed);
    const int nsearches = 20, nsamples = 200;
    auto yield = [&](BackwardKind kind, double &raw) {
        BackwardSpace space(task, kind);
        long long useful = 0, emitted = 0;
        for (int i = 0; i < nsearches; ++i) {
            Rng rng = search_rng(mix_seed(seed, 4), i);
            FactSet start = space.start(rng);
            for (const NodeSample &s : backward_dfs(space, start, nsamples, rng)) {
                ++emitted;
                if (!is_goal(task, s.node))
                    ++useful;
            }
        }
        raw = double(emitted) / (nsearches * nsamples);
        return double(useful) / (nsearches * nsamples);
    };
    double raw_original, raw_inverse;
    double original = yield(BackwardKind::ExplicitOriginal, raw_original);
    double inverse = yield(BackwardKind::ExplicitInverse, raw_inverse);
    double seconds = timer.seconds();
    return {original < 0.05 && inverse >= 0.95 && seconds < 30.0,
            fmt("non-goal samples per budget: original %.1f%%, inverse %.1f%% "
                "(all samples: original %.1f%%, inverse %.1f%%), %.2f s",
                100 * original, 100 * inverse, 100 * raw_original,
                100 * raw_inverse, seconds)};
}

// 5: analytic gradients against central differences
Outcome gradient_check(uint64_t seed) {
    Timer timer;
    double worst = 0.0;
    int resamples = 0;
    for (nn::LossKind kind : {nn::LossKind::RelativeError, nn::LossKind::Mse}) {
        auto small = oracle::check_gradients(9, {16}, kind, seed);
        auto deep = oracle::check_gradients(25, {64, 64}, kind, seed + 1);
        worst = max({worst, small.max_relative_error, deep.max_relative_error});
        resamples += small.resamples + deep.resamples;
    }
    double seconds = timer.seconds();
    return {worst < 1e-4 && seconds < 10.0,
            fmt("max relative error %.3g, %d redraws, %.2f s", worst, resamples,
                seconds)};
}

struct Suite {
    vector<StripsTask> tasks;
    vector<string> names;
};

Suite npuzzle_suite(uint64_t seed) {
    Suite suite;
    Benchmark bench = gen_benchmark(BenchmarkDomain::Npuzzle, 3, 50, seed);
    for (auto &inst : bench.instances) {
        suite.tasks.push_back(oracle::npuzzle_task_from_pddl(inst.problem));
        suite.names.push_back(inst.name);
    }
    return suite;
}

// Replays a plan on the board simulator.
bool board_replay(const StripsTask &task, const Plan &plan) {
    State s = initial_state(task);
    auto board = oracle::board_of(task, s);
    if (!board)
        return false;
    for (int a : plan.actions) {
        if (!is_applicable(s, task.actions[a]))
            return false;
        s = apply_action(s, task.actions[a]);
        auto next = oracle::board_of(task, s);
        if (!next)
            return false;
        auto options = oracle::board_neighbors(*board);
        if (find(options.begin(), options.end(), *next) == options.end())
            return false;
        board = next;
    }
    return *board == oracle::goal_board();
}

struct SuiteRun {
    vector<SearchResult> results;
    int solved = 0;
    int invalid_plans = 0;

    vector<double> expansions() const {
        vector<double> out;
        for (const SearchResult &r : results)
            out.push_back(r.status == SearchStatus::Solved
                              ? double(r.expansions)
                              : INFINITE_H);
        return out;
    }
    vector<uint64_t> counts() const {
        vector<uint64_t> out;
        for (const SearchResult &r : results)
            out.push_back(r.expansions);
        return out;
    }
};

SuiteRun solve_suite(const Suite &suite, HeuristicKind kind,
                     const nn::MlpModel *model) {
    SuiteRun run;
    for (const StripsTask &task : suite.tasks) {
        Heuristic h(kind, task, model);
        Budget budget;
        budget.time_limit = 60.0;
        SearchResult r = gbfs(task, h, budget);
        if (r.status == SearchStatus::Solved) {
            ++run.solved;
            if (!validate_plan(task, *r.plan).valid || !board_replay(task, *r.plan))
                ++run.invalid_plans;
        }
        run.results.push_back(move(r));
    }
    return run;
}

struct Trained {
    nn::MlpModel model;
    string error;
    double seconds = 0.0;
};

Trained train_model(const StripsTask &task, PipelineConfig config) {
    config.mode = PipelineMode::TrainOnly;
    Trained out;
    Timer timer;
    RunRecord r = run_pipeline(task, config, &out.model);
    out.error = r.error;
    out.seconds = timer.seconds();
    return out;
}

PipelineConfig default_config(uint64_t seed) {
    PipelineConfig config;
    config.seed = seed;
    return config;
}

// 6: learned heuristic against blind search on generated 8-puzzles
Outcome end_to_end(uint64_t seed) {
    Timer timer;
    Suite suite = npuzzle_suite(seed);
    Trained t = train_model(suite.tasks[0], default_config(seed));
    if (!t.error.empty())
        return {false, "training failed: " + t.error};
    SuiteRun learned = solve_suite(suite, HeuristicKind::Nn, &t.model);
    SuiteRun blind = solve_suite(suite, HeuristicKind::Blind, nullptr);
    double m_nn = median_of(learned.expansions());
    double m_blind = median_of(blind.expansions());
    double ratio = m_nn / m_blind;
    double seconds = timer.seconds();
    bool pass = learned.solved == 50 && learned.invalid_plans == 0 &&
                blind.invalid_plans == 0 && ratio <= 0.2 && seconds < 900.0;
    return {pass,
            fmt("coverage %d/50 (blind %d/50), median expansions h_nn %.1f vs "
                "blind %.1f (ratio %.4f), invalid plans %d, training %.1f s, "
                "total %.1f s",
                learned.solved, blind.solved, m_nn, m_blind, ratio,
                learned.invalid_plans + blind.invalid_plans, t.seconds, seconds)};
}

// 7: each preferred setting against its flipped counterpart
Outcome ablation_directions(uint64_t seed) {
    Timer timer;
    Suite suite = npuzzle_suite(seed);
    struct Factor {
        string name;
        function<void(PipelineConfig &)> preferred, flipped;
    };
    const vector<Factor> factors{
        {"re>mse", [](PipelineConfig &) {},
         [](PipelineConfig &c) { c.training.loss = nn::LossKind::Mse; }},
        {"dfs>rw", [](PipelineConfig &) {},
         [](PipelineConfig &c) {
             c.sampler.strategy = SearchStrategy::RandomWalk;
         }},
        {"inverse>original",
         [](PipelineConfig &c) {
             c.sampler.space = BackwardKind::ExplicitInverse;
         },
         [](PipelineConfig &c) {
             c.sampler.space = BackwardKind::ExplicitOriginal;
         }}};
    bool pass = true;
    int invalid = 0, unsolved = 0;
    string detail;
    // the regression base model is shared by the first two factors
    vector<double> base_median(4, -1.0);
    for (const Factor &factor : factors) {
        int wins = 0;
        detail += factor.name + " [";
        for (uint64_t s = seed; s < seed + 3; ++s) {
            double m[2];
            for (int side = 0; side < 2; ++side) {
                bool is_base = side == 0 && factor.name != "inverse>original";
                if (is_base && base_median[s - seed] >= 0) {
                    m[0] = base_median[s - seed];
                    continue;
                }
                PipelineConfig config = default_config(s);
                (side == 0 ? factor.preferred : factor.flipped)(config);
                Trained t = train_model(suite.tasks[0], config);
                if (!t.error.empty()) {
                    m[side] = INFINITE_H;
                    continue;
                }
                SuiteRun run = solve_suite(suite, HeuristicKind::Nn, &t.model);
                invalid += run.invalid_plans;
                unsolved += 50 - run.solved;
                m[side] = median_of(run.expansions());
                if (is_base)
                    base_median[s - seed] = m[side];
            }
            if (m[0] <= m[1])
                ++wins;
            detail += fmt(" %.0f/%.0f", m[0], m[1]);
        }
        detail += fmt(" ] %d/3; ", wins);
        pass = pass && wins >= 2;
    }
    double seconds = timer.seconds();
    detail += fmt("unsolved runs %d, invalid plans %d, %.1f s", unsolved,
                  invalid, seconds);
    return {pass && invalid == 0 && seconds < 2700.0, detail};
}

// 9: plan validity and identical counts on repeated runs
Outcome validity_and_determinism(uint64_t seed) {
    Timer timer;
    Suite suite = npuzzle_suite(seed);
    int invalid = 0, mismatches = 0, solved = 0;
    vector<PipelineConfig> configs{default_config(seed), default_config(seed + 1)};
    configs[1].sampler.strategy = SearchStrategy::RandomWalk;
    configs[1].training.loss = nn::LossKind::Mse;
    for (const PipelineConfig &config : configs) {
        SuiteRun runs[2];
        for (SuiteRun &run : runs) {
            Trained t = train_model(suite.tasks[0], config);
            if (!t.error.empty())
                return {false, "training failed: " + t.error};
            run = solve_suite(suite, HeuristicKind::Nn, &t.model);
            invalid += run.invalid_plans;
            solved += run.solved;
        }
        vector<uint64_t> a = runs[0].counts(), b = runs[1].counts();
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i])
                ++mismatches;
    }
    SuiteRun blind[2] = {solve_suite(suite, HeuristicKind::Blind, nullptr),
                         solve_suite(suite, HeuristicKind::Blind, nullptr)};
    for (size_t i = 0; i < suite.tasks.size(); ++i)
        if (blind[0].results[i].expansions != blind[1].results[i].expansions)
            ++mismatches;
    invalid += blind[0].invalid_plans + blind[1].invalid_plans;
    solved += blind[0].solved + blind[1].solved;
    double seconds = timer.seconds();
    return {invalid == 0 && mismatches == 0,
            fmt("%d solved runs validated, %d invalid, %d count mismatches over "
                "repeated runs, %.1f s",
                solved, invalid, mismatches, seconds)};
}

// 8: FF against the exhaustive relaxed-plan oracle
Outcome ff_oracle(uint64_t seed) {
    Timer timer;
    int agree = 0, plus_one = 0, bad = 0;
    for (uint64_t i = 0; i < 100; ++i) {
        StripsTask task = oracle::random_task(10, 8, mix_seed(seed, 800 + i));
        State s = initial_state(task);
        double h = h_ff(task, s);
        optional<int> best = oracle::min_relaxed_plan(task, s);
        if (!best) {
            if (h == INFINITE_H)
                ++agree;
            else
                ++bad;
        } else if (h == *best) {
            ++agree;
        } else if (h == *best + 1) {
            ++plus_one;
        } else {
            ++bad;
        }
    }
    double seconds = timer.seconds();
    return {bad == 0 && seconds < 30.0,
            fmt("%d equal, %d one above, %d outside, %.2f s", agree, plus_one,
                bad, seconds)};
}

// 10: learned evaluations are at least as fast as FF evaluations
Outcome evaluation_speed(uint64_t seed) {
    Timer timer;
    Suite suite = npuzzle_suite(seed);
    Trained t = train_model(suite.tasks[0], default_config(seed));
    if (!t.error.empty())
        return {false, "training failed: " + t.error};
    const StripsTask &task = suite.tasks[0];
    Rng rng(mix_seed(seed, 10));
    vector<State> states;
    for (int i = 0; i < 2000; ++i)
        states.push_back(oracle::state_of(task, random_board(rng, 60)));
    auto rate = [&](Heuristic &h) {
        Timer clock;
        long long evaluations = 0;
        double sink = 0.0;
        while (clock.seconds() < 1.0)
            for (const State &s : states) {
                sink += h(s);
                ++evaluations;
            }
        if (sink < 0)
            cerr << sink;
        return evaluations / clock.seconds();
    };
    Heuristic nn_h(HeuristicKind::Nn, task, &t.model);
    Heuristic ff_h(HeuristicKind::Ff, task);
    double nn_rate = rate(nn_h), ff_rate = rate(ff_h);
    double seconds = timer.seconds() - t.seconds;
    return {nn_rate >= ff_rate && seconds < 30.0,
            fmt("h_nn %.0f/s, h_ff %.0f/s (factor %.2f), %.1f s excluding "
                "%.1f s training",
                nn_rate, ff_rate, nn_rate / ff_rate, seconds, t.seconds)};
}
}

int main(int argc, char **argv) {
    CLI::App app{"Acceptance checks for the sing planner"};
    vector<int> only;
    uint64_t seed = 1;
    app.add_option("--only", only, "Run only these criteria (1-10)")
        ->check(CLI::Range(1, 10));
    app.add_option("--seed", seed, "Root seed");
    CLI11_PARSE(app, argc, argv);

    const vector<pair<string, function<Outcome(uint64_t)>>> criteria{
        {"inverse round trip", inverse_round_trip},
        {"regression soundness", regression_soundness},
        {"dfs label bound", dfs_label_bound},
        {"visitall non-invertibility", visitall_yield},
        {"gradient correctness", gradient_check},
        {"end-to-end 8-puzzle", end_to_end},
        {"ablation directions", ablation_directions},
        {"ff oracle", ff_oracle},
        {"plan validity and determinism", validity_and_determinism},
        {"evaluation speed", evaluation_speed}};

    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        int number = static_cast<int>(i) + 1;
        if (!only.empty() && find(only.begin(), only.end(), number) == only.end())
            continue;
        Outcome outcome;
        try {
            outcome = criteria[i].second(seed);
        } catch (const exception &e) {
            outcome = {false, string("exception: ") + e.what()};
        }
        if (!outcome.pass)
            ++failed;
        cout << "criterion " << number << " " << (outcome.pass ? "PASS" : "FAIL")
             << " " << criteria[i].first << ": " << outcome.detail << endl;
    }
    return failed == 0 ? 0 : 1;
}
