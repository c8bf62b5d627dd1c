#include "sing/experiment.h"

#include "sing/pddl.h"
#include "sing/sas.h"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

using namespace std;

namespace sing {
string read_file(const string &path) {
    ifstream in(path, ios::binary);
    if (!in)
        throw runtime_error("cannot open '" + path + "'");
    ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const string &path, const string &contents) {
    ofstream out(path, ios::binary);
    if (!out)
        throw runtime_error("cannot write '" + path + "'");
    out << contents;
    if (!out)
        throw runtime_error("error writing '" + path + "'");
}

StripsTask load_task(const TaskSource &source) {
    if (!source.sas_path.empty())
        return sas_to_strips(read_sas(read_file(source.sas_path)));
    if (source.domain_path.empty() || source.problem_path.empty())
        throw invalid_argument(
            "a task needs --sas or both --domain and --problem");
    auto [domain, problem] = pddl::parse_pddl(
        read_file(source.domain_path), read_file(source.problem_path));
    return pddl::ground(domain, problem);
}

string PipelineConfig::id() const {
    if (heuristic != HeuristicKind::Nn)
        return to_string(heuristic);
    string hidden_str;
    for (size_t i = 0; i < hidden.size(); ++i)
        hidden_str += (i ? "x" : "") + std::to_string(hidden[i]);
    return string(to_string(sampler.space)) + "-" +
           to_string(sampler.strategy) + "-" + to_string(sampler.layout) +
           "-" + nn::to_string(training.loss) + "-h" + hidden_str;
}

void PipelineConfig::validate() const {
    if (!(budget.time_limit > 0))
        throw invalid_argument("time limit must be positive");
    if (budget.memory_limit == 0)
        throw invalid_argument("memory limit must be positive");
    if (heuristic != HeuristicKind::Nn) {
        if (mode != PipelineMode::SingleInstance)
            throw invalid_argument(
                "training modes only apply to the nn heuristic");
        return;
    }
    if (mode == PipelineMode::SolveWithModel) {
        if (!model)
            throw invalid_argument("solve-with-model needs a model");
        return;
    }
    sampler.validate();
    training.validate();
    for (int w : hidden)
        if (w < 1)
            throw invalid_argument("hidden widths must be positive");
}

namespace {
void fill_search(RunRecord &record, const SearchResult &result) {
    record.status = result.status;
    record.expansions = result.expansions;
    record.generated = result.generated;
    record.evaluations = result.evaluations;
    record.search_time = result.wall_time;
    if (result.plan) {
        record.plan = result.plan;
        record.plan_length = static_cast<int>(result.plan->actions.size());
    }
}
}

RunRecord run_pipeline(const StripsTask &task, const PipelineConfig &config,
                       nn::MlpModel *trained) {
    Timer total;
    RunRecord record;
    record.config = config.id();
    try {
        config.validate();
    } catch (const exception &e) {
        record.error = e.what();
        return record;
    }
    const Deadline deadline = Deadline::after(config.budget.time_limit);

    optional<nn::MlpModel> learned;
    const nn::MlpModel *model = config.model;
    const bool learn = config.heuristic == HeuristicKind::Nn &&
                       config.mode != PipelineMode::SolveWithModel;
    if (learn) {
        SamplerConfig sampler = config.sampler;
        sampler.seed = mix_seed(config.seed, 1);
        TrainingSet set;
        Timer phase;
        try {
            set = generate_training_set(task, sampler, deadline);
        } catch (const exception &e) {
            record.sampling_time = phase.seconds();
            record.error = e.what();
            return record;
        }
        record.sampling_time = phase.seconds();
        record.num_samples = set.samples.size();

        Timer train_phase;
        try {
            Rng init_rng(mix_seed(config.seed, 2));
            nn::MlpModel initial = nn::init_network(
                set.input_dim, config.hidden, init_rng, set.layout);
            nn::TrainConfig training = config.training;
            training.seed = mix_seed(config.seed, 3);
            auto [net, report] = nn::train(move(initial), set, training,
                                           deadline);
            record.training_time = train_phase.seconds();
            if (!report.train_loss.empty()) {
                record.train_loss = report.train_loss.back();
                record.validation_loss = report.validation_loss.back();
            }
            if (report.stopped_by_deadline || deadline.expired()) {
                record.error = "budget exhausted during training";
                return record;
            }
            learned = move(net);
        } catch (const exception &e) {
            record.training_time = train_phase.seconds();
            record.error = e.what();
            return record;
        }
        if (config.mode == PipelineMode::TrainOnly) {
            if (trained)
                *trained = *learned;
            return record;
        }
        model = &*learned;
    }

    Budget search_budget = config.budget;
    search_budget.time_limit = deadline.remaining();
    if (!(search_budget.time_limit > 0)) {
        record.error = "budget exhausted before search";
        return record;
    }
    try {
        Heuristic heuristic(config.heuristic, task, model);
        fill_search(record, gbfs(task, heuristic, search_budget));
    } catch (const exception &e) {
        record.search_time = max(0.0, total.seconds() - record.sampling_time -
                                          record.training_time);
        record.error = e.what();
    }
    return record;
}

RunRecord run_portfolio(const StripsTask &task,
                        const PipelineConfig &regression,
                        const PipelineConfig &explicit_space,
                        double time_limit) {
    Deadline deadline = Deadline::after(time_limit);
    PipelineConfig first = regression;
    first.budget.time_limit = time_limit / 2;
    RunRecord leg1 = run_pipeline(task, first);

    RunRecord result;
    result.config = "portfolio";
    result.legs.push_back(leg1);
    auto absorb = [&](const RunRecord &leg) {
        result.sampling_time += leg.sampling_time;
        result.training_time += leg.training_time;
        result.search_time += leg.search_time;
        result.num_samples += leg.num_samples;
        result.expansions += leg.expansions;
        result.generated += leg.generated;
        result.evaluations += leg.evaluations;
    };
    absorb(leg1);
    if (leg1.status == SearchStatus::Solved) {
        result.status = SearchStatus::Solved;
        result.plan = leg1.plan;
        result.plan_length = leg1.plan_length;
        return result;
    }
    double remaining = deadline.remaining();
    if (remaining > 0) {
        PipelineConfig second = explicit_space;
        second.budget.time_limit = remaining;
        RunRecord leg2 = run_pipeline(task, second);
        result.legs.push_back(leg2);
        absorb(leg2);
        if (leg2.status == SearchStatus::Solved) {
            result.status = SearchStatus::Solved;
            result.plan = leg2.plan;
            result.plan_length = leg2.plan_length;
            return result;
        }
    }
    result.status = SearchStatus::OutOfBudget;
    return result;
}

const char *to_string(BenchmarkDomain domain) {
    switch (domain) {
    case BenchmarkDomain::Npuzzle:
        return "npuzzle";
    case BenchmarkDomain::Pancake:
        return "pancake";
    case BenchmarkDomain::Blocks:
        return "blocks";
    case BenchmarkDomain::Visitall:
        return "visitall";
    }
    return "?";
}

BenchmarkDomain parse_benchmark_domain(const string &name) {
    if (name == "npuzzle")
        return BenchmarkDomain::Npuzzle;
    if (name == "pancake")
        return BenchmarkDomain::Pancake;
    if (name == "blocks" || name == "blocksworld")
        return BenchmarkDomain::Blocks;
    if (name == "visitall")
        return BenchmarkDomain::Visitall;
    throw invalid_argument("unknown benchmark domain '" + name + "'");
}

namespace {
const char *NPUZZLE_DOMAIN = R"((define (domain npuzzle)
  (:requirements :strips :typing)
  (:types tile position)
  (:predicates (at ?t - tile ?p - position)
               (blank ?p - position)
               (neighbor ?p1 - position ?p2 - position))
  (:action move
    :parameters (?t - tile ?from - position ?to - position)
    :precondition (and (at ?t ?from) (blank ?to) (neighbor ?from ?to))
    :effect (and (at ?t ?to) (blank ?from)
                 (not (at ?t ?from)) (not (blank ?to)))))
)";

const char *BLOCKS_DOMAIN = R"((define (domain blocksworld)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block)
               (ontable ?x - block)
               (clear ?x - block)
               (handempty)
               (holding ?x - block))
  (:action pick-up
    :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x)
                 (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (ontable ?x) (clear ?x) (handempty) (not (holding ?x))))
  (:action stack
    :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (on ?x ?y) (clear ?x) (handempty)
                 (not (holding ?x)) (not (clear ?y))))
  (:action unstack
    :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y)
                 (not (on ?x ?y)) (not (clear ?x)) (not (handempty)))))
)";

const char *VISITALL_DOMAIN = R"((define (domain visitall)
  (:requirements :strips :typing)
  (:types cell)
  (:predicates (at-robot ?c - cell)
               (visited ?c - cell)
               (connected ?c1 - cell ?c2 - cell))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (at-robot ?from) (connected ?from ?to))
    :effect (and (at-robot ?to) (visited ?to) (not (at-robot ?from)))))
)";

/*
  Pancake stacks as a pancake-at-position relation; flip-k reverses the top
  k positions. Positions are domain constants, so there is one schema per
  prefix length.
*/
string pancake_domain(int n) {
    ostringstream out;
    out << "(define (domain pancake-" << n << ")\n"
        << "  (:requirements :strips :typing)\n"
        << "  (:types pancake position)\n"
        << "  (:constants";
    for (int i = 1; i <= n; ++i)
        out << " pos" << i;
    out << " - position)\n"
        << "  (:predicates (at ?x - pancake ?p - position))";
    for (int k = 2; k <= n; ++k) {
        out << "\n  (:action flip-" << k << "\n    :parameters (";
        for (int i = 1; i <= k; ++i)
            out << (i > 1 ? " " : "") << "?x" << i;
        out << " - pancake)\n    :precondition (and";
        for (int i = 1; i <= k; ++i)
            out << " (at ?x" << i << " pos" << i << ")";
        out << ")\n    :effect (and";
        for (int i = 1; i <= k; ++i)
            if (k + 1 - i != i)
                out << " (at ?x" << i << " pos" << k + 1 - i << ")";
        for (int i = 1; i <= k; ++i)
            if (k + 1 - i != i)
                out << " (not (at ?x" << i << " pos" << i << "))";
        out << "))";
    }
    out << ")\n";
    return out.str();
}

string cell_name(int r, int c) {
    return "p-" + std::to_string(r + 1) + "-" + std::to_string(c + 1);
}

string npuzzle_problem(const string &name, int side,
                       const vector<int> &board) {
    // board[cell] = tile number, 0 for the blank
    ostringstream out;
    out << "(define (problem " << name << ")\n  (:domain npuzzle)\n"
        << "  (:objects";
    for (int t = 1; t < side * side; ++t)
        out << " t" << t;
    out << " - tile\n   ";
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            out << " " << cell_name(r, c);
    out << " - position)\n  (:init";
    for (int cell = 0; cell < side * side; ++cell) {
        string p = cell_name(cell / side, cell % side);
        if (board[cell] == 0)
            out << "\n    (blank " << p << ")";
        else
            out << "\n    (at t" << board[cell] << " " << p << ")";
    }
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int dr[] = {-1, 1, 0, 0};
            const int dc[] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                int rr = r + dr[d], cc = c + dc[d];
                if (rr >= 0 && rr < side && cc >= 0 && cc < side)
                    out << "\n    (neighbor " << cell_name(r, c) << " "
                        << cell_name(rr, cc) << ")";
            }
        }
    out << ")\n  (:goal (and";
    for (int cell = 1; cell < side * side; ++cell)
        out << "\n    (at t" << cell << " "
            << cell_name(cell / side, cell % side) << ")";
    out << ")))\n";
    return out.str();
}

vector<int> npuzzle_walk(int side, int length, Rng &rng) {
    vector<int> board(side * side);
    iota(board.begin(), board.end(), 0);
    int blank = 0;
    vector<int> moves;
    for (int step = 0; step < length; ++step) {
        moves.clear();
        int r = blank / side, c = blank % side;
        if (r > 0)
            moves.push_back(blank - side);
        if (r + 1 < side)
            moves.push_back(blank + side);
        if (c > 0)
            moves.push_back(blank - 1);
        if (c + 1 < side)
            moves.push_back(blank + 1);
        uniform_int_distribution<size_t> pick(0, moves.size() - 1);
        int target = moves[pick(rng)];
        swap(board[blank], board[target]);
        blank = target;
    }
    return board;
}

string pancake_problem(const string &name, const vector<int> &stack) {
    const int n = static_cast<int>(stack.size());
    ostringstream out;
    out << "(define (problem " << name << ")\n  (:domain pancake-" << n
        << ")\n  (:objects";
    for (int i = 1; i <= n; ++i)
        out << " c" << i;
    out << " - pancake)\n  (:init";
    for (int pos = 0; pos < n; ++pos)
        out << "\n    (at c" << stack[pos] << " pos" << pos + 1 << ")";
    out << ")\n  (:goal (and";
    for (int i = 1; i <= n; ++i)
        out << "\n    (at c" << i << " pos" << i << ")";
    out << ")))\n";
    return out.str();
}

using Towers = vector<vector<int>>;

/*
  Uniform over all partitions of the blocks into towers: the number of
  configurations with k towers is the Lah number L(n, k); a uniform
  permutation cut at k - 1 uniform gaps hits each of them equally often.
*/
Towers random_towers(int n, Rng &rng) {
    vector<double> lah(n + 1, 0.0);
    // L(n, 1) = n!, L(n, k + 1) = L(n, k) * (n - k) / (k * (k + 1))
    lah[1] = tgamma(n + 1.0);
    for (int k = 1; k < n; ++k)
        lah[k + 1] = lah[k] * (n - k) / (static_cast<double>(k) * (k + 1));
    discrete_distribution<int> pick_k(lah.begin(), lah.end());
    int k = pick_k(rng);
    vector<int> blocks(n);
    iota(blocks.begin(), blocks.end(), 1);
    shuffle(blocks.begin(), blocks.end(), rng);
    vector<int> gaps(n - 1);
    iota(gaps.begin(), gaps.end(), 1);
    shuffle(gaps.begin(), gaps.end(), rng);
    vector<int> cuts(gaps.begin(), gaps.begin() + (k - 1));
    cuts.push_back(n);
    sort(cuts.begin(), cuts.end());
    Towers towers;
    int begin = 0;
    for (int cut : cuts) {
        towers.emplace_back(blocks.begin() + begin, blocks.begin() + cut);
        begin = cut;
    }
    return towers;
}

// towers are listed bottom to top
void tower_atoms(ostream &out, const Towers &towers) {
    for (const vector<int> &tower : towers) {
        out << "\n    (ontable b" << tower.front() << ")";
        for (size_t i = 1; i < tower.size(); ++i)
            out << "\n    (on b" << tower[i] << " b" << tower[i - 1] << ")";
        out << "\n    (clear b" << tower.back() << ")";
    }
}

string blocks_problem(const string &name, int n, const Towers &init,
                      const Towers &goal) {
    ostringstream out;
    out << "(define (problem " << name << ")\n  (:domain blocksworld)\n"
        << "  (:objects";
    for (int i = 1; i <= n; ++i)
        out << " b" << i;
    out << " - block)\n  (:init\n    (handempty)";
    tower_atoms(out, init);
    out << ")\n  (:goal (and";
    for (const vector<int> &tower : goal) {
        out << "\n    (ontable b" << tower.front() << ")";
        for (size_t i = 1; i < tower.size(); ++i)
            out << "\n    (on b" << tower[i] << " b" << tower[i - 1] << ")";
    }
    out << ")))\n";
    return out.str();
}

string visitall_problem(const string &name, int side, int start) {
    ostringstream out;
    out << "(define (problem " << name << ")\n  (:domain visitall)\n"
        << "  (:objects";
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            out << " " << cell_name(r, c);
    out << " - cell)\n  (:init";
    string s = cell_name(start / side, start % side);
    out << "\n    (at-robot " << s << ")\n    (visited " << s << ")";
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            const int dr[] = {-1, 1, 0, 0};
            const int dc[] = {0, 0, -1, 1};
            for (int d = 0; d < 4; ++d) {
                int rr = r + dr[d], cc = c + dc[d];
                if (rr >= 0 && rr < side && cc >= 0 && cc < side)
                    out << "\n    (connected " << cell_name(r, c) << " "
                        << cell_name(rr, cc) << ")";
            }
        }
    out << ")\n  (:goal (and";
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            out << "\n    (visited " << cell_name(r, c) << ")";
    out << ")))\n";
    return out.str();
}

void check_size(BenchmarkDomain domain, int size) {
    int lo = 3, hi = 0;
    switch (domain) {
    case BenchmarkDomain::Npuzzle:
        hi = 6;
        break;
    case BenchmarkDomain::Pancake:
        hi = 14;
        break;
    case BenchmarkDomain::Blocks:
        hi = 25;
        break;
    case BenchmarkDomain::Visitall:
        lo = 2;
        hi = 12;
        break;
    }
    if (size < lo || size > hi)
        throw out_of_range(string(to_string(domain)) + " size must lie in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) +
                           "], got " + std::to_string(size));
}
}

string benchmark_domain_pddl(BenchmarkDomain domain, int size) {
    check_size(domain, size);
    switch (domain) {
    case BenchmarkDomain::Npuzzle:
        return NPUZZLE_DOMAIN;
    case BenchmarkDomain::Pancake:
        return pancake_domain(size);
    case BenchmarkDomain::Blocks:
        return BLOCKS_DOMAIN;
    case BenchmarkDomain::Visitall:
        return VISITALL_DOMAIN;
    }
    return "";
}

Benchmark gen_benchmark(BenchmarkDomain domain, int size, int count,
                        uint64_t seed) {
    check_size(domain, size);
    if (count < 0)
        throw out_of_range("instance count must be nonnegative");
    Benchmark bench;
    bench.domain = benchmark_domain_pddl(domain, size);
    for (int i = 0; i < count; ++i) {
        Rng rng = search_rng(seed, static_cast<uint64_t>(i));
        ostringstream name;
        name << to_string(domain) << "-" << size << "-" << setw(3)
             << setfill('0') << i + 1;
        GeneratedInstance inst;
        inst.name = name.str();
        switch (domain) {
        case BenchmarkDomain::Npuzzle:
            inst.problem = npuzzle_problem(
                inst.name, size, npuzzle_walk(size, 10 * size * size, rng));
            break;
        case BenchmarkDomain::Pancake: {
            vector<int> stack(size);
            iota(stack.begin(), stack.end(), 1);
            shuffle(stack.begin(), stack.end(), rng);
            inst.problem = pancake_problem(inst.name, stack);
            break;
        }
        case BenchmarkDomain::Blocks: {
            Towers init = random_towers(size, rng);
            Towers goal = random_towers(size, rng);
            inst.problem = blocks_problem(inst.name, size, init, goal);
            break;
        }
        case BenchmarkDomain::Visitall: {
            uniform_int_distribution<int> cell(0, size * size - 1);
            inst.problem = visitall_problem(inst.name, size, cell(rng));
            break;
        }
        }
        bench.instances.push_back(move(inst));
    }
    return bench;
}

optional<double> median(vector<double> values) {
    if (values.empty())
        return nullopt;
    sort(values.begin(), values.end());
    size_t n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

vector<ReportRow> report(const vector<RunRecord> &records) {
    vector<ReportRow> rows;
    map<pair<string, string>, size_t> position;
    vector<vector<const RunRecord *>> members;
    for (const RunRecord &r : records) {
        auto key = make_pair(r.domain, r.config);
        auto [it, inserted] = position.emplace(key, rows.size());
        if (inserted) {
            ReportRow row;
            row.domain = r.domain;
            row.config = r.config;
            rows.push_back(row);
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        ReportRow &row = rows[i];
        vector<double> expansions, rates, runtimes;
        for (const RunRecord *r : members[i]) {
            ++row.runs;
            if (r->status != SearchStatus::Solved)
                continue;
            ++row.solved;
            expansions.push_back(static_cast<double>(r->expansions));
            runtimes.push_back(r->total_time());
            if (r->search_time > 0)
                rates.push_back(r->expansions / r->search_time);
        }
        row.coverage = row.runs ? 100.0 * row.solved / row.runs : 0.0;
        row.median_expansions = median(expansions);
        row.median_expansions_per_second = median(rates);
        row.median_runtime = median(runtimes);
    }
    return rows;
}

namespace {
const char *EMPTY_CELL = "—";

string fixed_cell(const optional<double> &v, int precision) {
    if (!v)
        return EMPTY_CELL;
    ostringstream out;
    out << fixed << setprecision(precision) << *v;
    return out.str();
}

// display width, counting a UTF-8 sequence as one column
size_t display_width(const string &s) {
    size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xc0) != 0x80)
            ++n;
    return n;
}

string format_table(const vector<vector<string>> &table) {
    vector<size_t> widths;
    for (const auto &row : table)
        for (size_t c = 0; c < row.size(); ++c) {
            if (widths.size() <= c)
                widths.push_back(0);
            widths[c] = max(widths[c], display_width(row[c]));
        }
    ostringstream out;
    for (const auto &row : table) {
        for (size_t c = 0; c < row.size(); ++c) {
            string pad(widths[c] - display_width(row[c]), ' ');
            if (c < 2)
                out << row[c] << pad;
            else
                out << pad << row[c];
            if (c + 1 < row.size())
                out << "  ";
        }
        out << "\n";
    }
    return out.str();
}

bool is_baseline(const string &config) {
    return config == "blind" || config == "gc" || config == "ff";
}

bool beats(const ReportRow &a, const ReportRow &b) {
    if (a.coverage != b.coverage)
        return a.coverage > b.coverage;
    if (!a.median_expansions || !b.median_expansions)
        return false;
    return *a.median_expansions < *b.median_expansions;
}
}

string format_report_text(const vector<ReportRow> &rows) {
    vector<vector<string>> table;
    table.push_back({"domain", "config", "runs", "coverage", "med.exp",
                     "med.exp/s", "med.time"});
    for (const ReportRow &r : rows)
        table.push_back({r.domain, r.config, std::to_string(r.runs),
                         fixed_cell(r.coverage, 1),
                         fixed_cell(r.median_expansions, 1),
                         fixed_cell(r.median_expansions_per_second, 1),
                         fixed_cell(r.median_runtime, 3)});
    return format_table(table);
}

string format_report_csv(const vector<ReportRow> &rows) {
    ostringstream out;
    out << "domain,config,runs,solved,coverage,median_expansions,"
           "median_expansions_per_second,median_runtime\n";
    for (const ReportRow &r : rows)
        out << r.domain << "," << r.config << "," << r.runs << ","
            << r.solved << "," << fixed_cell(r.coverage, 1) << ","
            << fixed_cell(r.median_expansions, 1) << ","
            << fixed_cell(r.median_expansions_per_second, 1) << ","
            << fixed_cell(r.median_runtime, 3) << "\n";
    return out.str();
}

string format_ablation_pivot(const vector<ReportRow> &rows) {
    vector<string> configs, baselines;
    map<pair<string, string>, const ReportRow *> cell;
    for (const ReportRow &r : rows) {
        vector<string> &list = is_baseline(r.config) ? baselines : configs;
        if (find(list.begin(), list.end(), r.config) == list.end())
            list.push_back(r.config);
        cell[{r.config, r.domain}] = &r;
    }
    vector<vector<string>> table;
    vector<string> header{"config", "domains"};
    for (const string &b : baselines)
        header.push_back("> " + b);
    table.push_back(header);
    for (const string &c : configs) {
        int domains = 0;
        vector<int> wins(baselines.size(), 0);
        for (const auto &[key, row] : cell) {
            if (key.first != c)
                continue;
            ++domains;
            for (size_t b = 0; b < baselines.size(); ++b) {
                auto it = cell.find({baselines[b], key.second});
                if (it != cell.end() && beats(*row, *it->second))
                    ++wins[b];
            }
        }
        vector<string> line{c, std::to_string(domains)};
        for (int w : wins)
            line.push_back(std::to_string(w));
        table.push_back(line);
    }
    return format_table(table);
}

string record_to_json(const RunRecord &r) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["domain"] = r.domain;
    j["config"] = r.config;
    j["status"] = to_string(r.status);
    j["sampling_time"] = r.sampling_time;
    j["training_time"] = r.training_time;
    j["search_time"] = r.search_time;
    j["expansions"] = r.expansions;
    j["generated"] = r.generated;
    j["evaluations"] = r.evaluations;
    j["plan_length"] =
        r.plan_length ? nlohmann::json(*r.plan_length) : nlohmann::json();
    j["num_samples"] = r.num_samples;
    j["train_loss"] =
        r.train_loss ? nlohmann::json(*r.train_loss) : nlohmann::json();
    j["validation_loss"] = r.validation_loss
                               ? nlohmann::json(*r.validation_loss)
                               : nlohmann::json();
    j["error"] = r.error;
    if (!r.legs.empty()) {
        j["legs"] = nlohmann::json::array();
        for (const RunRecord &leg : r.legs)
            j["legs"].push_back(nlohmann::json::parse(record_to_json(leg)));
    }
    return j.dump();
}

namespace {
SearchStatus parse_status(const string &s) {
    if (s == "solved")
        return SearchStatus::Solved;
    if (s == "unsolvable")
        return SearchStatus::Unsolvable;
    if (s == "out-of-budget")
        return SearchStatus::OutOfBudget;
    throw invalid_argument("unknown status '" + s + "'");
}

RunRecord record_from(const nlohmann::json &j) {
    RunRecord r;
    r.instance = j.value("instance", "");
    r.domain = j.value("domain", "");
    r.config = j.value("config", "");
    r.status = parse_status(j.at("status").get<string>());
    r.sampling_time = j.value("sampling_time", 0.0);
    r.training_time = j.value("training_time", 0.0);
    r.search_time = j.value("search_time", 0.0);
    r.expansions = j.value("expansions", uint64_t{0});
    r.generated = j.value("generated", uint64_t{0});
    r.evaluations = j.value("evaluations", uint64_t{0});
    if (j.contains("plan_length") && !j["plan_length"].is_null())
        r.plan_length = j["plan_length"].get<int>();
    r.num_samples = j.value("num_samples", uint64_t{0});
    if (j.contains("train_loss") && !j["train_loss"].is_null())
        r.train_loss = j["train_loss"].get<double>();
    if (j.contains("validation_loss") && !j["validation_loss"].is_null())
        r.validation_loss = j["validation_loss"].get<double>();
    r.error = j.value("error", "");
    if (j.contains("legs"))
        for (const auto &leg : j["legs"])
            r.legs.push_back(record_from(leg));
    return r;
}

string csv_escape(const string &s) {
    if (s.find_first_of(",\"\n") == string::npos)
        return s;
    string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

vector<string> split_csv(const string &line) {
    vector<string> cells;
    string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

string opt_cell(const optional<double> &v) {
    if (!v)
        return "";
    ostringstream out;
    out << setprecision(17) << *v;
    return out.str();
}
}

RunRecord record_from_json(const string &line) {
    return record_from(nlohmann::json::parse(line));
}

string records_csv_header() {
    return "instance,domain,config,status,sampling_time,training_time,"
           "search_time,expansions,generated,evaluations,plan_length,"
           "num_samples,train_loss,validation_loss,error";
}

string record_to_csv(const RunRecord &r) {
    ostringstream out;
    out << setprecision(17) << csv_escape(r.instance) << ","
        << csv_escape(r.domain) << "," << csv_escape(r.config) << ","
        << to_string(r.status) << "," << r.sampling_time << ","
        << r.training_time << "," << r.search_time << "," << r.expansions
        << "," << r.generated << "," << r.evaluations << ","
        << (r.plan_length ? std::to_string(*r.plan_length) : "") << ","
        << r.num_samples << "," << opt_cell(r.train_loss) << ","
        << opt_cell(r.validation_loss) << "," << csv_escape(r.error);
    return out.str();
}

vector<RunRecord> read_records(istream &in) {
    vector<RunRecord> records;
    string line;
    bool csv = false;
    while (getline(in, line)) {
        if (line.empty())
            continue;
        if (line.rfind("instance,", 0) == 0) {
            csv = true;
            continue;
        }
        if (!csv) {
            records.push_back(record_from_json(line));
            continue;
        }
        vector<string> c = split_csv(line);
        if (c.size() != 15)
            throw invalid_argument("record CSV row has " +
                                   std::to_string(c.size()) + " cells");
        RunRecord r;
        r.instance = c[0];
        r.domain = c[1];
        r.config = c[2];
        r.status = parse_status(c[3]);
        r.sampling_time = stod(c[4]);
        r.training_time = stod(c[5]);
        r.search_time = stod(c[6]);
        r.expansions = stoull(c[7]);
        r.generated = stoull(c[8]);
        r.evaluations = stoull(c[9]);
        if (!c[10].empty())
            r.plan_length = stoi(c[10]);
        r.num_samples = stoull(c[11]);
        if (!c[12].empty())
            r.train_loss = stod(c[12]);
        if (!c[13].empty())
            r.validation_loss = stod(c[13]);
        r.error = c[14];
        records.push_back(move(r));
    }
    return records;
}
}
