#include "sing/experiment.h"
#include "sing/pddl.h"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace std;
using namespace sing;

namespace {
enum ExitCode {
    EXIT_OK = 0,
    EXIT_UNSOLVED = 1,
    EXIT_USAGE = 2,
    EXIT_INTERNAL = 3
};

struct Options {
    TaskSource source;
    string space = "regression";
    string walk = "dfs";
    string layout = "boolean";
    string loss = "re";
    int nsearches = 500;
    int nsamples = 200;
    int threads = 1;
    string hidden = "16";
    string heuristic = "nn";
    string model;
    string samples;
    string records;
    string benchmark;
    int size = 3;
    int count = 1;
    int epochs = 300;
    double learning_rate = 1e-3;
    double time_limit = 1800.0;
    uint64_t mem_limit = 8ull << 30;
    uint64_t seed = 1;
    string out;
    string plan_out;
};

void add_task_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--domain", o.source.domain_path, "PDDL domain file");
    cmd->add_option("--problem", o.source.problem_path, "PDDL problem file");
    cmd->add_option("--sas", o.source.sas_path, "SAS+ task (translator output)");
}

void add_sampler_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--space", o.space, "backward space")
        ->check(CLI::IsMember(
            {"explicit-original", "explicit-inverse", "regression"}));
    cmd->add_option("--walk", o.walk, "backward search")
        ->check(CLI::IsMember({"dfs", "rw"}));
    cmd->add_option("--layout", o.layout, "state vector layout")
        ->check(CLI::IsMember({"boolean", "sas"}));
    cmd->add_option("--nsearches", o.nsearches, "backward searches")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nsamples", o.nsamples, "samples per search")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", o.threads, "sampling threads")
        ->check(CLI::PositiveNumber);
}

void add_train_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--loss", o.loss, "training loss")
        ->check(CLI::IsMember({"re", "mse"}));
    cmd->add_option("--hidden", o.hidden, "hidden layer widths, W[,W...]");
    cmd->add_option("--epochs", o.epochs, "maximum training epochs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lr", o.learning_rate, "Adam learning rate")
        ->check(CLI::PositiveNumber);
}

void add_budget_flags(CLI::App *cmd, Options &o) {
    cmd->add_option("--time-limit", o.time_limit, "wall-clock seconds")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mem-limit", o.mem_limit, "memory cap in bytes")
        ->check(CLI::PositiveNumber);
}

vector<int> parse_widths(const string &text) {
    vector<int> widths;
    stringstream in(text);
    string item;
    while (getline(in, item, ',')) {
        size_t used = 0;
        int w = stoi(item, &used);
        if (used != item.size() || w < 1)
            throw invalid_argument("bad hidden width '" + item + "'");
        widths.push_back(w);
    }
    if (widths.empty())
        throw invalid_argument("at least one hidden layer is required");
    return widths;
}

SamplerConfig sampler_config(const Options &o) {
    SamplerConfig c;
    c.nsearches = o.nsearches;
    c.nsamples = o.nsamples;
    c.space = parse_backward_kind(o.space);
    c.strategy = parse_search_strategy(o.walk);
    c.layout = parse_layout(o.layout);
    c.seed = o.seed;
    c.threads = o.threads;
    return c;
}

PipelineConfig pipeline_config(const Options &o) {
    PipelineConfig c;
    c.sampler = sampler_config(o);
    c.training.loss = nn::parse_loss_kind(o.loss);
    c.training.max_epochs = o.epochs;
    c.training.learning_rate = o.learning_rate;
    c.hidden = parse_widths(o.hidden);
    c.heuristic = parse_heuristic_kind(o.heuristic);
    c.budget.time_limit = o.time_limit;
    c.budget.memory_limit = o.mem_limit;
    c.seed = o.seed;
    return c;
}

string instance_name(const TaskSource &s) {
    const string &path = s.sas_path.empty() ? s.problem_path : s.sas_path;
    return filesystem::path(path).stem().string();
}

string domain_name(const TaskSource &s) {
    if (s.domain_path.empty())
        return "sas";
    try {
        return pddl::parse_domain(read_file(s.domain_path)).name;
    } catch (const exception &) {
        return filesystem::path(s.domain_path).stem().string();
    }
}

nn::MlpModel load_model(const string &path) {
    return nn::deserialize_model(read_file(path));
}

// Appends the record as a JSON line to --out (or prints it) and writes the
// plan file when requested.
int emit_record(RunRecord record, const StripsTask &task, const Options &o) {
    record.instance = instance_name(o.source);
    record.domain = domain_name(o.source);
    string line = record_to_json(record);
    if (o.out.empty()) {
        cout << line << "\n";
    } else {
        ofstream out(o.out, ios::app);
        if (!out)
            throw runtime_error("cannot write '" + o.out + "'");
        out << line << "\n";
    }
    if (!record.error.empty())
        cerr << "note: " << record.error << "\n";
    if (record.status != SearchStatus::Solved)
        return EXIT_UNSOLVED;
    if (!o.plan_out.empty())
        write_file(o.plan_out, format_plan(task, *record.plan));
    else if (!o.out.empty())
        cout << format_plan(task, *record.plan);
    return EXIT_OK;
}

int cmd_ground(const Options &o) {
    StripsTask task = load_task(o.source);
    ostringstream summary;
    summary << "facts " << task.num_facts() << "\n"
            << "actions " << task.num_actions() << "\n"
            << "init " << task.init.size() << "\n"
            << "goal " << task.goal.size() << "\n";
    if (task.variables)
        summary << "variables " << task.variables->num_variables() << "\n";
    cout << summary.str();
    if (!o.out.empty()) {
        ostringstream listing;
        for (int f = 0; f < task.num_facts(); ++f)
            listing << "fact " << f << " " << task.fact_names[f] << "\n";
        for (int a = 0; a < task.num_actions(); ++a)
            listing << "action " << a << " " << task.actions[a].name << "\n";
        write_file(o.out, listing.str());
    }
    return EXIT_OK;
}

int cmd_sample(const Options &o) {
    if (o.out.empty())
        throw invalid_argument("sample needs --out");
    StripsTask task = load_task(o.source);
    SamplerConfig config = sampler_config(o);
    TrainingSet set = generate_training_set(task, config,
                                            Deadline::after(o.time_limit));
    ofstream csv(o.out);
    if (!csv)
        throw runtime_error("cannot write '" + o.out + "'");
    write_training_csv(csv, set);
    write_file(o.out + ".json", training_metadata_json(set, config));
    cout << set.samples.size() << " samples written to " << o.out << "\n";
    return EXIT_OK;
}

int cmd_train(const Options &o) {
    if (o.samples.empty() || o.out.empty())
        throw invalid_argument("train needs --samples and --out");
    ifstream csv(o.samples);
    if (!csv)
        throw runtime_error("cannot open '" + o.samples + "'");
    TrainingSet set = read_training_csv(csv, read_file(o.samples + ".json"));
    if (set.samples.empty())
        throw EmptyTrainingSet("training file holds no samples");
    nn::TrainConfig config;
    config.loss = nn::parse_loss_kind(o.loss);
    config.max_epochs = o.epochs;
    config.learning_rate = o.learning_rate;
    config.seed = mix_seed(o.seed, 3);
    Rng rng(mix_seed(o.seed, 2));
    nn::MlpModel model =
        nn::init_network(set.input_dim, parse_widths(o.hidden), rng,
                         set.layout);
    auto [trained, report] =
        nn::train(move(model), set, config, Deadline::after(o.time_limit));
    write_file(o.out, nn::serialize_model(trained));
    cout << "epochs " << report.train_loss.size() << " selected "
         << report.selected_epoch << " validation loss "
         << report.validation_loss[report.selected_epoch] << "\n";
    return EXIT_OK;
}

int cmd_solve(const Options &o) {
    StripsTask task = load_task(o.source);
    PipelineConfig config;
    config.heuristic = parse_heuristic_kind(o.heuristic);
    config.budget.time_limit = o.time_limit;
    config.budget.memory_limit = o.mem_limit;
    optional<nn::MlpModel> model;
    if (config.heuristic == HeuristicKind::Nn) {
        if (o.model.empty())
            throw invalid_argument("the nn heuristic needs --model");
        model = load_model(o.model);
        config.mode = PipelineMode::SolveWithModel;
        config.model = &*model;
    }
    RunRecord record = run_pipeline(task, config);
    record.config = o.model.empty() ? config.id() : "model";
    return emit_record(move(record), task, o);
}

int cmd_pipeline(const Options &o) {
    StripsTask task = load_task(o.source);
    PipelineConfig config = pipeline_config(o);
    if (!o.model.empty() && config.heuristic == HeuristicKind::Nn) {
        nn::MlpModel trained;
        config.mode = PipelineMode::TrainOnly;
        RunRecord record = run_pipeline(task, config, &trained);
        if (!record.error.empty())
            throw runtime_error(record.error);
        write_file(o.model, nn::serialize_model(trained));
        cout << "model written to " << o.model << "\n";
        return EXIT_OK;
    }
    return emit_record(run_pipeline(task, config), task, o);
}

int cmd_portfolio(const Options &o) {
    StripsTask task = load_task(o.source);
    PipelineConfig regression = pipeline_config(o);
    regression.heuristic = HeuristicKind::Nn;
    regression.sampler.space = BackwardKind::Regression;
    PipelineConfig explicit_space = regression;
    explicit_space.sampler.space = BackwardKind::ExplicitInverse;
    return emit_record(
        run_portfolio(task, regression, explicit_space, o.time_limit), task,
        o);
}

int cmd_gen(const Options &o) {
    if (o.out.empty())
        throw invalid_argument("gen needs --out DIR");
    BenchmarkDomain domain = parse_benchmark_domain(o.benchmark);
    Benchmark bench = gen_benchmark(domain, o.size, o.count, o.seed);
    filesystem::create_directories(o.out);
    filesystem::path dir(o.out);
    write_file((dir / "domain.pddl").string(), bench.domain);
    for (const GeneratedInstance &inst : bench.instances)
        write_file((dir / (inst.name + ".pddl")).string(), inst.problem);
    cout << bench.instances.size() << " instances written to " << o.out
         << "\n";
    return EXIT_OK;
}

int cmd_report(const Options &o) {
    ifstream in(o.records);
    if (!in)
        throw runtime_error("cannot open '" + o.records + "'");
    vector<RunRecord> records = read_records(in);
    if (records.empty())
        throw invalid_argument("no records in '" + o.records + "'");
    vector<ReportRow> rows = report(records);
    cout << format_report_text(rows) << "\n" << format_ablation_pivot(rows);
    if (!o.out.empty())
        write_file(o.out, format_report_csv(rows));
    return EXIT_OK;
}
}

int main(int argc, char **argv) {
    CLI::App app{"Learned-heuristic planner: backward sampling, MLP "
                 "training and greedy best-first search"};
    app.require_subcommand(1);
    Options o;

    auto *ground = app.add_subcommand("ground", "ground a task, print sizes");
    add_task_flags(ground, o);
    ground->add_option("--out", o.out, "write fact and action listing");

    auto *sample = app.add_subcommand("sample", "generate training data");
    add_task_flags(sample, o);
    add_sampler_flags(sample, o);
    sample->add_option("--seed", o.seed, "root seed");
    sample->add_option("--time-limit", o.time_limit, "wall-clock seconds");
    sample->add_option("--out", o.out, "training CSV (metadata in OUT.json)");

    auto *train = app.add_subcommand("train", "train a model on samples");
    train->add_option("--samples", o.samples, "training CSV")->required();
    add_train_flags(train, o);
    train->add_option("--seed", o.seed, "root seed");
    train->add_option("--time-limit", o.time_limit, "wall-clock seconds");
    train->add_option("--out", o.out, "model file")->required();

    auto *solve = app.add_subcommand("solve", "greedy best-first search");
    add_task_flags(solve, o);
    solve->add_option("--heuristic", o.heuristic, "heuristic")
        ->check(CLI::IsMember({"nn", "blind", "gc", "ff"}));
    solve->add_option("--model", o.model, "model file (nn heuristic)");
    add_budget_flags(solve, o);
    solve->add_option("--seed", o.seed, "accepted for symmetry; unused");
    solve->add_option("--out", o.out, "append the run record (JSON line)");
    solve->add_option("--plan", o.plan_out, "plan file");

    auto *pipeline =
        app.add_subcommand("pipeline", "sample, train and search in one budget");
    add_task_flags(pipeline, o);
    add_sampler_flags(pipeline, o);
    add_train_flags(pipeline, o);
    add_budget_flags(pipeline, o);
    pipeline->add_option("--heuristic", o.heuristic, "heuristic")
        ->check(CLI::IsMember({"nn", "blind", "gc", "ff"}));
    pipeline->add_option("--model", o.model,
                         "train only and write the model here");
    pipeline->add_option("--seed", o.seed, "root seed");
    pipeline->add_option("--out", o.out, "append the run record (JSON line)");
    pipeline->add_option("--plan", o.plan_out, "plan file");

    auto *portfolio = app.add_subcommand(
        "portfolio", "regression pipeline, then explicit-inverse pipeline");
    add_task_flags(portfolio, o);
    portfolio->add_option("--walk", o.walk, "backward search")
        ->check(CLI::IsMember({"dfs", "rw"}));
    portfolio->add_option("--layout", o.layout, "state vector layout")
        ->check(CLI::IsMember({"boolean", "sas"}));
    portfolio->add_option("--nsearches", o.nsearches, "backward searches");
    portfolio->add_option("--nsamples", o.nsamples, "samples per search");
    portfolio->add_option("--threads", o.threads, "sampling threads");
    add_train_flags(portfolio, o);
    add_budget_flags(portfolio, o);
    portfolio->add_option("--seed", o.seed, "root seed");
    portfolio->add_option("--out", o.out, "append the run record (JSON line)");
    portfolio->add_option("--plan", o.plan_out, "plan file");

    auto *gen = app.add_subcommand("gen", "generate benchmark instances");
    gen->add_option("--benchmark", o.benchmark, "instance family")
        ->check(CLI::IsMember({"npuzzle", "pancake", "blocks", "visitall"}))
        ->required();
    gen->add_option("--size", o.size, "instance size")->required();
    gen->add_option("--count", o.count, "number of instances");
    gen->add_option("--seed", o.seed, "generator seed");
    gen->add_option("--out", o.out, "output directory")->required();

    auto *rep = app.add_subcommand("report", "aggregate run records");
    rep->add_option("--records", o.records, "JSON-lines or CSV records")
        ->required();
    rep->add_option("--out", o.out, "write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? EXIT_OK : EXIT_USAGE;
    }

    try {
        if (*ground)
            return cmd_ground(o);
        if (*sample)
            return cmd_sample(o);
        if (*train)
            return cmd_train(o);
        if (*solve)
            return cmd_solve(o);
        if (*pipeline)
            return cmd_pipeline(o);
        if (*portfolio)
            return cmd_portfolio(o);
        if (*gen)
            return cmd_gen(o);
        if (*rep)
            return cmd_report(o);
    } catch (const invalid_argument &e) {
        cerr << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const out_of_range &e) {
        cerr << "error: " << e.what() << "\n";
        return EXIT_USAGE;
    } catch (const exception &e) {
        cerr << "error: " << e.what() << "\n";
        return EXIT_INTERNAL;
    }
    return EXIT_USAGE;
}
