#ifndef SING_EXPERIMENT_H
#define SING_EXPERIMENT_H

#include "nn.h"
#include "sampler.h"
#include "search.h"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sing {
// Either a PDDL domain/problem pair or an FD-format SAS+ file.
struct TaskSource {
    std::string domain_path;
    std::string problem_path;
    std::string sas_path;
};

std::string read_file(const std::string &path);
void write_file(const std::string &path, const std::string &contents);
StripsTask load_task(const TaskSource &source);

enum class PipelineMode {
    SingleInstance,
    TrainOnly,
    SolveWithModel
};

struct PipelineConfig {
    SamplerConfig sampler;
    nn::TrainConfig training;
    std::vector<int> hidden{16};
    HeuristicKind heuristic = HeuristicKind::Nn;
    Budget budget;
    PipelineMode mode = PipelineMode::SingleInstance;
    // SolveWithModel: the model to use; TrainOnly: where the model is left
    const nn::MlpModel *model = nullptr;
    std::uint64_t seed = 1;

    // Short identifier of the configuration, e.g. "regression-dfs-boolean-re".
    std::string id() const;
    void validate() const;
};

struct RunRecord {
    std::string instance;
    std::string domain;
    std::string config;
    double sampling_time = 0.0;
    double training_time = 0.0;
    double search_time = 0.0;
    SearchStatus status = SearchStatus::OutOfBudget;
    std::uint64_t expansions = 0;
    std::uint64_t generated = 0;
    std::uint64_t evaluations = 0;
    std::optional<int> plan_length;
    std::optional<Plan> plan;
    std::uint64_t num_samples = 0;
    std::optional<double> train_loss;
    std::optional<double> validation_loss;
    std::string error;
    // portfolio runs keep the records of their legs
    std::vector<RunRecord> legs;

    double total_time() const {
        return sampling_time + training_time + search_time;
    }
};

/*
  Sampling, training and search under one wall-clock budget. Each phase
  runs to completion; search gets whatever time is left. Module errors are
  recorded in the result, never thrown. With TrainOnly the trained model
  is written to `trained` when given.
*/
RunRecord run_pipeline(const StripsTask &task, const PipelineConfig &config,
                       nn::MlpModel *trained = nullptr);

/*
  Regression pipeline on half the budget; if it does not solve the task,
  the explicit pipeline runs on the remaining time.
*/
RunRecord run_portfolio(const StripsTask &task,
                        const PipelineConfig &regression,
                        const PipelineConfig &explicit_space,
                        double time_limit);

enum class BenchmarkDomain {
    Npuzzle,
    Pancake,
    Blocks,
    Visitall
};

const char *to_string(BenchmarkDomain domain);
BenchmarkDomain parse_benchmark_domain(const std::string &name);

struct GeneratedInstance {
    std::string name;
    std::string problem;
};

struct Benchmark {
    std::string domain;
    std::vector<GeneratedInstance> instances;
};

/*
  npuzzle: side 3-6, random walk of 10 * side^2 moves from the goal.
  pancake: 3-14 pancakes, uniform permutation. blocks: 3-25 blocks, uniform
  tower configurations for start and goal. visitall: 2-12 grid side,
  random start cell. Throws std::out_of_range on bad sizes.
*/
Benchmark gen_benchmark(BenchmarkDomain domain, int size, int count,
                        std::uint64_t seed);
std::string benchmark_domain_pddl(BenchmarkDomain domain, int size);

struct ReportRow {
    std::string domain;
    std::string config;
    int runs = 0;
    int solved = 0;
    double coverage = 0.0;
    std::optional<double> median_expansions;
    std::optional<double> median_expansions_per_second;
    std::optional<double> median_runtime;
};

std::optional<double> median(std::vector<double> values);

// One row per (domain, config), in order of first appearance.
std::vector<ReportRow> report(const std::vector<RunRecord> &records);
std::string format_report_text(const std::vector<ReportRow> &rows);
std::string format_report_csv(const std::vector<ReportRow> &rows);

/*
  For every learned configuration, the number of domains on which it beats
  each baseline heuristic (higher coverage, or equal coverage and lower
  median expansions).
*/
std::string format_ablation_pivot(const std::vector<ReportRow> &rows);

std::string record_to_json(const RunRecord &record);
RunRecord record_from_json(const std::string &line);
std::string records_csv_header();
std::string record_to_csv(const RunRecord &record);
std::vector<RunRecord> read_records(std::istream &in);
}

#endif
