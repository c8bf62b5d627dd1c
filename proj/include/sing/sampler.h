#ifndef SING_SAMPLER_H
#define SING_SAMPLER_H

#include "backward.h"
#include "timer.h"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sing {
enum class SearchStrategy {
    Dfs,
    RandomWalk
};

const char *to_string(SearchStrategy strategy);
SearchStrategy parse_search_strategy(const std::string &name);

struct NodeSample {
    FactSet node;
    int label = 0;
};

struct Sample {
    StateVector vector;
    int label = 0;
};

struct SamplerConfig {
    int nsearches = 500;
    int nsamples = 200;
    BackwardKind space = BackwardKind::Regression;
    SearchStrategy strategy = SearchStrategy::Dfs;
    Layout layout = Layout::Boolean;
    std::uint64_t seed = 1;
    // random walk only; 0 means nsamples
    int max_walk_length = 0;
    int threads = 1;

    // Throws std::invalid_argument.
    void validate() const;
};

struct TrainingSet {
    std::vector<Sample> samples;
    Layout layout = Layout::Boolean;
    int input_dim = 0;
    std::uint64_t fingerprint = 0;
};

class EmptyTrainingSet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SamplingTimeout : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/*
  Depth-first search from `start`. Successors are shuffled, nodes already
  seen are skipped, and every newly generated node is emitted with its
  depth. The start node is emitted first with label 0.
*/
std::vector<NodeSample> backward_dfs(const BackwardSpace &space,
                                     const FactSet &start, int nsamples,
                                     Rng &rng,
                                     const Deadline &deadline = {});

/*
  Random walk without duplicate detection; each step emits the reached
  node with the step count. Dead ends and walks reaching max_length restart
  from `start` (which is only emitted once).
*/
std::vector<NodeSample> backward_random_walk(const BackwardSpace &space,
                                             const FactSet &start,
                                             int nsamples, Rng &rng,
                                             int max_length = 0,
                                             const Deadline &deadline = {});

// Independent generator for search `index` of a run seeded with `seed`.
Rng search_rng(std::uint64_t seed, std::uint64_t index);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

TrainingSet generate_training_set(const StripsTask &task,
                                  const SamplerConfig &config,
                                  const Deadline &deadline = {});

void write_training_csv(std::ostream &out, const TrainingSet &set);
std::string training_metadata_json(const TrainingSet &set,
                                   const SamplerConfig &config);
TrainingSet read_training_csv(std::istream &csv, const std::string &metadata);
}

#endif
