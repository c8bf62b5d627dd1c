#include "sing/sampler.h"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

using namespace std;

namespace sing {
const char *to_string(SearchStrategy strategy) {
    return strategy == SearchStrategy::Dfs ? "dfs" : "rw";
}

SearchStrategy parse_search_strategy(const string &name) {
    if (name == "dfs")
        return SearchStrategy::Dfs;
    if (name == "rw" || name == "random-walk")
        return SearchStrategy::RandomWalk;
    throw invalid_argument("unknown backward search '" + name + "'");
}

void SamplerConfig::validate() const {
    if (nsearches <= 0 || nsamples <= 0)
        throw invalid_argument("nsearches and nsamples must be positive");
    if (max_walk_length < 0)
        throw invalid_argument("max walk length must be nonnegative");
    if (threads <= 0)
        throw invalid_argument("thread count must be positive");
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Rng search_rng(uint64_t seed, uint64_t index) {
    return Rng(mix_seed(seed, index));
}

static constexpr int DEADLINE_CHECK_INTERVAL = 64;

vector<NodeSample> backward_dfs(const BackwardSpace &space,
                                const FactSet &start, int nsamples, Rng &rng,
                                const Deadline &deadline) {
    vector<NodeSample> out;
    if (nsamples <= 0)
        return out;
    unordered_set<FactSet, FactSetHash> seen;
    seen.insert(start);
    out.push_back({start, 0});

    struct Frame {
        vector<FactSet> children;
        size_t next = 0;
        int depth = 0;
    };
    vector<Frame> stack;
    vector<FactSet> succ;
    int expansions = 0;

    auto expand = [&](const FactSet &node, int depth) {
        space.successors(node, succ);
        shuffle(succ.begin(), succ.end(), rng);
        Frame frame;
        frame.depth = depth;
        for (FactSet &s : succ) {
            if (static_cast<int>(out.size()) >= nsamples)
                break;
            if (!seen.insert(s).second)
                continue;
            out.push_back({s, depth + 1});
            frame.children.push_back(move(s));
        }
        stack.push_back(move(frame));
    };

    expand(start, 0);
    while (!stack.empty() && static_cast<int>(out.size()) < nsamples) {
        if (++expansions % DEADLINE_CHECK_INTERVAL == 0 && deadline.expired())
            break;
        Frame &top = stack.back();
        if (top.next == top.children.size()) {
            stack.pop_back();
            continue;
        }
        FactSet child = top.children[top.next++];
        expand(child, top.depth + 1);
    }
    return out;
}

vector<NodeSample> backward_random_walk(const BackwardSpace &space,
                                        const FactSet &start, int nsamples,
                                        Rng &rng, int max_length,
                                        const Deadline &deadline) {
    vector<NodeSample> out;
    if (nsamples <= 0)
        return out;
    if (max_length <= 0)
        max_length = nsamples;
    out.push_back({start, 0});
    FactSet node = start;
    int step = 0;
    vector<FactSet> succ;
    int iterations = 0;
    while (static_cast<int>(out.size()) < nsamples) {
        if (++iterations % DEADLINE_CHECK_INTERVAL == 0 && deadline.expired())
            break;
        if (step >= max_length) {
            node = start;
            step = 0;
        }
        space.successors(node, succ);
        if (succ.empty()) {
            if (step == 0)
                break;
            node = start;
            step = 0;
            continue;
        }
        uniform_int_distribution<size_t> pick(0, succ.size() - 1);
        node = move(succ[pick(rng)]);
        ++step;
        out.push_back({node, step});
    }
    return out;
}

namespace {
struct LabeledNodeHash {
    size_t operator()(const NodeSample &s) const {
        return s.node.hash() * 31 + static_cast<size_t>(s.label);
    }
};

struct LabeledNodeEq {
    bool operator()(const NodeSample &a, const NodeSample &b) const {
        return a.label == b.label && a.node == b.node;
    }
};
}

TrainingSet generate_training_set(const StripsTask &task,
                                  const SamplerConfig &config,
                                  const Deadline &deadline) {
    config.validate();
    if (config.layout == Layout::Multivalued &&
        config.space == BackwardKind::Regression)
        throw UnsupportedEncoding(
            "regression nodes are partial states and have no multivalued "
            "encoding");
    const int input_dim = encoded_length(task, config.layout);

    BackwardSpace space(task, config.space);
    vector<vector<NodeSample>> results(config.nsearches);
    vector<char> failed(config.nsearches, 0);

    auto run_search = [&](int index) {
        if (deadline.expired())
            return;
        Rng rng = search_rng(config.seed, static_cast<uint64_t>(index));
        FactSet start;
        try {
            start = space.start(rng);
        } catch (const GoalCompletionFailure &) {
            failed[index] = 1;
            return;
        }
        if (config.strategy == SearchStrategy::Dfs)
            results[index] =
                backward_dfs(space, start, config.nsamples, rng, deadline);
        else
            results[index] = backward_random_walk(
                space, start, config.nsamples, rng, config.max_walk_length,
                deadline);
    };

    const int workers = min(config.threads, config.nsearches);
    if (workers <= 1) {
        for (int i = 0; i < config.nsearches; ++i)
            run_search(i);
    } else {
        atomic<int> next{0};
        vector<jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < config.nsearches; i = next++)
                    run_search(i);
            });
    }
    if (deadline.expired())
        throw SamplingTimeout("sampling exceeded its time budget");
    if (all_of(failed.begin(), failed.end(), [](char f) { return f != 0; }))
        throw GoalCompletionFailure("goal completion failed in every search");

    TrainingSet set;
    set.layout = config.layout;
    set.input_dim = input_dim;
    set.fingerprint = task.fingerprint();
    unordered_set<NodeSample, LabeledNodeHash, LabeledNodeEq> kept;
    for (vector<NodeSample> &search : results) {
        for (NodeSample &s : search) {
            if (!kept.insert(s).second)
                continue;
            Sample sample;
            sample.vector = encode_state(s.node, config.layout, task);
            sample.label = s.label;
            set.samples.push_back(move(sample));
        }
        search.clear();
        search.shrink_to_fit();
    }
    if (set.samples.empty())
        throw EmptyTrainingSet("backward search produced no samples");
    return set;
}

void write_training_csv(ostream &out, const TrainingSet &set) {
    out << "label";
    for (int i = 0; i < set.input_dim; ++i)
        out << ",x" << i;
    out << "\n";
    for (const Sample &s : set.samples) {
        out << s.label;
        for (float v : s.vector.values)
            out << "," << static_cast<long long>(v);
        out << "\n";
    }
}

string training_metadata_json(const TrainingSet &set,
                              const SamplerConfig &config) {
    nlohmann::json meta;
    meta["layout"] = to_string(set.layout);
    meta["input_dim"] = set.input_dim;
    meta["num_samples"] = set.samples.size();
    ostringstream fp;
    fp << hex << set.fingerprint;
    meta["fingerprint"] = fp.str();
    meta["config"] = {
        {"nsearches", config.nsearches},
        {"nsamples", config.nsamples},
        {"space", to_string(config.space)},
        {"strategy", to_string(config.strategy)},
        {"layout", to_string(config.layout)},
        {"seed", config.seed},
        {"max_walk_length", config.max_walk_length},
    };
    return meta.dump(2);
}

TrainingSet read_training_csv(istream &csv, const string &metadata) {
    nlohmann::json meta = nlohmann::json::parse(metadata);
    TrainingSet set;
    set.layout = parse_layout(meta.at("layout").get<string>());
    set.input_dim = meta.at("input_dim").get<int>();
    set.fingerprint =
        stoull(meta.at("fingerprint").get<string>(), nullptr, 16);
    string line;
    if (!getline(csv, line) || line.rfind("label", 0) != 0)
        throw invalid_argument("training CSV lacks a header row");
    while (getline(csv, line)) {
        if (line.empty())
            continue;
        Sample s;
        s.vector.layout = set.layout;
        s.vector.values.reserve(set.input_dim);
        istringstream row(line);
        string cell;
        getline(row, cell, ',');
        s.label = stoi(cell);
        while (getline(row, cell, ','))
            s.vector.values.push_back(stof(cell));
        if (static_cast<int>(s.vector.values.size()) != set.input_dim)
            throw invalid_argument("training CSV row has " +
                                   std::to_string(s.vector.values.size()) +
                                   " entries, expected " +
                                   std::to_string(set.input_dim));
        set.samples.push_back(move(s));
    }
    return set;
}
}
