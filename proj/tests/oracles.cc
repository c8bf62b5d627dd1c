#include "oracles.h"

#include "sing/pddl.h"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace std;
using namespace sing;

namespace oracle {
StripsTask make_task(int num_facts, const vector<ActionSpec> &actions,
                     const vector<int> &init, const vector<int> &goal) {
    StripsTask task;
    for (int f = 0; f < num_facts; ++f)
        task.fact_names.push_back("f" + to_string(f));
    for (size_t a = 0; a < actions.size(); ++a) {
        Action act;
        act.name = "a" + to_string(a);
        act.pre = actions[a].pre;
        act.add = actions[a].add;
        act.del = actions[a].del;
        act.normalize();
        task.actions.push_back(act);
    }
    task.init = init;
    task.goal = goal;
    sort(task.init.begin(), task.init.end());
    sort(task.goal.begin(), task.goal.end());
    return task;
}

Board goal_board() {
    Board b;
    for (int i = 0; i < 9; ++i)
        b[i] = static_cast<uint8_t>(i);
    return b;
}

vector<Board> board_neighbors(const Board &b) {
    int blank = static_cast<int>(find(b.begin(), b.end(), 0) - b.begin());
    int r = blank / 3, c = blank % 3;
    vector<Board> out;
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int d = 0; d < 4; ++d) {
        int rr = r + dr[d], cc = c + dc[d];
        if (rr < 0 || rr > 2 || cc < 0 || cc > 2)
            continue;
        Board n = b;
        swap(n[blank], n[rr * 3 + cc]);
        out.push_back(n);
    }
    return out;
}

uint32_t rank(const Board &b) {
    // Lehmer code
    static const uint32_t fact[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    uint32_t r = 0;
    for (int i = 0; i < 9; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < 9; ++j)
            if (b[j] < b[i])
                ++smaller;
        r += smaller * fact[8 - i];
    }
    return r;
}

vector<int> bfs_distances(const Board &from) {
    vector<int> dist(362880, -1);
    deque<Board> queue{from};
    dist[rank(from)] = 0;
    while (!queue.empty()) {
        Board b = queue.front();
        queue.pop_front();
        int d = dist[rank(b)];
        for (const Board &n : board_neighbors(b)) {
            uint32_t k = rank(n);
            if (dist[k] == -1) {
                dist[k] = d + 1;
                queue.push_back(n);
            }
        }
    }
    return dist;
}

static string cell(int c) {
    return "p-" + to_string(c / 3 + 1) + "-" + to_string(c % 3 + 1);
}

StripsTask npuzzle_task_from_pddl(const string &problem) {
    string domain = benchmark_domain_pddl(BenchmarkDomain::Npuzzle, 3);
    auto [d, p] = pddl::parse_pddl(domain, problem);
    return pddl::ground(d, p);
}

StripsTask npuzzle_task(const Board &init) {
    ostringstream out;
    out << "(define (problem p) (:domain npuzzle) (:objects";
    for (int t = 1; t < 9; ++t)
        out << " t" << t;
    out << " - tile";
    for (int c = 0; c < 9; ++c)
        out << " " << cell(c);
    out << " - position) (:init";
    for (int c = 0; c < 9; ++c) {
        if (init[c] == 0)
            out << " (blank " << cell(c) << ")";
        else
            out << " (at t" << int(init[c]) << " " << cell(c) << ")";
        for (int n = 0; n < 9; ++n) {
            int dr = abs(n / 3 - c / 3), dc = abs(n % 3 - c % 3);
            if (dr + dc == 1)
                out << " (neighbor " << cell(c) << " " << cell(n) << ")";
        }
    }
    out << ") (:goal (and";
    for (int t = 1; t < 9; ++t)
        out << " (at t" << t << " " << cell(t) << ")";
    out << ")))";
    return npuzzle_task_from_pddl(out.str());
}

optional<Board> board_of(const StripsTask &task, const FactSet &state) {
    Board b;
    array<int, 9> seen{};
    for (int f : state.indices()) {
        const string &name = task.fact_names[f];
        int tile = 0;
        string pos;
        if (name.rfind("(blank ", 0) == 0) {
            pos = name.substr(7, name.size() - 8);
        } else if (name.rfind("(at t", 0) == 0) {
            size_t sp = name.find(' ', 5);
            tile = stoi(name.substr(5, sp - 5));
            pos = name.substr(sp + 1, name.size() - sp - 2);
        } else {
            continue;
        }
        int c = (pos[2] - '1') * 3 + (pos[4] - '1');
        if (seen[c]++)
            return nullopt;
        b[c] = static_cast<uint8_t>(tile);
    }
    for (int c = 0; c < 9; ++c)
        if (seen[c] != 1)
            return nullopt;
    array<int, 9> tiles{};
    for (uint8_t t : b)
        if (tiles[t]++)
            return nullopt;
    return b;
}

FactSet state_of(const StripsTask &task, const Board &board) {
    map<string, int> index;
    for (int f = 0; f < task.num_facts(); ++f)
        index[task.fact_names[f]] = f;
    FactSet s(task.num_facts());
    for (int c = 0; c < 9; ++c) {
        string name = board[c] == 0
                          ? "(blank " + cell(c) + ")"
                          : "(at t" + to_string(board[c]) + " " + cell(c) + ")";
        s.set(index.at(name));
    }
    return s;
}

StripsTask bench_task(BenchmarkDomain domain, int size, uint64_t seed) {
    Benchmark b = gen_benchmark(domain, size, 1, seed);
    auto [d, p] = pddl::parse_pddl(b.domain, b.instances[0].problem);
    return pddl::ground(d, p);
}

StripsTask blocks_task(int blocks, uint64_t seed) {
    return bench_task(BenchmarkDomain::Blocks, blocks, seed);
}

int fact_index(const StripsTask &task, const string &name) {
    auto it = find(task.fact_names.begin(), task.fact_names.end(), name);
    if (it == task.fact_names.end())
        throw out_of_range("no fact " + name);
    return static_cast<int>(it - task.fact_names.begin());
}

int count_blocks_actions(int n) {
    // pick-up(x), put-down(x), stack(x,y), unstack(x,y) with x != y
    int count = 0;
    for (int x = 0; x < n; ++x) {
        count += 2;
        for (int y = 0; y < n; ++y)
            if (x != y)
                count += 2;
    }
    return count;
}

pair<int, int> count_npuzzle_atoms_and_moves(int side) {
    const int cells = side * side, tiles = cells - 1;
    int facts = tiles * cells + cells;
    int moves = 0;
    for (int t = 0; t < tiles; ++t)
        for (int from = 0; from < cells; ++from)
            for (int to = 0; to < cells; ++to) {
                int dr = abs(from / side - to / side);
                int dc = abs(from % side - to % side);
                if (dr + dc == 1)
                    ++moves;
            }
    return {facts, moves};
}

optional<int> min_relaxed_plan(const StripsTask &task, const FactSet &state) {
    const int n = task.num_actions();
    optional<int> best;
    const vector<int> start = state.indices();
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        int size = __builtin_popcount(mask);
        if (best && size >= *best)
            continue;
        set<int> reached(start.begin(), start.end());
        bool changed = true;
        while (changed) {
            changed = false;
            for (int a = 0; a < n; ++a) {
                if (!(mask >> a & 1))
                    continue;
                const Action &act = task.actions[a];
                bool ok = all_of(act.pre.begin(), act.pre.end(),
                                 [&](int p) { return reached.count(p); });
                if (!ok)
                    continue;
                for (int f : act.add)
                    changed |= reached.insert(f).second;
            }
        }
        bool goal = all_of(task.goal.begin(), task.goal.end(),
                           [&](int g) { return reached.count(g); });
        if (goal)
            best = size;
    }
    return best;
}

StripsTask random_task(int max_facts, int max_actions, uint64_t seed) {
    mt19937_64 rng(seed);
    auto uniform = [&](int lo, int hi) {
        return uniform_int_distribution<int>(lo, hi)(rng);
    };
    int nf = uniform(1, max_facts);
    int na = uniform(1, max_actions);
    auto subset = [&](double p) {
        vector<int> s;
        for (int f = 0; f < nf; ++f)
            if (bernoulli_distribution(p)(rng))
                s.push_back(f);
        return s;
    };
    vector<ActionSpec> actions;
    for (int a = 0; a < na; ++a) {
        ActionSpec spec{subset(0.25), subset(0.3), subset(0.2)};
        if (spec.add.empty())
            spec.add.push_back(uniform(0, nf - 1));
        actions.push_back(spec);
    }
    vector<int> init = subset(0.3);
    vector<int> goal = subset(0.35);
    if (goal.empty())
        goal.push_back(uniform(0, nf - 1));
    return make_task(nf, actions, init, goal);
}

BlindResult blind_fifo(const StripsTask &task) {
    using Facts = vector<int>;
    auto goal_ok = [&](const set<int> &s) {
        return all_of(task.goal.begin(), task.goal.end(),
                      [&](int g) { return s.count(g) > 0; });
    };
    set<int> init(task.init.begin(), task.init.end());
    map<Facts, int> depth;
    deque<set<int>> queue{init};
    depth[Facts(init.begin(), init.end())] = 0;
    BlindResult result;
    while (!queue.empty()) {
        set<int> s = queue.front();
        queue.pop_front();
        int d = depth[Facts(s.begin(), s.end())];
        if (goal_ok(s)) {
            result.solved = true;
            result.plan_length = d;
            return result;
        }
        ++result.expansions;
        for (const Action &a : task.actions) {
            bool ok = all_of(a.pre.begin(), a.pre.end(),
                             [&](int p) { return s.count(p) > 0; });
            if (!ok)
                continue;
            set<int> t = s;
            for (int f : a.del)
                t.erase(f);
            for (int f : a.add)
                t.insert(f);
            Facts key(t.begin(), t.end());
            if (depth.emplace(key, d + 1).second)
                queue.push_back(move(t));
        }
    }
    return result;
}
}

namespace oracle {
double naive_forward(const nn::MlpModel &model, const vector<float> &x,
                     vector<char> *pattern) {
    vector<double> cur(x.begin(), x.end());
    if (pattern)
        pattern->clear();
    for (size_t l = 0; l < model.layers.size(); ++l) {
        const nn::DenseLayer &layer = model.layers[l];
        vector<double> next(layer.outputs);
        for (int o = 0; o < layer.outputs; ++o) {
            double z = layer.biases[o];
            for (int i = 0; i < layer.inputs; ++i)
                z += layer.weight(o, i) * cur[i];
            bool hidden = l + 1 < model.layers.size();
            if (hidden && pattern)
                pattern->push_back(z > 0);
            next[o] = hidden ? max(z, 0.0) : z;
        }
        cur = move(next);
    }
    return cur[0];
}

namespace {
struct Signature {
    vector<char> pattern;
    vector<char> signs;
    bool operator==(const Signature &) const = default;
};

double batch_loss(const nn::MlpModel &model, const vector<vector<float>> &xs,
                  const vector<double> &ys, nn::LossKind kind,
                  Signature &sig) {
    sig = {};
    vector<double> preds;
    vector<char> pattern;
    for (size_t i = 0; i < xs.size(); ++i) {
        double p = naive_forward(model, xs[i], &pattern);
        sig.pattern.insert(sig.pattern.end(), pattern.begin(), pattern.end());
        sig.signs.push_back(p > ys[i]);
        preds.push_back(p);
    }
    return nn::loss(preds, ys, kind);
}
}

GradientCheck check_gradients(int input_dim, const vector<int> &hidden,
                              nn::LossKind kind, uint64_t seed) {
    constexpr double STEP = 1e-4;
    GradientCheck result;
    mt19937_64 rng(seed);
    for (int attempt = 0;; ++attempt) {
        if (attempt > 200)
            throw runtime_error("gradient check: no kink-free draw found");
        nn::MlpModel model = nn::init_network(input_dim, hidden, rng);
        // nonzero biases so units are not all decided by the inputs alone
        for (auto &layer : model.layers)
            for (double &b : layer.biases)
                b = uniform_real_distribution<double>(-0.5, 0.5)(rng);
        vector<vector<float>> xs;
        vector<double> ys;
        for (int n = 0; n < 8; ++n) {
            vector<float> x(input_dim);
            for (float &v : x)
                v = static_cast<float>(rng() % 2);
            xs.push_back(x);
            ys.push_back(static_cast<double>(rng() % 10));
        }
        Signature base;
        batch_loss(model, xs, ys, kind, base);

        vector<span<const float>> inputs(xs.begin(), xs.end());
        nn::Gradients grad;
        nn::loss_and_gradient(model, inputs, ys, kind, grad);

        bool kink = false;
        double worst = 0.0;
        int components = 0;
        for (size_t l = 0; l < model.layers.size() && !kink; ++l) {
            auto check_params = [&](vector<double> &params,
                                    const vector<double> &analytic) {
                for (size_t i = 0; i < params.size() && !kink; ++i) {
                    double saved = params[i];
                    Signature s1, s2;
                    params[i] = saved + STEP;
                    double up = batch_loss(model, xs, ys, kind, s1);
                    params[i] = saved - STEP;
                    double down = batch_loss(model, xs, ys, kind, s2);
                    params[i] = saved;
                    if (!(s1 == base) || !(s2 == base)) {
                        kink = true;
                        break;
                    }
                    double fd = (up - down) / (2 * STEP);
                    double a = analytic[i];
                    double scale = max({abs(a), abs(fd), 1e-6});
                    worst = max(worst, abs(a - fd) / scale);
                    ++components;
                }
            };
            check_params(model.layers[l].weights, grad.weights[l]);
            check_params(model.layers[l].biases, grad.biases[l]);
        }
        if (kink) {
            ++result.resamples;
            continue;
        }
        result.max_relative_error = worst;
        result.components = components;
        return result;
    }
}
}
