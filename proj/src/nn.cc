#include "sing/nn.h"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>

using namespace std;

namespace sing::nn {
size_t MlpModel::num_parameters() const {
    size_t n = 0;
    for (const DenseLayer &l : layers)
        n += l.weights.size() + l.biases.size();
    return n;
}

MlpModel init_network(int input_dim, const vector<int> &hidden, Rng &rng,
                      Layout layout) {
    if (input_dim < 1)
        throw invalid_argument("input dimension must be at least 1");
    MlpModel model;
    model.layout = layout;
    model.input_dim = input_dim;
    model.hidden = hidden;
    int fan_in = input_dim;
    vector<int> widths = hidden;
    widths.push_back(1);
    for (int width : widths) {
        if (width < 1)
            throw invalid_argument("layer widths must be at least 1");
        DenseLayer layer;
        layer.inputs = fan_in;
        layer.outputs = width;
        double limit = sqrt(6.0 / (fan_in + width));
        uniform_real_distribution<double> dist(-limit, limit);
        layer.weights.resize(static_cast<size_t>(fan_in) * width);
        for (double &w : layer.weights)
            w = dist(rng);
        layer.biases.assign(width, 0.0);
        model.layers.push_back(move(layer));
        fan_in = width;
    }
    return model;
}

namespace {
/*
  Runs the network and keeps every layer's post-activation output in
  `acts` (acts[0] unused: the input is read sparsely through `nonzero`).
  Returns the output unit's value.
*/
double run_layers(const MlpModel &model, span<const float> input,
                  vector<int> &nonzero, vector<vector<double>> &acts) {
    nonzero.clear();
    for (size_t j = 0; j < input.size(); ++j)
        if (input[j] != 0.0f)
            nonzero.push_back(static_cast<int>(j));
    const size_t num_layers = model.layers.size();
    acts.resize(num_layers + 1);
    for (size_t l = 0; l < num_layers; ++l) {
        const DenseLayer &layer = model.layers[l];
        vector<double> &out = acts[l + 1];
        out.assign(layer.biases.begin(), layer.biases.end());
        if (l == 0) {
            for (int i = 0; i < layer.outputs; ++i) {
                const double *row = &layer.weights[static_cast<size_t>(i) *
                                                   layer.inputs];
                double z = out[i];
                for (int j : nonzero)
                    z += row[j] * input[j];
                out[i] = z;
            }
        } else {
            const vector<double> &in = acts[l];
            for (int i = 0; i < layer.outputs; ++i) {
                const double *row = &layer.weights[static_cast<size_t>(i) *
                                                   layer.inputs];
                double z = out[i];
                for (int j = 0; j < layer.inputs; ++j)
                    z += row[j] * in[j];
                out[i] = z;
            }
        }
        if (l + 1 < num_layers)
            for (double &v : out)
                v = max(v, 0.0);
    }
    return acts[num_layers][0];
}

void check_input(const MlpModel &model, size_t size) {
    if (static_cast<int>(size) != model.input_dim)
        throw DimensionMismatch("network expects " +
                                std::to_string(model.input_dim) +
                                " inputs, got " + std::to_string(size));
}

double loss_derivative(double prediction, double target, LossKind kind,
                       size_t n) {
    if (kind == LossKind::RelativeError) {
        double diff = prediction - target;
        double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
        return sign / (target + 1.0);
    }
    return 2.0 * (prediction - target) / static_cast<double>(n);
}
}

double forward(const MlpModel &model, span<const float> input,
               Workspace &workspace) {
    check_input(model, input.size());
    return run_layers(model, input, workspace.nonzero, workspace.activations);
}

double forward(const MlpModel &model, const StateVector &input) {
    Workspace ws;
    return forward(model, input.values, ws);
}

vector<double> forward_batch(const MlpModel &model,
                             const vector<StateVector> &inputs) {
    Workspace ws;
    vector<double> out;
    out.reserve(inputs.size());
    for (const StateVector &v : inputs)
        out.push_back(forward(model, v.values, ws));
    return out;
}

const char *to_string(LossKind kind) {
    return kind == LossKind::RelativeError ? "re" : "mse";
}

LossKind parse_loss_kind(const string &name) {
    if (name == "re" || name == "relative-error")
        return LossKind::RelativeError;
    if (name == "mse")
        return LossKind::Mse;
    throw invalid_argument("unknown loss '" + name + "'");
}

double loss(span<const double> predictions, span<const double> targets,
            LossKind kind) {
    if (predictions.size() != targets.size())
        throw invalid_argument("loss: " + std::to_string(predictions.size()) +
                               " predictions vs " +
                               std::to_string(targets.size()) + " targets");
    double total = 0.0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        double diff = predictions[i] - targets[i];
        if (kind == LossKind::RelativeError)
            total += abs(diff) / (targets[i] + 1.0);
        else
            total += diff * diff;
    }
    if (kind == LossKind::Mse && !predictions.empty())
        total /= static_cast<double>(predictions.size());
    return total;
}

/*
  Backpropagation over a batch. Shared by the public gradient routine and
  the training loop, which reuses its buffers across batches.
*/
class Trainer {
    const MlpModel &model;
    Workspace ws;
    vector<vector<double>> deltas;

public:
    explicit Trainer(const MlpModel &model)
        : model(model), deltas(model.layers.size()) {
    }

    static void zero(const MlpModel &model, Gradients &g) {
        g.weights.resize(model.layers.size());
        g.biases.resize(model.layers.size());
        for (size_t l = 0; l < model.layers.size(); ++l) {
            g.weights[l].assign(model.layers[l].weights.size(), 0.0);
            g.biases[l].assign(model.layers[l].biases.size(), 0.0);
        }
    }

    double accumulate(const vector<span<const float>> &inputs,
                      span<const double> targets, LossKind kind,
                      Gradients &g) {
        const size_t n = inputs.size();
        const size_t num_layers = model.layers.size();
        double total = 0.0;
        for (size_t s = 0; s < n; ++s) {
            check_input(model, inputs[s].size());
            double pred =
                run_layers(model, inputs[s], ws.nonzero, ws.activations);
            double diff = pred - targets[s];
            if (kind == LossKind::RelativeError)
                total += abs(diff) / (targets[s] + 1.0);
            else
                total += diff * diff;

            deltas[num_layers - 1].assign(
                1, loss_derivative(pred, targets[s], kind, n));
            for (size_t l = num_layers; l-- > 0;) {
                const DenseLayer &layer = model.layers[l];
                const vector<double> &delta = deltas[l];
                vector<double> &gw = g.weights[l];
                vector<double> &gb = g.biases[l];
                for (int i = 0; i < layer.outputs; ++i)
                    gb[i] += delta[i];
                if (l == 0) {
                    for (int i = 0; i < layer.outputs; ++i) {
                        if (delta[i] == 0.0)
                            continue;
                        double *row =
                            &gw[static_cast<size_t>(i) * layer.inputs];
                        for (int j : ws.nonzero)
                            row[j] += delta[i] * inputs[s][j];
                    }
                    break;
                }
                const vector<double> &in = ws.activations[l];
                vector<double> &prev = deltas[l - 1];
                prev.assign(layer.inputs, 0.0);
                for (int i = 0; i < layer.outputs; ++i) {
                    if (delta[i] == 0.0)
                        continue;
                    const double *wrow =
                        &layer.weights[static_cast<size_t>(i) * layer.inputs];
                    double *grow = &gw[static_cast<size_t>(i) * layer.inputs];
                    for (int j = 0; j < layer.inputs; ++j) {
                        grow[j] += delta[i] * in[j];
                        prev[j] += delta[i] * wrow[j];
                    }
                }
                // ReLU derivative of the layer below
                for (int j = 0; j < layer.inputs; ++j)
                    if (in[j] <= 0.0)
                        prev[j] = 0.0;
            }
        }
        if (kind == LossKind::Mse && n > 0)
            total /= static_cast<double>(n);
        return total;
    }
};

double loss_and_gradient(const MlpModel &model,
                         const vector<span<const float>> &inputs,
                         span<const double> targets, LossKind kind,
                         Gradients &gradients) {
    if (inputs.size() != targets.size())
        throw invalid_argument("batch inputs and targets differ in length");
    Trainer::zero(model, gradients);
    Trainer trainer(model);
    return trainer.accumulate(inputs, targets, kind, gradients);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0) || batch_size <= 0 || max_epochs <= 0 ||
        patience <= 0)
        throw invalid_argument(
            "learning rate, batch size, epochs and patience must be positive");
    if (!(validation_fraction > 0 && validation_fraction < 1))
        throw invalid_argument("validation fraction must lie in (0, 1)");
}

namespace {
struct AdamState {
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double epsilon = 1e-8;
    Gradients m;
    Gradients v;
    long step = 0;

    explicit AdamState(const MlpModel &model) {
        Trainer::zero(model, m);
        Trainer::zero(model, v);
    }

    void update(MlpModel &model, const Gradients &g, double lr) {
        ++step;
        const double c1 = 1.0 - pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - pow(beta2, static_cast<double>(step));
        auto apply = [&](vector<double> &param, const vector<double> &grad,
                         vector<double> &mm, vector<double> &vv) {
            for (size_t i = 0; i < param.size(); ++i) {
                mm[i] = beta1 * mm[i] + (1 - beta1) * grad[i];
                vv[i] = beta2 * vv[i] + (1 - beta2) * grad[i] * grad[i];
                double mhat = mm[i] / c1;
                double vhat = vv[i] / c2;
                param[i] -= lr * mhat / (sqrt(vhat) + epsilon);
            }
        };
        for (size_t l = 0; l < model.layers.size(); ++l) {
            apply(model.layers[l].weights, g.weights[l], m.weights[l],
                  v.weights[l]);
            apply(model.layers[l].biases, g.biases[l], m.biases[l],
                  v.biases[l]);
        }
    }
};

double evaluate_split(const MlpModel &model, const TrainingSet &set,
                      const vector<size_t> &indices, LossKind kind,
                      Workspace &ws) {
    vector<double> preds, targets;
    preds.reserve(indices.size());
    targets.reserve(indices.size());
    for (size_t i : indices) {
        preds.push_back(forward(model, set.samples[i].vector.values, ws));
        targets.push_back(set.samples[i].label);
    }
    return loss(preds, targets, kind);
}
}

pair<MlpModel, TrainReport> train(MlpModel model, const TrainingSet &set,
                                  const TrainConfig &config,
                                  const Deadline &deadline) {
    config.validate();
    if (set.samples.empty())
        throw EmptyTrainingSet("cannot train on an empty training set");
    if (set.layout != model.layout || set.input_dim != model.input_dim)
        throw DimensionMismatch(
            "training set layout or width does not match the network");
    Timer timer;
    TrainReport report;
    model.fingerprint = set.fingerprint;

    Rng rng(mix_seed(config.seed, 0x7472));
    vector<size_t> order(set.samples.size());
    iota(order.begin(), order.end(), 0);
    shuffle(order.begin(), order.end(), rng);
    size_t num_val = static_cast<size_t>(
        floor(set.samples.size() * config.validation_fraction));
    vector<size_t> val_idx, train_idx;
    if (num_val == 0) {
        // too few samples to hold any out: validate on the training data
        train_idx = order;
        val_idx = order;
    } else {
        num_val = min(num_val, order.size() - 1);
        val_idx.assign(order.begin(), order.begin() + num_val);
        train_idx.assign(order.begin() + num_val, order.end());
    }

    Trainer trainer(model);
    AdamState adam(model);
    Gradients grad;
    Workspace ws;
    MlpModel best = model;
    double best_val = numeric_limits<double>::infinity();
    int since_best = 0;
    vector<span<const float>> batch_inputs;
    vector<double> batch_targets;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        shuffle(train_idx.begin(), train_idx.end(), rng);
        double epoch_loss = 0.0;
        for (size_t b = 0; b < train_idx.size(); b += config.batch_size) {
            if (deadline.expired()) {
                report.stopped_by_deadline = true;
                break;
            }
            size_t e = min(train_idx.size(), b + config.batch_size);
            batch_inputs.clear();
            batch_targets.clear();
            for (size_t k = b; k < e; ++k) {
                const Sample &s = set.samples[train_idx[k]];
                batch_inputs.emplace_back(s.vector.values);
                batch_targets.push_back(s.label);
            }
            Trainer::zero(model, grad);
            double batch_loss = trainer.accumulate(batch_inputs, batch_targets,
                                                   config.loss, grad);
            if (config.loss == LossKind::Mse)
                epoch_loss += batch_loss * (e - b);
            else
                epoch_loss += batch_loss;
            adam.update(model, grad, config.learning_rate);
        }
        if (report.stopped_by_deadline)
            break;
        if (config.loss == LossKind::Mse)
            epoch_loss /= static_cast<double>(train_idx.size());
        double val = evaluate_split(model, set, val_idx, config.loss, ws);
        if (!isfinite(epoch_loss) || !isfinite(val))
            throw NonFiniteLoss("loss diverged in epoch " +
                                    std::to_string(epoch),
                                epoch);
        report.train_loss.push_back(epoch_loss);
        report.validation_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best = model;
            report.selected_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    report.wall_time = timer.seconds();
    return {move(best), move(report)};
}
}

namespace sing::nn {
namespace {
constexpr string_view MAGIC = "SINGNN1";

void put_u32(string &out, uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(string &out, double d) {
    uint64_t v = bit_cast<uint64_t>(d);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint32_t checksum(string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    return static_cast<uint32_t>(
        crc32(crc, reinterpret_cast<const Bytef *>(bytes.data()),
              static_cast<uInt>(bytes.size())));
}

class ByteReader {
    string_view bytes;
    size_t pos = 0;

    void need(size_t n) const {
        if (bytes.size() - pos < n)
            throw ModelFormatError("model file is truncated");
    }

public:
    explicit ByteReader(string_view bytes) : bytes(bytes) {
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(bytes[pos++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes[pos++]))
                 << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes[pos++]))
                 << (8 * i);
        return bit_cast<double>(v);
    }
    string_view take(size_t n) {
        need(n);
        string_view s = bytes.substr(pos, n);
        pos += n;
        return s;
    }
    size_t offset() const {
        return pos;
    }
};
}

string serialize_model(const MlpModel &model) {
    string out(MAGIC);
    out.push_back(static_cast<char>(model.layout == Layout::Boolean ? 0 : 1));
    put_u32(out, static_cast<uint32_t>(model.input_dim));
    put_u32(out, static_cast<uint32_t>(model.layers.size()));
    for (const DenseLayer &l : model.layers)
        put_u32(out, static_cast<uint32_t>(l.outputs));
    for (const DenseLayer &l : model.layers) {
        for (double w : l.weights)
            put_f64(out, w);
        for (double b : l.biases)
            put_f64(out, b);
    }
    put_u32(out, checksum(out));
    return out;
}

MlpModel deserialize_model(string_view bytes) {
    if (bytes.size() < MAGIC.size() + 4)
        throw ModelFormatError("model file is truncated");
    string_view body = bytes.substr(0, bytes.size() - 4);
    ByteReader tail(bytes.substr(bytes.size() - 4));
    if (tail.u32() != checksum(body))
        throw ModelFormatError("model file checksum mismatch");

    ByteReader in(body);
    if (in.take(MAGIC.size()) != MAGIC)
        throw ModelFormatError("not a model file (bad magic)");
    MlpModel model;
    uint8_t tag = in.u8();
    if (tag > 1)
        throw ModelFormatError("unknown layout tag " + std::to_string(tag));
    model.layout = tag == 0 ? Layout::Boolean : Layout::Multivalued;
    model.input_dim = static_cast<int>(in.u32());
    uint32_t num_layers = in.u32();
    if (model.input_dim < 1 || num_layers < 1 || num_layers > 1024)
        throw ModelFormatError("implausible model dimensions");
    vector<int> widths;
    for (uint32_t l = 0; l < num_layers; ++l) {
        uint32_t w = in.u32();
        if (w < 1 || w > (1u << 24))
            throw ModelFormatError("implausible layer width");
        widths.push_back(static_cast<int>(w));
    }
    if (widths.back() != 1)
        throw ModelFormatError("output layer must have width 1");
    int fan_in = model.input_dim;
    for (int width : widths) {
        DenseLayer layer;
        layer.inputs = fan_in;
        layer.outputs = width;
        size_t n = static_cast<size_t>(fan_in) * width;
        if (n > (body.size() - in.offset()) / 8)
            throw ModelFormatError("model file is truncated");
        layer.weights.resize(n);
        for (double &w : layer.weights)
            w = in.f64();
        layer.biases.resize(width);
        for (double &b : layer.biases)
            b = in.f64();
        model.layers.push_back(move(layer));
        fan_in = width;
    }
    if (in.offset() != body.size())
        throw ModelFormatError("trailing bytes in model file");
    model.hidden.assign(widths.begin(), widths.end() - 1);
    return model;
}
}
