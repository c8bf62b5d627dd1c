#ifndef SING_NN_H
#define SING_NN_H

#include "sampler.h"
#include "task_model.h"
#include "timer.h"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sing::nn {
// Fully connected layer; weights are row-major (outputs x inputs).
struct DenseLayer {
    int inputs = 0;
    int outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    double &weight(int out, int in) {
        return weights[static_cast<size_t>(out) * inputs + in];
    }
    double weight(int out, int in) const {
        return weights[static_cast<size_t>(out) * inputs + in];
    }
};

/*
  ReLU network input_dim -> hidden... -> 1 with a linear output unit.
  The fingerprint of the task the training data came from travels with the
  in-memory model; it is not part of the model file.
*/
struct MlpModel {
    Layout layout = Layout::Boolean;
    int input_dim = 0;
    std::vector<int> hidden;
    std::vector<DenseLayer> layers;
    std::optional<std::uint64_t> fingerprint;

    size_t num_parameters() const;
};

class DimensionMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteLoss : public std::runtime_error {
    int epoch_;

public:
    NonFiniteLoss(const std::string &message, int epoch)
        : std::runtime_error(message), epoch_(epoch) {
    }
    int epoch() const {
        return epoch_;
    }
};

class ModelFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Glorot-uniform weights, zero biases.
MlpModel init_network(int input_dim, const std::vector<int> &hidden, Rng &rng,
                      Layout layout = Layout::Boolean);

// Per-caller buffers so that one model can serve several threads.
class Workspace {
    friend double forward(const MlpModel &, std::span<const float>,
                          Workspace &);
    friend class Trainer;
    std::vector<int> nonzero;
    std::vector<std::vector<double>> activations;
};

// Raw network output (not clamped).
double forward(const MlpModel &model, std::span<const float> input,
               Workspace &workspace);
double forward(const MlpModel &model, const StateVector &input);
std::vector<double> forward_batch(const MlpModel &model,
                                  const std::vector<StateVector> &inputs);

enum class LossKind {
    RelativeError,
    Mse
};

const char *to_string(LossKind kind);
LossKind parse_loss_kind(const std::string &name);

// RE: sum |p - y| / (y + 1); MSE: sum (p - y)^2 / n.
double loss(std::span<const double> predictions,
            std::span<const double> targets, LossKind kind);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/*
  Loss of the batch and its gradient with respect to every parameter, by
  backpropagation.
*/
double loss_and_gradient(const MlpModel &model,
                         const std::vector<std::span<const float>> &inputs,
                         std::span<const double> targets, LossKind kind,
                         Gradients &gradients);

struct TrainConfig {
    LossKind loss = LossKind::RelativeError;
    double learning_rate = 1e-3;
    int batch_size = 64;
    int max_epochs = 300;
    double validation_fraction = 0.1;
    int patience = 20;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainReport {
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
    int selected_epoch = -1;
    double wall_time = 0.0;
    bool stopped_by_deadline = false;
};

// Adam (0.9, 0.999, 1e-8) on mini-batches; keeps the best-validation
// parameters and stops after `patience` epochs without improvement.
std::pair<MlpModel, TrainReport> train(MlpModel model, const TrainingSet &set,
                                       const TrainConfig &config,
                                       const Deadline &deadline = {});

/*
  Binary model file: magic "SINGNN1", layout tag (u8), input_dim (u32),
  layer count (u32), output width of every layer (u32 each), then for each
  layer its weights and biases as little-endian IEEE-754 doubles, then the
  CRC-32 of all preceding bytes (u32).
*/
std::string serialize_model(const MlpModel &model);
MlpModel deserialize_model(std::string_view bytes);
}

#endif
