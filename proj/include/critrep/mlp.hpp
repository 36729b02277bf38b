#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "critrep/dataset.hpp"
#include "critrep/matrix.hpp"
#include "critrep/rng.hpp"
#include "critrep/train_config.hpp"

namespace critrep {

enum class Activation { sigmoid, relu };
enum class OutputHead { softmax_classifier, reconstruction };

/// Fully connected feed-forward network. Hidden layers use `activation`;
/// the output layer is a softmax for classifiers and a sigmoid for
/// reconstruction (pixel targets live in [0,1]).
struct MlpModel {
    std::vector<std::size_t> layer_dims;
    std::vector<Matrix> weights;               // weights[l] is dims[l] x dims[l+1]
    std::vector<std::vector<double>> biases;   // biases[l] has dims[l+1] entries
    Activation activation = Activation::sigmoid;
    OutputHead head = OutputHead::softmax_classifier;

    /// Xavier-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    static MlpModel create(std::vector<std::size_t> dims, Activation activation, OutputHead head, Rng& rng);

    std::size_t depth() const { return weights.size(); }
    void validate() const;
};

/// [784, 70, 50, 35, 10]
std::vector<std::size_t> supervised_preset_dims();
/// [784, 128, 32, 128, 784], bottleneck at the second hidden layer.
std::vector<std::size_t> autoencoder_preset_dims();
/// Layer widths shrink strictly from the input up to the narrowest layer.
bool is_compressing(const std::vector<std::size_t>& dims);

/// Activations of every layer: [0] is the input, [depth()] the output.
std::vector<Matrix> mlp_forward(const MlpModel& m, const Matrix& x);

struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

/// Batch-mean objective: cross-entropy against `target` (one-hot rows) for
/// classifiers; sum over features of squared error for reconstruction.
double mlp_loss(const MlpModel& m, const Matrix& x, const Matrix& target);
/// Backpropagated gradient of mlp_loss; writes the loss to `loss` if given.
MlpGradients mlp_gradients(const MlpModel& m, const Matrix& x, const Matrix& target,
                           double* loss = nullptr);

Matrix one_hot(const std::vector<int>& labels, int n_classes);
double classification_accuracy(const MlpModel& m, const LabeledDataset& data);
/// Mean per-pixel squared reconstruction error.
double reconstruction_mse(const MlpModel& m, const Matrix& x);

using MlpSnapshot = std::function<void(std::size_t epoch, const MlpModel&)>;

struct MlpTrainResult {
    MlpModel model;
    std::vector<EpochMetrics> history;  // one entry per completed epoch
};

/// Minibatch SGD on softmax cross-entropy. Batches follow a Fisher-Yates
/// shuffle drawn from Rng(cfg.seed) each epoch.
MlpTrainResult mlp_train_supervised(MlpModel m, const LabeledDataset& train, const TrainConfig& cfg,
                                    const LabeledDataset* test = nullptr, const MlpSnapshot& snapshot = {});

/// Minibatch SGD on reconstruction error, same batching scheme.
MlpTrainResult mlp_train_autoencoder(MlpModel m, const LabeledDataset& train, const TrainConfig& cfg,
                                     const MlpSnapshot& snapshot = {});

}  // namespace critrep
