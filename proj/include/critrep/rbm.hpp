#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "critrep/dataset.hpp"
#include "critrep/matrix.hpp"
#include "critrep/rng.hpp"
#include "critrep/train_config.hpp"

namespace critrep {

/// Binary restricted Boltzmann machine. Only visible-hidden couplings exist,
/// so both conditionals factorize over units.
struct RbmModel {
    std::size_t n_visible = 0;
    std::size_t n_hidden = 0;
    Matrix weights;  // n_visible x n_hidden
    std::vector<double> visible_bias;
    std::vector<double> hidden_bias;

    /// Gaussian weights with mean 0 and std 0.01; zero biases.
    static RbmModel create(std::size_t n_visible, std::size_t n_hidden, Rng& rng);
    void validate() const;
};

inline constexpr std::size_t kRbmPresetHidden = 64;

/// p(z_j = 1 | x) = sigmoid(x . W_j + c_j), one row per sample.
Matrix rbm_hidden_probabilities(const RbmModel& r, const Matrix& x);
/// p(x_i = 1 | z) = sigmoid(W_i . z + b_i).
Matrix rbm_visible_probabilities(const RbmModel& r, const Matrix& h);

/// Independent Bernoulli draw per entry, in row-major order.
Matrix sample_bernoulli(const Matrix& probabilities, Rng& rng);

struct HiddenSample {
    Matrix probabilities;
    Matrix samples;  // entries in {0, 1}
};
HiddenSample rbm_sample_hidden(const RbmModel& r, const Matrix& x, Rng& rng);

/// F(v) = -b.v - sum_j softplus(c_j + v.W_j); p(v) is proportional to exp(-F(v)).
double rbm_free_energy(const RbmModel& r, std::span<const double> v);

/// One CD-k step on a minibatch, applied in place:
///   positive phase  ph0 = p(h|v0), h ~ ph0
///   k alternations  pv = p(v|h) (mean-field visible), ph = p(h|pv), h ~ ph
///   dW = lr * (v0^T ph0 - pv_k^T ph_k) / B, and likewise for the biases.
/// Returns the per-pixel squared error between v0 and the first reconstruction.
double rbm_cd_update(RbmModel& r, const Matrix& batch, std::size_t cd_steps, double learning_rate, Rng& rng);

using RbmSnapshot = std::function<void(std::size_t epoch, const RbmModel&)>;

struct RbmTrainResult {
    RbmModel model;
    std::vector<EpochMetrics> history;  // reconstruction_mse = mean over the epoch's minibatches
};

/// CD-k over shuffled minibatches; shuffling and Gibbs sampling both draw from `rng`.
RbmTrainResult rbm_train_cd(RbmModel r, const LabeledDataset& data, const TrainConfig& cfg, Rng& rng,
                            const RbmSnapshot& snapshot = {});

}  // namespace critrep
