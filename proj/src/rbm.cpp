#include "critrep/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "critrep/errors.hpp"

namespace critrep {

namespace {

double softplus(double v) { return v > 30.0 ? v : std::log1p(std::exp(v)); }

bool wants_snapshot(const TrainConfig& cfg, std::size_t epoch) {
    return std::find(cfg.snapshot_epochs.begin(), cfg.snapshot_epochs.end(), epoch) != cfg.snapshot_epochs.end();
}

}  // namespace

RbmModel RbmModel::create(std::size_t n_visible, std::size_t n_hidden, Rng& rng) {
    RbmModel r;
    r.n_visible = n_visible;
    r.n_hidden = n_hidden;
    r.weights = Matrix(n_visible, n_hidden);
    for (double& v : r.weights.values()) v = 0.01 * rng.normal();
    r.visible_bias.assign(n_visible, 0.0);
    r.hidden_bias.assign(n_hidden, 0.0);
    return r;
}

void RbmModel::validate() const {
    if (weights.rows() != n_visible || weights.cols() != n_hidden || visible_bias.size() != n_visible ||
        hidden_bias.size() != n_hidden)
        throw DimensionError("RbmModel: parameter shapes do not match unit counts");
}

Matrix rbm_hidden_probabilities(const RbmModel& r, const Matrix& x) {
    Matrix z = matmul(x, r.weights);
    add_row_vector(z, r.hidden_bias);
    return sigmoid(z);
}

Matrix rbm_visible_probabilities(const RbmModel& r, const Matrix& h) {
    Matrix z = matmul_nt(h, r.weights);
    add_row_vector(z, r.visible_bias);
    return sigmoid(z);
}

Matrix sample_bernoulli(const Matrix& probabilities, Rng& rng) {
    Matrix s(probabilities.rows(), probabilities.cols());
    for (std::size_t i = 0; i < s.size(); ++i) s.values()[i] = rng.uniform() < probabilities.values()[i] ? 1.0 : 0.0;
    return s;
}

HiddenSample rbm_sample_hidden(const RbmModel& r, const Matrix& x, Rng& rng) {
    HiddenSample out;
    out.probabilities = rbm_hidden_probabilities(r, x);
    out.samples = sample_bernoulli(out.probabilities, rng);
    return out;
}

double rbm_free_energy(const RbmModel& r, std::span<const double> v) {
    if (v.size() != r.n_visible) throw DimensionError("rbm_free_energy: visible vector has wrong length");
    double f = 0.0;
    for (std::size_t i = 0; i < r.n_visible; ++i) f -= r.visible_bias[i] * v[i];
    for (std::size_t j = 0; j < r.n_hidden; ++j) {
        double act = r.hidden_bias[j];
        for (std::size_t i = 0; i < r.n_visible; ++i) act += v[i] * r.weights(i, j);
        f -= softplus(act);
    }
    return f;
}

double rbm_cd_update(RbmModel& r, const Matrix& v0, std::size_t cd_steps, double lr, Rng& rng) {
    if (v0.cols() != r.n_visible) throw DimensionError("rbm_cd_update: batch width != n_visible");
    const Matrix ph0 = rbm_hidden_probabilities(r, v0);
    Matrix h = sample_bernoulli(ph0, rng);
    Matrix pv, ph;
    double recon = 0.0;
    for (std::size_t step = 0; step < cd_steps; ++step) {
        pv = rbm_visible_probabilities(r, h);
        ph = rbm_hidden_probabilities(r, pv);
        if (step == 0) {
            for (std::size_t i = 0; i < pv.size(); ++i) {
                const double d = pv.values()[i] - v0.values()[i];
                recon += d * d;
            }
            recon /= static_cast<double>(pv.size());
        }
        if (step + 1 < cd_steps) h = sample_bernoulli(ph, rng);
    }

    const double scale = lr / static_cast<double>(v0.rows());
    const Matrix pos = matmul_tn(v0, ph0);
    const Matrix neg = matmul_tn(pv, ph);
    auto w = r.weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += scale * (pos.values()[i] - neg.values()[i]);
    const auto v0_sum = column_sums(v0), pv_sum = column_sums(pv);
    for (std::size_t i = 0; i < r.n_visible; ++i) r.visible_bias[i] += scale * (v0_sum[i] - pv_sum[i]);
    const auto ph0_sum = column_sums(ph0), ph_sum = column_sums(ph);
    for (std::size_t j = 0; j < r.n_hidden; ++j) r.hidden_bias[j] += scale * (ph0_sum[j] - ph_sum[j]);
    return recon;
}

RbmTrainResult rbm_train_cd(RbmModel r, const LabeledDataset& data, const TrainConfig& cfg, Rng& rng,
                            const RbmSnapshot& snapshot) {
    cfg.validate();
    r.validate();
    if (data.features() != r.n_visible) throw DimensionError("rbm_train_cd: data width != n_visible");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    if (snapshot && wants_snapshot(cfg, 0)) snapshot(0, r);

    RbmTrainResult result;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        double recon_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const Matrix batch = data.samples.gather_rows(std::span<const std::size_t>(order.data() + start, end - start));
            const double recon = rbm_cd_update(r, batch, cfg.cd_steps, cfg.learning_rate, rng);
            if (!std::isfinite(recon) || !r.weights.all_finite())
                throw NumericError("non-finite RBM update at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches));
            recon_sum += recon;
            ++batches;
        }
        EpochMetrics m;
        m.epoch = epoch;
        m.reconstruction_mse = recon_sum / static_cast<double>(batches);
        m.loss = m.reconstruction_mse;
        result.history.push_back(m);
        if (snapshot && wants_snapshot(cfg, epoch)) snapshot(epoch, r);
    }
    result.model = std::move(r);
    return result;
}

}  // namespace critrep
