#include "critrep/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "critrep/errors.hpp"

namespace critrep {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (cd_steps == 0) throw std::invalid_argument("TrainConfig: cd_steps must be >= 1");
    if (stop_at_test_accuracy && !(*stop_at_test_accuracy > 0.0 && *stop_at_test_accuracy <= 1.0))
        throw std::invalid_argument("TrainConfig: stop_at_test_accuracy must be in (0, 1]");
}

MlpModel MlpModel::create(std::vector<std::size_t> dims, Activation activation, OutputHead head, Rng& rng) {
    if (dims.size() < 2) throw DimensionError("MlpModel: need at least an input and an output layer");
    MlpModel m;
    m.layer_dims = std::move(dims);
    m.activation = activation;
    m.head = head;
    for (std::size_t l = 0; l + 1 < m.layer_dims.size(); ++l) {
        const std::size_t fan_in = m.layer_dims[l], fan_out = m.layer_dims[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_in, fan_out);
        for (double& v : w.values()) v = (2.0 * rng.uniform() - 1.0) * limit;
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(fan_out, 0.0);
    }
    return m;
}

void MlpModel::validate() const {
    if (layer_dims.size() < 2 || weights.size() + 1 != layer_dims.size() || biases.size() != weights.size())
        throw DimensionError("MlpModel: layer count mismatch");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_dims[l] || weights[l].cols() != layer_dims[l + 1] ||
            biases[l].size() != layer_dims[l + 1])
            throw DimensionError("MlpModel: layer " + std::to_string(l) + " not conformable");
    }
}

std::vector<std::size_t> supervised_preset_dims() { return {784, 70, 50, 35, 10}; }
std::vector<std::size_t> autoencoder_preset_dims() { return {784, 128, 32, 128, 784}; }

bool is_compressing(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) return false;
    const auto narrowest = std::min_element(dims.begin(), dims.end());
    for (auto it = dims.begin(); it != narrowest; ++it)
        if (*(it + 1) >= *it) return false;
    return narrowest != dims.begin();
}

namespace {

struct ForwardPass {
    std::vector<Matrix> acts;
    Matrix logits;  // output-layer pre-activation
};

ForwardPass forward_pass(const MlpModel& m, const Matrix& x) {
    if (x.cols() != m.layer_dims.front())
        throw DimensionError("mlp_forward: input has " + std::to_string(x.cols()) + " columns, model expects " +
                             std::to_string(m.layer_dims.front()));
    ForwardPass fp;
    fp.acts.reserve(m.depth() + 1);
    fp.acts.push_back(x);
    for (std::size_t l = 0; l < m.depth(); ++l) {
        Matrix z = matmul(fp.acts.back(), m.weights[l]);
        add_row_vector(z, m.biases[l]);
        if (l + 1 == m.depth()) {
            fp.acts.push_back(m.head == OutputHead::softmax_classifier ? softmax_rows(z) : sigmoid(z));
            fp.logits = std::move(z);
        } else {
            fp.acts.push_back(m.activation == Activation::sigmoid ? sigmoid(z) : relu(z));
        }
    }
    return fp;
}

double loss_from_pass(const MlpModel& m, const ForwardPass& fp, const Matrix& target) {
    const Matrix& out = fp.acts.back();
    if (target.rows() != out.rows() || target.cols() != out.cols())
        throw DimensionError("mlp_loss: target shape does not match output");
    const auto batch = static_cast<double>(out.rows());
    double total = 0.0;
    if (m.head == OutputHead::softmax_classifier) {
        for (std::size_t r = 0; r < out.rows(); ++r) {
            auto z = fp.logits.row(r);
            const double mx = *std::max_element(z.begin(), z.end());
            double s = 0.0;
            for (double v : z) s += std::exp(v - mx);
            const double lse = mx + std::log(s);
            for (std::size_t c = 0; c < z.size(); ++c) total -= target(r, c) * (z[c] - lse);
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = out.values()[i] - target.values()[i];
            total += d * d;
        }
    }
    return total / batch;
}

// Row chunks keep evaluation of large datasets from materialising every layer at once.
template <typename Fn>
void for_each_chunk(const Matrix& x, Fn&& fn, std::size_t chunk = 2048) {
    for (std::size_t start = 0; start < x.rows(); start += chunk) {
        const std::size_t end = std::min(x.rows(), start + chunk);
        std::vector<std::size_t> idx(end - start);
        std::iota(idx.begin(), idx.end(), start);
        fn(start, x.gather_rows(idx));
    }
}

void apply_update(MlpModel& m, const MlpGradients& g, double lr) {
    for (std::size_t l = 0; l < m.depth(); ++l) {
        auto w = m.weights[l].values();
        auto gw = g.weights[l].values();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
        for (std::size_t i = 0; i < m.biases[l].size(); ++i) m.biases[l][i] -= lr * g.biases[l][i];
    }
}

void shuffle(std::vector<std::size_t>& order, Rng& rng) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
}

bool wants_snapshot(const TrainConfig& cfg, std::size_t epoch) {
    return std::find(cfg.snapshot_epochs.begin(), cfg.snapshot_epochs.end(), epoch) != cfg.snapshot_epochs.end();
}

template <typename TargetFn, typename MetricsFn>
MlpTrainResult train_sgd(MlpModel m, const Matrix& samples, const TrainConfig& cfg, TargetFn&& targets,
                         MetricsFn&& epoch_metrics, const MlpSnapshot& snapshot) {
    cfg.validate();
    m.validate();
    Rng rng(cfg.seed);
    std::vector<std::size_t> order(samples.rows());
    std::iota(order.begin(), order.end(), 0);
    if (snapshot && wants_snapshot(cfg, 0)) snapshot(0, m);

    MlpTrainResult result;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const std::span<const std::size_t> idx(order.data() + start, end - start);
            const Matrix xb = samples.gather_rows(idx);
            double loss = 0.0;
            const MlpGradients g = mlp_gradients(m, xb, targets(idx, xb), &loss);
            if (!std::isfinite(loss))
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches));
            apply_update(m, g, cfg.learning_rate);
            loss_sum += loss;
            ++batches;
        }
        EpochMetrics metrics = epoch_metrics(m);
        metrics.epoch = epoch;
        metrics.loss = loss_sum / static_cast<double>(batches);
        result.history.push_back(metrics);
        if (snapshot && wants_snapshot(cfg, epoch)) snapshot(epoch, m);
        if (cfg.stop_at_test_accuracy && metrics.test_accuracy >= *cfg.stop_at_test_accuracy) break;
    }
    result.model = std::move(m);
    return result;
}

}  // namespace

std::vector<Matrix> mlp_forward(const MlpModel& m, const Matrix& x) { return forward_pass(m, x).acts; }

double mlp_loss(const MlpModel& m, const Matrix& x, const Matrix& target) {
    return loss_from_pass(m, forward_pass(m, x), target);
}

MlpGradients mlp_gradients(const MlpModel& m, const Matrix& x, const Matrix& target, double* loss) {
    const ForwardPass fp = forward_pass(m, x);
    const double value = loss_from_pass(m, fp, target);
    if (loss) *loss = value;

    const Matrix& out = fp.acts.back();
    const auto batch = static_cast<double>(out.rows());
    Matrix delta(out.rows(), out.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double o = out.values()[i], t = target.values()[i];
        delta.values()[i] = m.head == OutputHead::softmax_classifier ? (o - t) / batch
                                                                     : 2.0 * (o - t) / batch * o * (1.0 - o);
    }

    MlpGradients g;
    g.weights.resize(m.depth());
    g.biases.resize(m.depth());
    for (std::size_t l = m.depth(); l-- > 0;) {
        g.weights[l] = matmul_tn(fp.acts[l], delta);
        g.biases[l] = column_sums(delta);
        if (l == 0) break;
        Matrix back = matmul_nt(delta, m.weights[l]);
        const Matrix& a = fp.acts[l];
        for (std::size_t i = 0; i < back.size(); ++i) {
            const double ai = a.values()[i];
            back.values()[i] *= m.activation == Activation::sigmoid ? ai * (1.0 - ai) : (ai > 0.0 ? 1.0 : 0.0);
        }
        delta = std::move(back);
    }
    return g;
}

Matrix one_hot(const std::vector<int>& labels, int n_classes) {
    Matrix t(labels.size(), static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes) throw std::out_of_range("one_hot: label out of range");
        t(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return t;
}

double classification_accuracy(const MlpModel& m, const LabeledDataset& data) {
    if (!data.labels) throw std::invalid_argument("classification_accuracy: dataset has no labels");
    std::size_t correct = 0;
    for_each_chunk(data.samples, [&](std::size_t start, const Matrix& xb) {
        const Matrix out = forward_pass(m, xb).acts.back();
        for (std::size_t r = 0; r < out.rows(); ++r) {
            auto row = out.row(r);
            const auto pred = std::distance(row.begin(), std::max_element(row.begin(), row.end()));
            if (pred == (*data.labels)[start + r]) ++correct;
        }
    });
    return data.size() ? static_cast<double>(correct) / static_cast<double>(data.size()) : 0.0;
}

double reconstruction_mse(const MlpModel& m, const Matrix& x) {
    double total = 0.0;
    for_each_chunk(x, [&](std::size_t, const Matrix& xb) {
        const Matrix out = forward_pass(m, xb).acts.back();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double d = out.values()[i] - xb.values()[i];
            total += d * d;
        }
    });
    return x.size() ? total / static_cast<double>(x.size()) : 0.0;
}

MlpTrainResult mlp_train_supervised(MlpModel m, const LabeledDataset& train, const TrainConfig& cfg,
                                    const LabeledDataset* test, const MlpSnapshot& snapshot) {
    if (!train.labels || !train.n_classes) throw std::invalid_argument("mlp_train_supervised: training data has no labels");
    if (m.head != OutputHead::softmax_classifier)
        throw std::invalid_argument("mlp_train_supervised: model head is not a softmax classifier");
    if (static_cast<std::size_t>(*train.n_classes) > m.layer_dims.back())
        throw DimensionError("mlp_train_supervised: more classes than output units");
    const Matrix targets = one_hot(*train.labels, static_cast<int>(m.layer_dims.back()));
    return train_sgd(
        std::move(m), train.samples, cfg,
        [&](std::span<const std::size_t> idx, const Matrix&) { return targets.gather_rows(idx); },
        [&](const MlpModel& cur) {
            EpochMetrics e;
            e.train_accuracy = classification_accuracy(cur, train);
            if (test) e.test_accuracy = classification_accuracy(cur, *test);
            return e;
        },
        snapshot);
}

MlpTrainResult mlp_train_autoencoder(MlpModel m, const LabeledDataset& train, const TrainConfig& cfg,
                                     const MlpSnapshot& snapshot) {
    if (m.head != OutputHead::reconstruction)
        throw std::invalid_argument("mlp_train_autoencoder: model head is not a reconstruction head");
    const auto& d = m.layer_dims;
    if (!std::equal(d.begin(), d.end(), d.rbegin()) || !is_compressing(d))
        throw DimensionError("mlp_train_autoencoder: layer widths must be symmetric around a bottleneck");
    return train_sgd(
        std::move(m), train.samples, cfg, [](std::span<const std::size_t>, const Matrix& xb) { return xb; },
        [&](const MlpModel& cur) {
            EpochMetrics e;
            e.reconstruction_mse = reconstruction_mse(cur, train.samples);
            return e;
        },
        snapshot);
}

}  // namespace critrep
