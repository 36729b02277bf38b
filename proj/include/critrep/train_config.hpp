#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace critrep {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    double learning_rate = 0.1;
    std::uint64_t seed = 1;
    std::size_t cd_steps = 1;  // RBM only
    std::vector<std::size_t> snapshot_epochs;  // 0 = before the first update
    // Classifiers with a test set: stop after the first epoch whose test
    // accuracy reaches this value.
    std::optional<double> stop_at_test_accuracy;

    void validate() const;
};

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

struct EpochMetrics {
    std::size_t epoch = 0;
    double loss = kNotMeasured;            // mean minibatch objective
    double train_accuracy = kNotMeasured;  // classifiers only
    double test_accuracy = kNotMeasured;   // classifiers with a held-out set
    double reconstruction_mse = kNotMeasured;  // per-pixel, autoencoders and RBMs
};

}  // namespace critrep
