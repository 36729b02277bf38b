#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "critrep/matrix.hpp"
#include "critrep/representation.hpp"

namespace critrep {

struct KMeansResult {
    Matrix centroids;                        // k x d
    std::vector<std::uint32_t> assignments;  // one per sample, in [0, k)
    std::vector<std::uint64_t> cluster_sizes;
    double inertia = 0;                      // sum of squared distances to assigned centroid
    std::vector<double> inertia_history;     // after each assignment step
    std::size_t iterations = 0;
    bool converged = false;                  // assignment fixed point reached
};

inline constexpr std::size_t kKMeansPresetK = 2048;

/// k-means++ seeding from Rng(seed), then Lloyd iterations until the
/// assignment stops changing or `max_iters` is reached. A cluster left
/// empty is moved onto the sample farthest from its current centroid.
/// Throws std::invalid_argument if k == 0 or k > n_samples.
KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters);

/// Cluster sizes run through the same degeneracy machinery as codes.
DegeneracySpectrum cluster_size_spectrum(const KMeansResult& r);

}  // namespace critrep
