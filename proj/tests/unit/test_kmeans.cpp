#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "critrep/kernels.hpp"
#include "critrep/kmeans.hpp"
#include "critrep/rng.hpp"

using namespace critrep;

namespace {

// Tight blobs around well-separated centres; label i / per_blob.
Matrix blobs(std::size_t n_blobs, std::size_t per_blob, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n_blobs * per_blob, d);
    for (std::size_t b = 0; b < n_blobs; ++b)
        for (std::size_t i = 0; i < per_blob; ++i)
            for (std::size_t j = 0; j < d; ++j)
                x(b * per_blob + i, j) = (j == b % d ? 10.0 * static_cast<double>(b + 1) : 0.0) + 0.1 * rng.normal();
    return x;
}

double inertia_of(const Matrix& x, const KMeansResult& r) {
    double s = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double d = x(i, j) - r.centroids(r.assignments[i], j);
            s += d * d;
        }
    return s;
}

}  // namespace

TEST_CASE("kmeans: recovers separated blobs") {
    const Matrix x = blobs(4, 50, 3, 1);
    const KMeansResult r = kmeans(x, 4, 2, 100);
    CHECK(r.converged);
    for (std::size_t b = 0; b < 4; ++b) {
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < 50; ++i) seen.insert(r.assignments[b * 50 + i]);
        CHECK(seen.size() == 1);
    }
    auto sizes = r.cluster_sizes;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::uint64_t>{50, 50, 50, 50});
    CHECK(r.inertia == doctest::Approx(inertia_of(x, r)));
}

TEST_CASE("kmeans: one cluster holds every sample at the mean") {
    const Matrix x = blobs(3, 20, 2, 3);
    const KMeansResult r = kmeans(x, 1, 0, 10);
    CHECK(r.cluster_sizes == std::vector<std::uint64_t>{60});
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
        CHECK(r.centroids(0, j) == doctest::Approx(mean / 60));
    }
    const auto s = cluster_size_spectrum(r);
    CHECK(s.points() == std::vector<SpectrumPoint>{{60, 1}});
}

TEST_CASE("kmeans: inertia never increases and sizes sum to n") {
    Rng rng(4);
    Matrix x(300, 5);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
    const KMeansResult r = kmeans(x, 17, 5, 200);
    for (std::size_t t = 1; t < r.inertia_history.size(); ++t)
        CHECK(r.inertia_history[t] <= r.inertia_history[t - 1] + 1e-9);
    CHECK(std::accumulate(r.cluster_sizes.begin(), r.cluster_sizes.end(), std::uint64_t{0}) == 300);
    CHECK(cluster_size_spectrum(r).total() == 300);
    for (auto c : r.cluster_sizes) CHECK(c > 0);
}

TEST_CASE("kmeans: duplicated points leave no cluster empty") {
    Matrix x(30, 1);
    for (std::size_t i = 0; i < 30; ++i) x(i, 0) = i < 10 ? 0.0 : (i < 20 ? 1.0 : 2.0 + 0.01 * static_cast<double>(i));
    const KMeansResult r = kmeans(x, 5, 6, 50);
    CHECK(std::accumulate(r.cluster_sizes.begin(), r.cluster_sizes.end(), std::uint64_t{0}) == 30);
    for (auto c : r.cluster_sizes) CHECK(c > 0);
}

TEST_CASE("kmeans: deterministic in the seed and thread count") {
    const Matrix x = blobs(6, 30, 4, 7);
    set_threads(1);
    const KMeansResult a = kmeans(x, 8, 11, 100);
    set_threads(4);
    const KMeansResult b = kmeans(x, 8, 11, 100);
    set_threads(1);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
    const KMeansResult c = kmeans(x, 8, 12, 100);
    CHECK(c.assignments.size() == a.assignments.size());
}

TEST_CASE("kmeans: invalid k") {
    const Matrix x = blobs(1, 5, 2, 8);
    CHECK_THROWS_AS(kmeans(x, 0, 0, 10), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(x, 6, 0, 10), std::invalid_argument);
    CHECK_NOTHROW(kmeans(x, 5, 0, 10));
}
