#include "critrep/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "critrep/kernels.hpp"
#include "critrep/rng.hpp"

namespace critrep {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

Matrix plus_plus_seeds(const Matrix& data, std::size_t k, Rng& rng) {
    const std::size_t n = data.rows();
    Matrix centroids(k, data.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);

    std::size_t pick = rng.below(n);
    for (std::size_t c = 0; c < k; ++c) {
        chosen[pick] = 1;
        std::copy(data.row(pick).begin(), data.row(pick).end(), centroids.row(c).begin());
        if (c + 1 == k) break;
        double total = 0.0;
#pragma omp parallel for reduction(+ : total) schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            const auto ui = static_cast<std::size_t>(i);
            d2[ui] = chosen[ui] ? 0.0 : std::min(d2[ui], squared_distance(data.row(ui), centroids.row(c)));
            total += d2[ui];
        }
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (d2[i] > 0.0 && acc > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n)  // rounding left target past the last positive weight
                for (std::size_t i = n; i-- > 0;)
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
        } else {
            // Every remaining point duplicates a centroid: choose uniformly among unchosen.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) free.push_back(i);
            pick = free[rng.below(free.size())];
        }
    }
    return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& data, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
    const std::size_t n = data.rows(), d = data.cols();
    if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
    if (k > n)
        throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " exceeds n_samples = " + std::to_string(n));
    if (max_iters == 0) throw std::invalid_argument("kmeans: max_iters must be >= 1");

    Rng rng(seed);
    KMeansResult r;
    r.centroids = plus_plus_seeds(data, k, rng);
    r.assignments.assign(n, 0);
    std::vector<std::uint32_t> next(n);
    std::vector<double> dist2(n);

    for (r.iterations = 1;; ++r.iterations) {
        kernels::nearest_centroid(data, r.centroids, next, dist2);
        const bool unchanged = r.iterations > 1 && next == r.assignments;
        r.assignments.swap(next);
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            inertia += squared_distance(data.row(i), r.centroids.row(r.assignments[i]));
        r.inertia_history.push_back(inertia);
        r.inertia = inertia;
        if (unchanged) {
            r.converged = true;
            break;
        }
        if (r.iterations == max_iters) break;

        // Centroid update: fixed serial summation order.
        Matrix sums(k, d);
        std::vector<std::uint64_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto dst = sums.row(r.assignments[i]);
            const auto src = data.row(i);
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            ++sizes[r.assignments[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;
            auto dst = r.centroids.row(c);
            const auto src = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) dst[j] = src[j] / static_cast<double>(sizes[c]);
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[r.assignments[i]] <= 1) continue;  // never empty another cluster
                const double dd = squared_distance(data.row(i), r.centroids.row(r.assignments[i]));
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            --sizes[r.assignments[far]];
            r.assignments[far] = static_cast<std::uint32_t>(c);
            sizes[c] = 1;
            std::copy(data.row(far).begin(), data.row(far).end(), r.centroids.row(c).begin());
        }
    }

    r.cluster_sizes.assign(k, 0);
    for (auto a : r.assignments) ++r.cluster_sizes[a];
    return r;
}

DegeneracySpectrum cluster_size_spectrum(const KMeansResult& r) {
    return DegeneracySpectrum::from_sizes(r.cluster_sizes);
}

}  // namespace critrep
