#pragma once

// Reference implementations used only by tests. Each one is written
// independently of the library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "critrep/dataset.hpp"
#include "critrep/matrix.hpp"
#include "critrep/mlp.hpp"
#include "critrep/representation.hpp"
#include "critrep/rng.hpp"

namespace oracle {

using critrep::Matrix;

inline Matrix triple_loop(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
            c(i, j) = static_cast<double>(s);
        }
    return c;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed, double lo = -1, double hi = 1) {
    critrep::Rng rng(seed);
    Matrix m(r, c);
    for (auto& v : m.values()) v = lo + (hi - lo) * rng.uniform();
    return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
    return d;
}

// Zipf sampler on {1, ..., k_max} with P(k) proportional to k^-s, by
// inversion of the tabulated CDF.
class Zipf {
public:
    Zipf(double s, std::uint64_t k_max) : cdf_(k_max) {
        double acc = 0;
        for (std::uint64_t k = 1; k <= k_max; ++k) {
            acc += std::pow(static_cast<double>(k), -s);
            cdf_[k - 1] = acc;
        }
        for (auto& v : cdf_) v /= acc;
    }
    std::uint64_t operator()(critrep::Rng& rng) const {
        const double u = rng.uniform();
        return static_cast<std::uint64_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

// n Zipf draws read as cluster sizes: m(k) = number of clusters of size k.
inline critrep::DegeneracySpectrum zipf_sizes(double s, std::size_t n, std::uint64_t seed,
                                              std::uint64_t k_max = 1000000) {
    Zipf z(s, k_max);
    critrep::Rng rng(seed);
    std::vector<std::uint64_t> sizes(n);
    for (auto& v : sizes) v = z(rng);
    return critrep::DegeneracySpectrum::from_sizes(sizes);
}

// Periodic-lattice energy by explicit right and down neighbours.
inline double ising_energy(const std::vector<int>& s, int L, double J) {
    double e = 0;
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c) {
            const int v = s[r * L + c];
            e -= J * v * s[r * L + (c + 1) % L];
            e -= J * v * s[((r + 1) % L) * L + c];
        }
    return e;
}

struct IsingMoments {
    double mean_energy = 0;
    double var_energy = 0;
    std::map<double, double> energy_pmf;
};

// Exact Boltzmann moments by enumerating all 2^(L*L) states.
inline IsingMoments enumerate_ising(int L, double T, double J = 1.0) {
    const int n = L * L;
    std::vector<int> s(n);
    std::map<double, double> weight;
    for (std::uint64_t state = 0; state < (1ULL << n); ++state) {
        for (int i = 0; i < n; ++i) s[i] = (state >> i) & 1U ? 1 : -1;
        weight[ising_energy(s, L, J)] += 1.0;
    }
    double z = 0, e1 = 0, e2 = 0;
    const double e0 = weight.begin()->first;
    for (auto& [e, g] : weight) {
        g *= std::exp(-(e - e0) / T);
        z += g;
    }
    IsingMoments m;
    for (const auto& [e, g] : weight) {
        m.energy_pmf[e] = g / z;
        e1 += e * g / z;
        e2 += e * e * g / z;
    }
    m.mean_energy = e1;
    m.var_energy = e2 - e1 * e1;
    return m;
}

// Worst relative error between analytic gradients and central finite
// differences of mlp_loss. Tensors larger than `per_tensor` entries are
// checked on that many coordinates drawn from `seed`. The denominator is
// max(|analytic|, |numeric|, floor * max(1, |loss|)), so entries far below
// the loss's rounding noise are compared on an absolute scale.
inline double fd_relative_error(const critrep::MlpModel& m, const Matrix& x, const Matrix& target,
                                const critrep::MlpGradients& g, std::size_t per_tensor, std::uint64_t seed,
                                double h = 1e-4, double floor = 1e-5) {
    critrep::MlpModel work = m;
    critrep::Rng rng(seed);
    const double scale = floor * std::max(1.0, std::abs(critrep::mlp_loss(m, x, target)));
    double worst = 0;
    auto probe = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double up = critrep::mlp_loss(work, x, target);
        param = keep - h;
        const double down = critrep::mlp_loss(work, x, target);
        param = keep;
        const double numeric = (up - down) / (2 * h);
        worst = std::max(worst, std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), scale}));
    };
    auto indices = [&](std::size_t n) {
        std::vector<std::size_t> idx;
        if (n <= per_tensor) {
            idx.resize(n);
            std::iota(idx.begin(), idx.end(), 0);
        } else {
            for (std::size_t i = 0; i < per_tensor; ++i) idx.push_back(rng.below(n));
        }
        return idx;
    };
    for (std::size_t l = 0; l < m.depth(); ++l) {
        for (std::size_t i : indices(m.weights[l].size())) probe(work.weights[l].values()[i], g.weights[l].values()[i]);
        for (std::size_t i : indices(m.biases[l].size())) probe(work.biases[l][i], g.biases[l][i]);
    }
    return worst;
}

// Plug-in entropy of a count table, straight from the definition.
inline double entropy(const std::vector<double>& counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double h = 0;
    for (double c : counts)
        if (c > 0) h -= c / total * std::log(c / total);
    return h;
}

}  // namespace oracle
