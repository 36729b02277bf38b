#include "critrep/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "critrep/errors.hpp"
#include "critrep/representation.hpp"

namespace critrep {

namespace {

// Normalises exp(logp) in place and returns p.
std::vector<double> normalise_log(std::vector<double>& logp) {
    const double top = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double v : logp) z += std::exp(v - top);
    const double log_z = top + std::log(z);
    std::vector<double> p(logp.size());
    for (std::size_t i = 0; i < logp.size(); ++i) {
        logp[i] -= log_z;
        p[i] = std::exp(logp[i]);
    }
    return p;
}

double residual_from_log(std::span<const double> logp, double beta, double log_M) {
    double mean = 0.0;
    std::vector<double> c(logp.size());
    for (std::size_t i = 0; i < logp.size(); ++i) {
        c[i] = logp[i] + beta * (std::log(static_cast<double>(i + 1)) - log_M);
        mean += c[i];
    }
    mean /= static_cast<double>(c.size());
    double worst = 0.0;
    for (double v : c) worst = std::max(worst, std::abs(v - mean));
    return worst;
}

std::vector<double> delta_at(std::uint64_t K_max, std::uint64_t k) {
    std::vector<double> p(K_max, 0.0);
    p[k - 1] = 1.0;
    return p;
}

}  // namespace

void MaxEntProblem::validate() const {
    if (K_max < 2) throw std::invalid_argument("MaxEntProblem: K_max must be >= 2");
    if (M < K_max) throw std::invalid_argument("MaxEntProblem: M must be >= K_max");
}

std::vector<double> power_law_distribution(std::uint64_t K_max, double beta) {
    if (!std::isfinite(beta)) throw std::invalid_argument("power_law_distribution: beta must be finite");
    std::vector<double> logp(K_max);
    for (std::uint64_t k = 1; k <= K_max; ++k) logp[k - 1] = -beta * std::log(static_cast<double>(k));
    return normalise_log(logp);
}

FixedBetaSolution solve_fixed_beta(const MaxEntProblem& problem, double beta, const IterativeOptions& opts) {
    problem.validate();
    if (!(opts.step > 0.0 && opts.step <= 1.0)) throw std::invalid_argument("solve_fixed_beta: step must be in (0, 1]");
    FixedBetaSolution sol;
    sol.beta = beta;
    sol.closed_form = power_law_distribution(problem.K_max, beta);

    const std::size_t K = problem.K_max;
    const double log_M = std::log(static_cast<double>(problem.M));
    // Gradient of H(K) + beta H(Z) is -log p - 1 - beta log(k/M); the
    // constant is absorbed by renormalisation.
    std::vector<double> logp(K, -std::log(static_cast<double>(K)));
    std::vector<double> p(K, 1.0 / static_cast<double>(K));
    for (sol.iterations = 0; sol.iterations < opts.max_iterations; ++sol.iterations) {
        if (residual_from_log(logp, beta, log_M) < opts.tolerance) break;
        for (std::size_t i = 0; i < K; ++i) {
            const double grad = -logp[i] - beta * (std::log(static_cast<double>(i + 1)) - log_M);
            logp[i] += opts.step * grad;
        }
        p = normalise_log(logp);
    }
    if (sol.iterations == opts.max_iterations)
        throw NumericError("solve_fixed_beta: no convergence within " + std::to_string(opts.max_iterations) +
                           " iterations");
    sol.iterative = std::move(p);

    for (std::size_t i = 0; i < K; ++i)
        sol.linf_difference = std::max(sol.linf_difference, std::abs(sol.closed_form[i] - sol.iterative[i]));
    return sol;
}

std::vector<double> degeneracy_from_distribution(std::span<const double> p, std::uint64_t M) {
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = static_cast<double>(M) * p[i] / static_cast<double>(i + 1);
    return m;
}

double distribution_resolution(std::span<const double> p, std::uint64_t M) {
    const double log_M = std::log(static_cast<double>(M));
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) h += p[i] * (log_M - std::log(static_cast<double>(i + 1)));
    return h;
}

double distribution_relevance(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

FixedResolutionSolution solve_fixed_resolution(const MaxEntProblem& problem, double R) {
    problem.validate();
    const double r_max = std::log(static_cast<double>(problem.M));
    const double r_min = r_max - std::log(static_cast<double>(problem.K_max));
    if (!(R >= r_min && R <= r_max))
        throw std::domain_error("solve_fixed_resolution: R = " + std::to_string(R) + " outside attainable [" +
                                std::to_string(r_min) + ", " + std::to_string(r_max) + "]");
    FixedResolutionSolution sol;
    if (R == r_max || R == r_min) {
        sol.boundary = true;
        sol.beta = R == r_max ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        sol.distribution = delta_at(problem.K_max, R == r_max ? 1 : problem.K_max);
        sol.achieved_resolution = distribution_resolution(sol.distribution, problem.M);
        return sol;
    }

    auto resolution_at = [&](double beta) {
        return distribution_resolution(power_law_distribution(problem.K_max, beta), problem.M);
    };
    // H(Z) increases with beta: its derivative is the variance of log k.
    double lo = -20.0, hi = 20.0;
    while (resolution_at(lo) > R) {
        lo *= 2.0;
        if (lo < -1e6) throw NumericError("solve_fixed_resolution: cannot bracket R from below");
    }
    while (resolution_at(hi) < R) {
        hi *= 2.0;
        if (hi > 1e6) throw NumericError("solve_fixed_resolution: cannot bracket R from above");
    }
    double beta = 0.5 * (lo + hi);
    double h = resolution_at(beta);
    while (std::abs(h - R) > 0.1 * kResolutionTolerance && sol.bisection_steps < 400) {
        if (h < R) lo = beta;
        else hi = beta;
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        beta = mid;
        h = resolution_at(beta);
        ++sol.bisection_steps;
    }
    if (std::abs(h - R) > kResolutionTolerance)
        throw NumericError("solve_fixed_resolution: bisection stalled " + std::to_string(std::abs(h - R)) +
                           " nats from target");
    sol.beta = beta;
    sol.distribution = power_law_distribution(problem.K_max, beta);
    sol.achieved_resolution = h;
    return sol;
}

ThermoView thermo_view(std::span<const double> p, double beta, std::uint64_t M) {
    if (beta == 0.0 || !std::isfinite(beta))
        throw std::domain_error("thermo_view: beta must be finite and nonzero (T = -1/beta)");
    ThermoView v;
    v.U = distribution_resolution(p, M);
    v.S = distribution_relevance(p);
    v.T = -1.0 / beta;
    v.F = v.U - v.T * v.S;
    v.lagrangian = v.S + beta * v.U;
    const double scale = 1.0 + std::abs(v.F) + std::abs(v.T * v.lagrangian);
    if (std::abs(v.F + v.T * v.lagrangian) > 1e-12 * scale)
        throw std::logic_error("thermo_view: F != -T * lagrangian");
    return v;
}

double verify_stationarity(std::span<const double> p, double beta, std::uint64_t M) {
    if (p.empty()) throw std::invalid_argument("verify_stationarity: empty distribution");
    const double log_M = std::log(static_cast<double>(M));
    std::vector<double> c(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0))
            throw std::invalid_argument("verify_stationarity: zero mass at k = " + std::to_string(i + 1));
        c[i] = std::log(p[i]);
    }
    return residual_from_log(c, beta, log_M);
}

double loglog_slope(std::span<const double> m) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!(m[i] > 0.0)) continue;
        x.push_back(std::log(static_cast<double>(i + 1)));
        y.push_back(std::log(m[i]));
    }
    return fit_line(x, y).slope;
}

}  // namespace critrep
