#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace critrep {

/// Frequencies live on k = 1..K_max; `M` is the total mass. p(k) is the
/// fraction of mass at frequency k, p(k) = k m(k) / M.
struct MaxEntProblem {
    std::uint64_t K_max = 1000;
    std::uint64_t M = 10000;
    void validate() const;  // K_max >= 2, M >= K_max
};

struct IterativeOptions {
    double step = 0.5;                // mirror-ascent step in (0, 1]
    double tolerance = 1e-12;         // stationarity residual
    std::size_t max_iterations = 10000;
};

struct FixedBetaSolution {
    double beta = 0;
    std::vector<double> closed_form;  // p(k), index k-1
    std::vector<double> iterative;
    std::size_t iterations = 0;
    double linf_difference = 0;       // max_k |closed - iterative| on p(k)
};

/// Stationary point of H(K) + beta H(Z) under normalisation.
/// Closed form p(k) ~ k^-beta, and exponentiated-gradient ascent from the
/// uniform distribution. Throws NumericError if the ascent does not reach
/// the tolerance within the budget.
FixedBetaSolution solve_fixed_beta(const MaxEntProblem& problem, double beta, const IterativeOptions& opts = {});

/// Closed-form p(k) ~ k^-beta on 1..K_max, computed in the log domain.
std::vector<double> power_law_distribution(std::uint64_t K_max, double beta);

/// m(k) = M p(k) / k.
std::vector<double> degeneracy_from_distribution(std::span<const double> p, std::uint64_t M);

/// H(Z) = -sum p(k) log(k/M).
double distribution_resolution(std::span<const double> p, std::uint64_t M);
/// H(K) = -sum p(k) log p(k).
double distribution_relevance(std::span<const double> p);

struct FixedResolutionSolution {
    double beta = 0;   // +-infinity at a boundary
    bool boundary = false;
    std::vector<double> distribution;
    double achieved_resolution = 0;
    std::size_t bisection_steps = 0;
};

inline constexpr double kResolutionTolerance = 1e-9;

/// Bisection on beta so that H(Z) of the fixed-beta solution equals R.
/// R equal to an attainable extreme returns the delta distribution with
/// boundary = true; R outside [log M - log K_max, log M] throws
/// std::domain_error.
FixedResolutionSolution solve_fixed_resolution(const MaxEntProblem& problem, double R);

struct ThermoView {
    double U = 0;        // H(Z)
    double S = 0;        // H(K)
    double T = 0;        // -1 / beta
    double F = 0;        // U - T S
    double lagrangian = 0;  // S + beta U
};

/// Throws std::domain_error for beta == 0 (T undefined) and std::logic_error
/// if F = -T * lagrangian fails to hold.
ThermoView thermo_view(std::span<const double> p, double beta, std::uint64_t M);

/// max_k |c_k - mean(c)| with c_k = log p(k) + beta log(k/M).
/// Throws std::invalid_argument if any p(k) <= 0.
double verify_stationarity(std::span<const double> p, double beta, std::uint64_t M);

/// Least-squares slope of log m(k) against log k over the whole support.
double loglog_slope(std::span<const double> m);

}  // namespace critrep
