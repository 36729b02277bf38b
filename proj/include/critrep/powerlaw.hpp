#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "critrep/representation.hpp"

namespace critrep {

class FitError : public std::runtime_error {
public:
    enum class Kind { too_few_points, degenerate_tail };
    FitError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct PowerLawFit {
    double beta = 0;          // m(k) ~ k^-(beta+1)
    std::uint64_t k_min = 1;
    std::uint64_t k_max = 1;  // largest observed k; upper end of the fitted support
    double ks_distance = 0;
    std::uint64_t n_tail = 0;  // codes with k >= k_min
    double decades = 0;        // log10(k_max / k_min)
    double ls_slope = 0;       // log-binned least-squares slope over the tail
    double ls_r2 = 0;
    std::size_t ls_bins = 0;
};

inline constexpr std::uint64_t kMinTailObservations = 10;
inline constexpr std::size_t kMinDistinctFrequencies = 10;
inline constexpr double kLogBinBase = 2.0;

/// Discrete power law P(k) ~ k^-a on k_min..k_max, k_max the largest observed
/// frequency; each code is one observation of its k. a = beta + 1 is the
/// maximum-likelihood value and k_min minimises the KS distance among
/// cutoffs leaving at least kMinTailObservations codes and
/// kMinDistinctFrequencies distinct k.
/// Throws FitError(degenerate_tail) when all k are equal, and
/// FitError(too_few_points) with fewer than kMinDistinctFrequencies k values.
PowerLawFit fit_power_law(const DegeneracySpectrum& s);

/// MLE for a fixed cutoff. Requires at least two distinct k at or above k_min.
PowerLawFit fit_power_law_at(const DegeneracySpectrum& s, std::uint64_t k_min);

/// sum_{k=a}^{b} k^-alpha, exact for short ranges, Euler-Maclaurin beyond.
double power_sum(std::uint64_t a, std::uint64_t b, double alpha);

struct ShapeGate {
    double min_decades = 1.5;
    double min_r2 = 0.9;
};

/// Plausibility of a power-law reading: span and log-binned fit quality.
bool passes_gate(const PowerLawFit& f, const ShapeGate& gate = {});

}  // namespace critrep
