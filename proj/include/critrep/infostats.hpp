#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "critrep/representation.hpp"

namespace critrep {

// All entropies are in nats.

/// H(Z) = -sum_k (k m(k)/M) log(k/M).
double resolution(const DegeneracySpectrum& s);
/// H(K) = -sum_k (k m(k)/M) log(k m(k)/M).
double relevance(const DegeneracySpectrum& s);

/// Same quantities summed over codes instead of frequencies.
double resolution(const CodeHistogram& h);
double relevance(const CodeHistogram& h);

struct InfoSummary {
    double H_Z = 0;
    double H_K = 0;
    std::optional<double> H_Y;
    std::optional<double> H_YZ;
    std::optional<double> I_ZY;
    std::uint64_t M = 0;
    std::size_t distinct = 0;
};

/// H_Z and H_K only; label fields stay empty.
InfoSummary summarize(const CodeHistogram& h);

/// Plug-in H(Y), H(Y,Z) and I(Z;Y) from joint counts. I(Z;Y) is summed
/// directly as sum k_yz/M log(k_yz M / (k_y k_z)), not by subtraction.
InfoSummary entropies_with_labels(const CodeHistogram& h);

/// Plug-in entropy of a count vector; zero counts are ignored.
double entropy_of_counts(std::span<const std::uint64_t> counts);

}  // namespace critrep
