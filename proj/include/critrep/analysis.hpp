#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "critrep/checkpoint.hpp"
#include "critrep/infostats.hpp"
#include "critrep/powerlaw.hpp"
#include "critrep/representation.hpp"

namespace critrep {

/// Number of hidden layers exposed for analysis: one for an RBM, depth - 1
/// for an MLP (the output layer is excluded).
std::size_t hidden_layer_count(const AnyModel& model);
std::size_t hidden_layer_width(const AnyModel& model, std::size_t layer);

/// 0.5 for sigmoid units (MLP and RBM), 0 for ReLU.
double default_threshold(const AnyModel& model);

/// Binary codes of the requested hidden layers (1-based) at every threshold:
/// result[t][l] holds one code per row of x for layers[l] at thresholds[t].
/// RBM codes threshold p(z|x). Rows are pushed through in chunks.
std::vector<std::vector<std::vector<BinaryCode>>> hidden_codes(const AnyModel& model, const Matrix& x,
                                                               std::span<const std::size_t> layers,
                                                               std::span<const double> thresholds);

struct CodeAnalysis {
    std::size_t layer = 0;  // 0 = input pixels
    std::size_t width = 0;
    double threshold = 0;
    InfoSummary info;
    double size_cv = 0;
    DegeneracySpectrum spectrum;
    std::vector<BinnedPoint> binned;  // raw spectrum, base kLogBinBase
    std::optional<PowerLawFit> fit;
    std::string fit_error;            // why `fit` is empty
    bool power_law = false;           // fit present and passes_gate
};

/// Histogram, entropies, spectrum and fit for one code sequence. Labels add
/// H(Y), H(Y,Z), I(Z;Y). `k_cutoff` drops frequencies above it before fitting.
CodeAnalysis analyze_codes(std::span<const BinaryCode> codes, const std::vector<int>* labels,
                           std::optional<double> k_cutoff = std::nullopt);

nlohmann::json to_json(const InfoSummary& s);
nlohmann::json to_json(const PowerLawFit& f);
nlohmann::json to_json(const CodeAnalysis& a);

}  // namespace critrep
