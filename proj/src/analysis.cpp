#include "critrep/analysis.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <variant>

#include "critrep/errors.hpp"
#include "critrep/mlp.hpp"
#include "critrep/rbm.hpp"

namespace critrep {

namespace {

constexpr std::size_t kChunkRows = 2048;

}  // namespace

std::size_t hidden_layer_count(const AnyModel& model) {
    if (std::holds_alternative<RbmModel>(model)) return 1;
    return std::get<MlpModel>(model).depth() - 1;
}

std::size_t hidden_layer_width(const AnyModel& model, std::size_t layer) {
    if (layer == 0 || layer > hidden_layer_count(model))
        throw std::invalid_argument("hidden layer " + std::to_string(layer) + " does not exist");
    if (const auto* r = std::get_if<RbmModel>(&model)) return r->n_hidden;
    return std::get<MlpModel>(model).layer_dims[layer];
}

double default_threshold(const AnyModel& model) {
    if (const auto* m = std::get_if<MlpModel>(&model); m && m->activation == Activation::relu)
        return kReluThreshold;
    return kSigmoidThreshold;
}

std::vector<std::vector<std::vector<BinaryCode>>> hidden_codes(const AnyModel& model, const Matrix& x,
                                                               std::span<const std::size_t> layers,
                                                               std::span<const double> thresholds) {
    for (auto l : layers) hidden_layer_width(model, l);
    const std::size_t input_width =
        std::visit([](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, RbmModel>) return m.n_visible;
            else return m.layer_dims.front();
        }, model);
    if (x.cols() != input_width)
        throw DimensionError("analysis input has " + std::to_string(x.cols()) + " features, model expects " +
                             std::to_string(input_width));

    std::vector<std::vector<std::vector<BinaryCode>>> out(thresholds.size(),
                                                          std::vector<std::vector<BinaryCode>>(layers.size()));
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < x.rows(); start += kChunkRows) {
        const std::size_t end = std::min(x.rows(), start + kChunkRows);
        idx.resize(end - start);
        for (std::size_t i = start; i < end; ++i) idx[i - start] = i;
        const Matrix chunk = x.gather_rows(idx);
        std::vector<Matrix> acts;
        if (const auto* r = std::get_if<RbmModel>(&model)) {
            acts = {chunk, rbm_hidden_probabilities(*r, chunk)};
        } else {
            acts = mlp_forward(std::get<MlpModel>(model), chunk);
        }
        for (std::size_t t = 0; t < thresholds.size(); ++t)
            for (std::size_t l = 0; l < layers.size(); ++l) {
                auto codes = binarize(acts[layers[l]], thresholds[t]);
                auto& dst = out[t][l];
                dst.insert(dst.end(), std::make_move_iterator(codes.begin()), std::make_move_iterator(codes.end()));
            }
    }
    return out;
}

CodeAnalysis analyze_codes(std::span<const BinaryCode> codes, const std::vector<int>* labels,
                           std::optional<double> k_cutoff) {
    CodeAnalysis a;
    a.width = codes.empty() ? 0 : codes.front().width();
    const CodeHistogram h = labels ? count_codes(codes, std::span<const int>(*labels)) : count_codes(codes);
    a.info = labels ? entropies_with_labels(h) : summarize(h);
    a.spectrum = degeneracy(h);
    a.size_cv = size_coefficient_of_variation(a.spectrum);
    a.binned = log_bin(a.spectrum, kLogBinBase);
    const DegeneracySpectrum fitted = k_cutoff ? truncate_above(a.spectrum, *k_cutoff) : a.spectrum;
    try {
        a.fit = fit_power_law(fitted);
        a.power_law = passes_gate(*a.fit);
    } catch (const FitError& e) {
        a.fit_error = e.what();
    }
    return a;
}

nlohmann::json to_json(const InfoSummary& s) {
    nlohmann::json j = {{"M", s.M}, {"distinct_codes", s.distinct}, {"H_Z", s.H_Z}, {"H_K", s.H_K}};
    j["H_Y"] = s.H_Y ? nlohmann::json(*s.H_Y) : nlohmann::json(nullptr);
    j["H_YZ"] = s.H_YZ ? nlohmann::json(*s.H_YZ) : nlohmann::json(nullptr);
    j["I_ZY"] = s.I_ZY ? nlohmann::json(*s.I_ZY) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const PowerLawFit& f) {
    return {{"beta", f.beta},         {"k_min", f.k_min},       {"k_max", f.k_max},
            {"ks_distance", f.ks_distance}, {"n_tail", f.n_tail}, {"decades", f.decades},
            {"ls_slope", f.ls_slope}, {"ls_r2", f.ls_r2},       {"ls_bins", f.ls_bins}};
}

nlohmann::json to_json(const CodeAnalysis& a) {
    nlohmann::json j = {{"layer", a.layer},
                        {"width", a.width},
                        {"threshold", a.threshold},
                        {"info", to_json(a.info)},
                        {"size_cv", a.size_cv},
                        {"distinct_frequencies", a.spectrum.points().size()},
                        {"k_max", a.spectrum.k_max()},
                        {"power_law", a.power_law}};
    j["fit"] = a.fit ? to_json(*a.fit) : nlohmann::json(nullptr);
    j["fit_error"] = a.fit ? nlohmann::json(nullptr) : nlohmann::json(a.fit_error);
    return j;
}

}  // namespace critrep
