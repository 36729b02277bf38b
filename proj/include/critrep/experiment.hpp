#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "critrep/analysis.hpp"
#include "critrep/checkpoint.hpp"
#include "critrep/dataset.hpp"
#include "critrep/ising.hpp"
#include "critrep/kmeans.hpp"
#include "critrep/maxent.hpp"
#include "critrep/mlp.hpp"
#include "critrep/train_config.hpp"

namespace critrep {

inline constexpr const char* kVersion = "0.1.0";

// Config schema (JSON). Relative paths resolve against the config file.
//
// {
//   "name": "rbm-mnist",
//   "model": "rbm" | "mlp" | "autoencoder",
//   "layers": [784, 64],             // RBM: [visible, hidden]
//   "activation": "sigmoid" | "relu",
//   "manifest": "../data/manifest.json",
//   "train_data":    <dataset>,
//   "test_data":     <dataset>,      // optional; classifiers report test accuracy
//   "analysis_data": <dataset>,      // optional; defaults to train_data
//   "train": {"epochs": 20, "batch_size": 32, "learning_rate": 0.003, "seed": 1,
//             "cd_steps": 1, "snapshot_epochs": [0, 1, 10, 20],
//             "stop_at_test_accuracy": 0.85},
//   "analysis": {"thresholds": [0.5], "labels": true, "k_cutoff": null,
//                "layers": [], "threshold_sweep": false, "input_spectrum": false}
// }
//
// <dataset> is one of
//   {"name": "mnist-train", "limit": 10000, "label_range": [lo, hi]}
//   {"images": "x.idx", "labels": "y.idx" | null, "limit": 0}
//   {"ising": {"temperature": 2.26, "side": 10, "coupling": 1, "sweeps_equilibrate": 10000,
//              "sweeps_between_samples": 10, "boundary": "periodic", "samples": 50000,
//              "seed": 1, "chains": 1}}

enum class ModelKind { rbm, mlp, autoencoder };

struct IsingSource {
    IsingParams params;
    std::size_t samples = kIsingDefaultSamples;
    std::uint64_t seed = 1;
    unsigned chains = 1;
};

struct DatasetRef {
    std::optional<std::string> name;
    std::optional<std::filesystem::path> images;
    std::optional<std::filesystem::path> labels;
    std::optional<IsingSource> ising;
    std::size_t limit = 0;  // 0 keeps every sample
    std::optional<std::pair<int, int>> label_range;

    static DatasetRef from_json(const nlohmann::json& j, const std::filesystem::path& base);
    nlohmann::json to_json() const;
};

struct AnalysisOptions {
    std::vector<double> thresholds;   // empty: the model's default threshold
    bool labels = true;
    std::optional<double> k_cutoff;
    std::vector<std::size_t> layers;  // 1-based; empty: every hidden layer
    bool threshold_sweep = false;
    bool input_spectrum = false;      // also analyse the binarised inputs as codes

    static AnalysisOptions from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

inline const std::vector<double> kSweepThresholds = {0.3, 0.4, 0.5, 0.6, 0.7};

struct ExperimentConfig {
    std::string name = "experiment";
    ModelKind model = ModelKind::mlp;
    std::vector<std::size_t> layers;
    Activation activation = Activation::sigmoid;
    std::optional<std::filesystem::path> manifest;
    DatasetRef train_data;
    std::optional<DatasetRef> test_data;
    std::optional<DatasetRef> analysis_data;
    TrainConfig train;
    AnalysisOptions analysis;

    /// Throws ConfigError naming the offending field.
    static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base);
    static ExperimentConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

/// Loads and validates a dataset. A missing file raises ConfigError with its path.
LabeledDataset load_dataset(const DatasetRef& ref, const std::optional<std::filesystem::path>& manifest);

/// Input files a dataset reference reads (empty for synthetic data). A
/// missing file raises ConfigError with its path.
std::vector<std::filesystem::path> dataset_files(const DatasetRef& ref,
                                                 const std::optional<std::filesystem::path>& manifest);

/// Records inputs, seeds and output hashes; written last as run_manifest.json.
/// Output paths are stored relative to the run directory.
class RunRecord {
public:
    RunRecord(std::string command, std::filesystem::path out_dir);
    void set_config(nlohmann::json config) { config_ = std::move(config); }
    void add_input(const std::filesystem::path& file);
    void add_seed(const std::string& what, std::uint64_t seed) { seeds_[what] = seed; }
    void add_output(const std::filesystem::path& file);
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path(const std::string& file_name) const { return dir_ / file_name; }
    void write() const;

private:
    std::string command_;
    std::filesystem::path dir_;
    nlohmann::json config_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::uint64_t> seeds_;
    std::vector<std::filesystem::path> outputs_;
};

/// Writes `text` to `path` and registers it.
void write_text(RunRecord& run, const std::string& file_name, const std::string& text);
void write_json(RunRecord& run, const std::string& file_name, const nlohmann::json& j);

AnyModel create_model(const ExperimentConfig& cfg, std::size_t input_width);

struct TrainOutcome {
    AnyModel model;
    std::vector<std::pair<std::size_t, AnyModel>> snapshots;
    std::vector<EpochMetrics> history;
};

/// Trains the configured model and, when `run` is given, writes
/// checkpoint_epoch_<E>.crck per snapshot, model.crck and metrics.csv.
TrainOutcome train_model(const ExperimentConfig& cfg, const LabeledDataset& train, const LabeledDataset* test,
                         RunRecord* run);

struct AnalysisOutcome {
    std::vector<CodeAnalysis> layers;         // primary threshold, one per selected layer
    std::vector<CodeAnalysis> sweep;          // threshold sweep, layer-major
    std::optional<CodeAnalysis> inputs;       // binarised inputs at 0.5
};

AnalysisOutcome analyze_model(const AnyModel& model, const LabeledDataset& data, const AnalysisOptions& opts);

/// <prefix>layer<L>_spectrum.csv, _binned.csv, _loglog.dat per layer and
/// <prefix>analysis.json.
nlohmann::json write_analysis(RunRecord& run, const AnalysisOutcome& a, const std::string& prefix = "");

std::string metrics_csv(const std::vector<EpochMetrics>& history);

/// Full pipeline: train with snapshots, analyse every snapshot, then write
/// report.json and report.md.
nlohmann::json run_report(const ExperimentConfig& cfg, RunRecord& run);

nlohmann::json to_json(const KMeansResult& r, bool with_assignments);
nlohmann::json to_json(const FixedBetaSolution& s, std::uint64_t M);
nlohmann::json to_json(const FixedResolutionSolution& s, std::uint64_t M);

ModelKind parse_model_kind(const std::string& s);
std::string to_string(ModelKind k);

}  // namespace critrep
