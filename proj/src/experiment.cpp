#include "critrep/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <variant>

#include "critrep/errors.hpp"
#include "critrep/manifest.hpp"
#include "critrep/rbm.hpp"

namespace critrep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

Boundary parse_boundary(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "free") return Boundary::free;
    throw ConfigError("boundary must be 'periodic' or 'free', got '" + s + "'");
}

Activation parse_activation(const std::string& s) {
    if (s == "sigmoid") return Activation::sigmoid;
    if (s == "relu") return Activation::relu;
    throw ConfigError("activation must be 'sigmoid' or 'relu', got '" + s + "'");
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string format_number(double v) {
    if (!std::isfinite(v)) return "";
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

const LabeledDataset& require_labels(const LabeledDataset& d, const char* what) {
    if (!d.labels) throw ConfigError(std::string(what) + " has no labels");
    return d;
}

}  // namespace

ModelKind parse_model_kind(const std::string& s) {
    if (s == "rbm") return ModelKind::rbm;
    if (s == "mlp") return ModelKind::mlp;
    if (s == "autoencoder") return ModelKind::autoencoder;
    throw ConfigError("model must be 'rbm', 'mlp' or 'autoencoder', got '" + s + "'");
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::rbm: return "rbm";
        case ModelKind::mlp: return "mlp";
        case ModelKind::autoencoder: return "autoencoder";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Config

DatasetRef DatasetRef::from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("dataset reference must be an object");
    DatasetRef r;
    r.limit = field<std::size_t>(j, "limit", 0);
    if (j.contains("label_range") && !j["label_range"].is_null()) {
        const auto v = j["label_range"].get<std::vector<int>>();
        if (v.size() != 2 || v[0] > v[1]) throw ConfigError("label_range must be [lo, hi] with lo <= hi");
        r.label_range = std::pair{v[0], v[1]};
    }
    const int kinds = j.contains("name") + j.contains("images") + j.contains("ising");
    if (kinds != 1) throw ConfigError("dataset reference needs exactly one of 'name', 'images', 'ising'");
    if (j.contains("name")) {
        r.name = j["name"].get<std::string>();
    } else if (j.contains("images")) {
        r.images = resolve(base, j["images"].get<std::string>());
        if (j.contains("labels") && !j["labels"].is_null()) r.labels = resolve(base, j["labels"].get<std::string>());
    } else {
        const json& s = j["ising"];
        IsingSource src;
        src.params.temperature = field(s, "temperature", src.params.temperature);
        src.params.side = field(s, "side", src.params.side);
        src.params.coupling = field(s, "coupling", src.params.coupling);
        src.params.sweeps_equilibrate = field(s, "sweeps_equilibrate", src.params.sweeps_equilibrate);
        src.params.sweeps_between_samples = field(s, "sweeps_between_samples", src.params.sweeps_between_samples);
        src.params.boundary = parse_boundary(field<std::string>(s, "boundary", "periodic"));
        src.samples = field(s, "samples", src.samples);
        src.seed = field(s, "seed", src.seed);
        src.chains = field(s, "chains", src.chains);
        try {
            src.params.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (src.samples == 0 || src.chains == 0) throw ConfigError("ising samples and chains must be >= 1");
        r.ising = src;
    }
    return r;
}

json DatasetRef::to_json() const {
    json j;
    if (name) j["name"] = *name;
    if (images) j["images"] = images->string();
    if (images) j["labels"] = labels ? json(labels->string()) : json(nullptr);
    if (ising) {
        const auto& p = ising->params;
        j["ising"] = {{"temperature", p.temperature},
                      {"side", p.side},
                      {"coupling", p.coupling},
                      {"sweeps_equilibrate", p.sweeps_equilibrate},
                      {"sweeps_between_samples", p.sweeps_between_samples},
                      {"boundary", p.boundary == Boundary::periodic ? "periodic" : "free"},
                      {"samples", ising->samples},
                      {"seed", ising->seed},
                      {"chains", ising->chains}};
    }
    j["limit"] = limit;
    if (label_range) j["label_range"] = {label_range->first, label_range->second};
    return j;
}

AnalysisOptions AnalysisOptions::from_json(const json& j) {
    AnalysisOptions a;
    if (j.is_null()) return a;
    a.thresholds = field(j, "thresholds", a.thresholds);
    a.labels = field(j, "labels", a.labels);
    if (j.contains("k_cutoff") && !j["k_cutoff"].is_null()) a.k_cutoff = j["k_cutoff"].get<double>();
    a.layers = field(j, "layers", a.layers);
    a.threshold_sweep = field(j, "threshold_sweep", a.threshold_sweep);
    a.input_spectrum = field(j, "input_spectrum", a.input_spectrum);
    for (double t : a.thresholds)
        if (!std::isfinite(t)) throw ConfigError("analysis thresholds must be finite");
    return a;
}

json AnalysisOptions::to_json() const {
    return {{"thresholds", thresholds},
            {"labels", labels},
            {"k_cutoff", k_cutoff ? json(*k_cutoff) : json(nullptr)},
            {"layers", layers},
            {"threshold_sweep", threshold_sweep},
            {"input_spectrum", input_spectrum}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.name = field<std::string>(j, "name", c.name);
    c.model = parse_model_kind(field<std::string>(j, "model", "mlp"));
    c.activation = parse_activation(field<std::string>(j, "activation", "sigmoid"));
    c.layers = field(j, "layers", c.layers);
    if (c.layers.empty()) {
        switch (c.model) {
            case ModelKind::rbm: c.layers = {784, kRbmPresetHidden}; break;
            case ModelKind::mlp: c.layers = supervised_preset_dims(); break;
            case ModelKind::autoencoder: c.layers = autoencoder_preset_dims(); break;
        }
    }
    if (c.model == ModelKind::rbm && c.layers.size() != 2) throw ConfigError("rbm layers must be [visible, hidden]");
    if (c.layers.size() < 2) throw ConfigError("layers needs at least two entries");
    if (j.contains("manifest") && !j["manifest"].is_null()) c.manifest = resolve(base, j["manifest"].get<std::string>());
    if (!j.contains("train_data")) throw ConfigError("config lacks 'train_data'");
    c.train_data = DatasetRef::from_json(j["train_data"], base);
    if (j.contains("test_data") && !j["test_data"].is_null()) c.test_data = DatasetRef::from_json(j["test_data"], base);
    if (j.contains("analysis_data") && !j["analysis_data"].is_null())
        c.analysis_data = DatasetRef::from_json(j["analysis_data"], base);

    const json t = j.value("train", json::object());
    c.train.epochs = field(t, "epochs", c.train.epochs);
    c.train.batch_size = field(t, "batch_size", c.train.batch_size);
    c.train.learning_rate = field(t, "learning_rate", c.train.learning_rate);
    c.train.seed = field(t, "seed", c.train.seed);
    c.train.cd_steps = field(t, "cd_steps", c.train.cd_steps);
    c.train.snapshot_epochs = field(t, "snapshot_epochs", c.train.snapshot_epochs);
    if (t.contains("stop_at_test_accuracy") && !t["stop_at_test_accuracy"].is_null())
        c.train.stop_at_test_accuracy = t["stop_at_test_accuracy"].get<double>();
    try {
        c.train.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.analysis = AnalysisOptions::from_json(j.value("analysis", json(nullptr)));
    return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

json ExperimentConfig::to_json() const {
    json j = {{"name", name},
              {"model", critrep::to_string(model)},
              {"layers", layers},
              {"activation", activation == Activation::relu ? "relu" : "sigmoid"},
              {"manifest", manifest ? json(manifest->string()) : json(nullptr)},
              {"train_data", train_data.to_json()},
              {"test_data", test_data ? test_data->to_json() : json(nullptr)},
              {"analysis_data", analysis_data ? analysis_data->to_json() : json(nullptr)},
              {"analysis", analysis.to_json()}};
    j["train"] = {{"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"learning_rate", train.learning_rate},
                  {"seed", train.seed},
                  {"cd_steps", train.cd_steps},
                  {"snapshot_epochs", train.snapshot_epochs},
                  {"stop_at_test_accuracy",
                   train.stop_at_test_accuracy ? json(*train.stop_at_test_accuracy) : json(nullptr)}};
    return j;
}

// ---------------------------------------------------------------------------
// Datasets

namespace {

std::vector<fs::path> referenced_files(const DatasetRef& ref, const std::optional<fs::path>& manifest) {
    if (ref.ising) return {};
    if (ref.images) {
        std::vector<fs::path> files{*ref.images};
        if (ref.labels) files.push_back(*ref.labels);
        return files;
    }
    if (!manifest) throw ConfigError("dataset '" + *ref.name + "' given by name but no manifest configured");
    if (!fs::exists(*manifest)) throw ConfigError("manifest not found: " + manifest->string());
    const Manifest m = Manifest::load(*manifest);
    if (!m.contains(*ref.name)) throw ConfigError("dataset '" + *ref.name + "' not in manifest " + manifest->string());
    const ManifestEntry e = m.resolve(*ref.name);
    std::vector<fs::path> files{e.images};
    if (e.labels) files.push_back(*e.labels);
    return files;
}

}  // namespace

std::vector<fs::path> dataset_files(const DatasetRef& ref, const std::optional<fs::path>& manifest) {
    auto files = referenced_files(ref, manifest);
    for (const auto& f : files)
        if (!fs::exists(f)) throw ConfigError("dataset file not found: " + f.string());
    return files;
}

LabeledDataset load_dataset(const DatasetRef& ref, const std::optional<fs::path>& manifest) {
    LabeledDataset ds;
    if (ref.ising) {
        ds = generate_ising_dataset(ref.ising->params, ref.ising->samples, Rng(ref.ising->seed), ref.ising->chains);
    } else {
        dataset_files(ref, manifest);
        if (ref.images) ds = load_idx(*ref.images, ref.labels);
        else ds = Manifest::load(*manifest).load_dataset(*ref.name);
    }
    if (ref.label_range) {
        if (!ds.labels) throw ConfigError("label_range given for a dataset without labels");
        ds = filter_label_range(ds, ref.label_range->first, ref.label_range->second);
    }
    if (ref.limit) ds = head(ds, ref.limit);
    ds.validate();
    return ds;
}

// ---------------------------------------------------------------------------
// Run records

RunRecord::RunRecord(std::string command, fs::path out_dir) : command_(std::move(command)), dir_(std::move(out_dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
}

void RunRecord::add_input(const fs::path& file) { inputs_[file.string()] = sha256_file(file); }

void RunRecord::add_output(const fs::path& file) { outputs_.push_back(file); }

void RunRecord::write() const {
    json outs = json::object();
    for (const auto& f : outputs_) outs[fs::relative(f, dir_).generic_string()] = sha256_file(f);
    const json doc = {{"tool", "critrep"}, {"version", kVersion}, {"command", command_}, {"config", config_},
                      {"inputs", inputs_},  {"seeds", seeds_},     {"outputs", outs}};
    std::ofstream out(dir_ / "run_manifest.json");
    if (!out) throw IoError("cannot write " + (dir_ / "run_manifest.json").string());
    out << doc.dump(2) << '\n';
}

void write_text(RunRecord& run, const std::string& file_name, const std::string& text) {
    const fs::path p = run.path(file_name);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << text;
    if (!out) throw IoError("short write to " + p.string());
    out.close();
    run.add_output(p);
}

void write_json(RunRecord& run, const std::string& file_name, const json& j) {
    write_text(run, file_name, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Training

AnyModel create_model(const ExperimentConfig& cfg, std::size_t input_width) {
    if (cfg.layers.front() != input_width)
        throw DimensionError("model input width " + std::to_string(cfg.layers.front()) + " but data has " +
                             std::to_string(input_width) + " features");
    Rng rng(cfg.train.seed);
    switch (cfg.model) {
        case ModelKind::rbm: return RbmModel::create(cfg.layers[0], cfg.layers[1], rng);
        case ModelKind::mlp:
            return MlpModel::create(cfg.layers, cfg.activation, OutputHead::softmax_classifier, rng);
        case ModelKind::autoencoder:
            return MlpModel::create(cfg.layers, cfg.activation, OutputHead::reconstruction, rng);
    }
    throw std::logic_error("unreachable");
}

std::string metrics_csv(const std::vector<EpochMetrics>& history) {
    std::ostringstream s;
    s << "epoch,loss,train_accuracy,test_accuracy,reconstruction_mse\n";
    for (const auto& m : history)
        s << m.epoch << ',' << format_number(m.loss) << ',' << format_number(m.train_accuracy) << ','
          << format_number(m.test_accuracy) << ',' << format_number(m.reconstruction_mse) << '\n';
    return s.str();
}

TrainOutcome train_model(const ExperimentConfig& cfg, const LabeledDataset& train, const LabeledDataset* test,
                         RunRecord* run) {
    TrainOutcome out;
    AnyModel init = create_model(cfg, train.features());
    auto keep = [&](std::size_t epoch, AnyModel m) {
        if (run) {
            const std::string file = "checkpoint_epoch_" + std::to_string(epoch) + ".crck";
            std::visit([&](const auto& model) { write_checkpoint(run->path(file), model); }, m);
            run->add_output(run->path(file));
        }
        out.snapshots.emplace_back(epoch, std::move(m));
    };

    if (cfg.model == ModelKind::rbm) {
        // Initialisation, shuffling and Gibbs sampling share one stream.
        Rng rng(cfg.train.seed);
        RbmModel r = RbmModel::create(cfg.layers[0], cfg.layers[1], rng);
        auto res = rbm_train_cd(std::move(r), train, cfg.train, rng,
                                [&](std::size_t e, const RbmModel& m) { keep(e, m); });
        out.model = std::move(res.model);
        out.history = std::move(res.history);
    } else if (cfg.model == ModelKind::mlp) {
        require_labels(train, "training data for a classifier");
        auto res = mlp_train_supervised(std::get<MlpModel>(std::move(init)), train, cfg.train, test,
                                        [&](std::size_t e, const MlpModel& m) { keep(e, m); });
        out.model = std::move(res.model);
        out.history = std::move(res.history);
    } else {
        auto res = mlp_train_autoencoder(std::get<MlpModel>(std::move(init)), train, cfg.train,
                                         [&](std::size_t e, const MlpModel& m) { keep(e, m); });
        out.model = std::move(res.model);
        out.history = std::move(res.history);
    }

    if (run) {
        std::visit([&](const auto& model) { write_checkpoint(run->path("model.crck"), model); }, out.model);
        run->add_output(run->path("model.crck"));
        write_text(*run, "metrics.csv", metrics_csv(out.history));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analysis

AnalysisOutcome analyze_model(const AnyModel& model, const LabeledDataset& data, const AnalysisOptions& opts) {
    std::vector<std::size_t> layers = opts.layers;
    if (layers.empty())
        for (std::size_t l = 1; l <= hidden_layer_count(model); ++l) layers.push_back(l);
    const double primary = opts.thresholds.empty() ? default_threshold(model) : opts.thresholds.front();
    std::vector<double> thresholds{primary};
    if (opts.threshold_sweep) thresholds.insert(thresholds.end(), kSweepThresholds.begin(), kSweepThresholds.end());
    const std::vector<int>* labels = opts.labels && data.labels ? &*data.labels : nullptr;

    const auto codes = hidden_codes(model, data.samples, layers, thresholds);
    AnalysisOutcome out;
    for (std::size_t t = 0; t < thresholds.size(); ++t)
        for (std::size_t l = 0; l < layers.size(); ++l) {
            CodeAnalysis a = analyze_codes(codes[t][l], labels, opts.k_cutoff);
            a.layer = layers[l];
            a.threshold = thresholds[t];
            (t == 0 ? out.layers : out.sweep).push_back(std::move(a));
        }
    if (opts.input_spectrum) {
        const auto xcodes = binarize(data.samples, kSigmoidThreshold);
        CodeAnalysis a = analyze_codes(xcodes, labels, opts.k_cutoff);
        a.layer = 0;
        a.threshold = kSigmoidThreshold;
        out.inputs = std::move(a);
    }
    return out;
}

namespace {

void write_spectra(RunRecord& run, const CodeAnalysis& a, const std::string& stem) {
    std::ostringstream raw, binned, loglog;
    raw << "k,m_k\n";
    for (const auto& p : a.spectrum.points()) raw << p.k << ',' << p.m << '\n';
    binned << std::setprecision(17) << "k_center,m_mean\n";
    loglog << std::setprecision(17) << "# log10(k_center) log10(m_mean)\n";
    for (const auto& b : a.binned) {
        binned << b.k_center << ',' << b.m_mean << '\n';
        loglog << std::log10(b.k_center) << ' ' << std::log10(b.m_mean) << '\n';
    }
    write_text(run, stem + "_spectrum.csv", raw.str());
    write_text(run, stem + "_binned.csv", binned.str());
    write_text(run, stem + "_loglog.dat", loglog.str());
}

}  // namespace

json write_analysis(RunRecord& run, const AnalysisOutcome& a, const std::string& prefix) {
    json doc = {{"layers", json::array()}, {"threshold_sweep", json::array()}};
    for (const auto& l : a.layers) {
        write_spectra(run, l, prefix + "layer" + std::to_string(l.layer));
        doc["layers"].push_back(to_json(l));
    }
    for (const auto& s : a.sweep) doc["threshold_sweep"].push_back(to_json(s));
    if (a.inputs) {
        write_spectra(run, *a.inputs, prefix + "inputs");
        doc["inputs"] = to_json(*a.inputs);
    }
    write_json(run, prefix + "analysis.json", doc);
    return doc;
}

// ---------------------------------------------------------------------------
// Report

json run_report(const ExperimentConfig& cfg, RunRecord& run) {
    run.set_config(cfg.to_json());
    run.add_seed("train", cfg.train.seed);
    for (const auto& f : dataset_files(cfg.train_data, cfg.manifest)) run.add_input(f);
    const LabeledDataset train = load_dataset(cfg.train_data, cfg.manifest);
    std::optional<LabeledDataset> test;
    if (cfg.test_data) {
        for (const auto& f : dataset_files(*cfg.test_data, cfg.manifest)) run.add_input(f);
        test = load_dataset(*cfg.test_data, cfg.manifest);
    }
    std::optional<LabeledDataset> analysis_set;
    if (cfg.analysis_data) {
        for (const auto& f : dataset_files(*cfg.analysis_data, cfg.manifest)) run.add_input(f);
        analysis_set = load_dataset(*cfg.analysis_data, cfg.manifest);
    }
    const LabeledDataset& data = analysis_set ? *analysis_set : train;

    const TrainOutcome trained = train_model(cfg, train, test ? &*test : nullptr, &run);

    json report = {{"name", cfg.name}, {"model", to_string(cfg.model)}, {"layers", cfg.layers}};
    json history = json::array();
    for (const auto& m : trained.history)
        history.push_back({{"epoch", m.epoch},
                           {"loss", number_or_null(m.loss)},
                           {"train_accuracy", number_or_null(m.train_accuracy)},
                           {"test_accuracy", number_or_null(m.test_accuracy)},
                           {"reconstruction_mse", number_or_null(m.reconstruction_mse)}});
    report["history"] = history;

    json snaps = json::array();
    for (const auto& [epoch, model] : trained.snapshots) {
        const AnalysisOutcome a = analyze_model(model, data, cfg.analysis);
        json s = write_analysis(run, a, "epoch_" + std::to_string(epoch) + "_");
        s["epoch"] = epoch;
        snaps.push_back(std::move(s));
    }
    report["snapshots"] = snaps;
    const AnalysisOutcome final_analysis = analyze_model(trained.model, data, cfg.analysis);
    report["final"] = write_analysis(run, final_analysis, "final_");
    write_json(run, "report.json", report);

    std::ostringstream md;
    md << "# " << cfg.name << "\n\n";
    md << "Model: " << to_string(cfg.model) << ", layers";
    for (auto d : cfg.layers) md << ' ' << d;
    md << ", " << trained.history.size() << " epochs trained.\n\n";
    if (!trained.history.empty()) {
        const auto& last = trained.history.back();
        if (std::isfinite(last.test_accuracy)) md << "Final test accuracy: " << last.test_accuracy << "\n\n";
        if (std::isfinite(last.reconstruction_mse))
            md << "Final reconstruction MSE: " << last.reconstruction_mse << "\n\n";
    }
    auto table = [&](const std::string& title, const AnalysisOutcome& a) {
        md << "## " << title << "\n\n";
        md << "| layer | threshold | M | distinct | H_Z | H_K | I_ZY | beta | k_min | decades | LS R2 | power law |\n";
        md << "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& l : a.layers) {
            md << "| " << l.layer << " | " << l.threshold << " | " << l.info.M << " | " << l.info.distinct << " | "
               << l.info.H_Z << " | " << l.info.H_K << " | ";
            if (l.info.I_ZY) md << *l.info.I_ZY;
            else md << "-";
            md
               << " | ";
            if (l.fit)
                md << l.fit->beta << " | " << l.fit->k_min << " | " << l.fit->decades << " | " << l.fit->ls_r2;
            else
                md << "- | - | - | -";
            md << " | " << (l.power_law ? "yes" : "no") << " |\n";
        }
        md << '\n';
    };
    for (std::size_t i = 0; i < trained.snapshots.size(); ++i)
        table("Epoch " + std::to_string(trained.snapshots[i].first),
              analyze_model(trained.snapshots[i].second, data, cfg.analysis));
    table("Final model", final_analysis);
    write_text(run, "report.md", md.str());
    return report;
}

// ---------------------------------------------------------------------------
// JSON helpers

json to_json(const KMeansResult& r, bool with_assignments) {
    json j = {{"k", r.centroids.rows()},
              {"n_samples", r.assignments.size()},
              {"inertia", r.inertia},
              {"inertia_history", r.inertia_history},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"cluster_sizes", r.cluster_sizes}};
    if (with_assignments) j["assignments"] = r.assignments;
    return j;
}

json to_json(const FixedBetaSolution& s, std::uint64_t M) {
    const auto m = degeneracy_from_distribution(s.iterative, M);
    return {{"mode", "beta"},
            {"beta", s.beta},
            {"K_max", s.iterative.size()},
            {"M", M},
            {"iterations", s.iterations},
            {"linf_closed_vs_iterative", s.linf_difference},
            {"stationarity_residual_iterative", verify_stationarity(s.iterative, s.beta, M)},
            {"stationarity_residual_closed_form", verify_stationarity(s.closed_form, s.beta, M)},
            {"loglog_slope", loglog_slope(m)},
            {"expected_slope", -s.beta - 1.0},
            {"resolution", distribution_resolution(s.iterative, M)},
            {"relevance", distribution_relevance(s.iterative)}};
}

json to_json(const FixedResolutionSolution& s, std::uint64_t M) {
    json j = {{"mode", "resolution"},
              {"boundary", s.boundary},
              {"K_max", s.distribution.size()},
              {"M", M},
              {"achieved_resolution", s.achieved_resolution},
              {"bisection_steps", s.bisection_steps},
              {"relevance", distribution_relevance(s.distribution)}};
    if (s.boundary) {
        j["beta"] = s.beta > 0 ? "+inf" : "-inf";
    } else {
        j["beta"] = s.beta;
        j["stationarity_residual"] = verify_stationarity(s.distribution, s.beta, M);
        j["loglog_slope"] = loglog_slope(degeneracy_from_distribution(s.distribution, M));
    }
    return j;
}

}  // namespace critrep
