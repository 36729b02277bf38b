// critrep command-line driver.
//
//   critrep [--threads N] train   --config C --out DIR [overrides]
//   critrep [--threads N] analyze --checkpoint F (--config C | --dataset NAME | --images X) --out DIR
//   critrep [--threads N] ising   (--preset P | --temperature T) --out DIR
//   critrep [--threads N] maxent  (--beta B | --resolution R) --out DIR
//   critrep [--threads N] kmeans  (--config C | --dataset NAME | --images X) --k K --out DIR
//   critrep [--threads N] report  --config C --out DIR [overrides]
//
// Exit codes: 0 success, 2 usage or config, 3 numeric failure, 4 I/O.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "critrep/errors.hpp"
#include "critrep/experiment.hpp"
#include "critrep/kernels.hpp"
#include "critrep/manifest.hpp"
#include "critrep/powerlaw.hpp"

namespace fs = std::filesystem;
using namespace critrep;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kNumeric = 3, kIo = 4 };

struct Overrides {
    std::optional<std::size_t> epochs, batch_size, limit;
    std::optional<double> learning_rate, threshold;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epochs", epochs, "Override train.epochs");
        cmd->add_option("--batch-size", batch_size, "Override train.batch_size");
        cmd->add_option("--lr", learning_rate, "Override train.learning_rate");
        cmd->add_option("--seed", seed, "Override train.seed");
        cmd->add_option("--limit", limit, "Override train_data.limit");
        cmd->add_option("--threshold", threshold, "Binarisation threshold for every analysed layer");
    }

    void apply(ExperimentConfig& c) const {
        if (epochs) c.train.epochs = *epochs;
        if (batch_size) c.train.batch_size = *batch_size;
        if (learning_rate) c.train.learning_rate = *learning_rate;
        if (seed) c.train.seed = *seed;
        if (limit) c.train_data.limit = *limit;
        if (threshold) c.analysis.thresholds = {*threshold};
        try {
            c.train.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

// Where a standalone command reads its samples from.
struct DataSource {
    std::string config, dataset, images, labels, manifest = "data/manifest.json";
    std::size_t limit = 0;

    void attach(CLI::App* cmd) {
        auto* c = cmd->add_option("--config", config, "Experiment config; uses analysis_data or train_data");
        auto* d = cmd->add_option("--dataset", dataset, "Dataset name in the manifest");
        auto* i = cmd->add_option("--images", images, "IDX image file");
        c->excludes(d)->excludes(i);
        d->excludes(i);
        cmd->add_option("--labels", labels, "IDX label file (with --images)")->needs(i);
        cmd->add_option("--manifest", manifest, "Dataset manifest (with --dataset)")->capture_default_str();
        cmd->add_option("--limit", limit, "Keep only the first N samples (0 = all)");
    }

    std::pair<DatasetRef, std::optional<fs::path>> resolve() const {
        DatasetRef ref;
        std::optional<fs::path> mf;
        if (!config.empty()) {
            const ExperimentConfig c = ExperimentConfig::load(config);
            ref = c.analysis_data ? *c.analysis_data : c.train_data;
            mf = c.manifest;
        } else if (!dataset.empty()) {
            ref.name = dataset;
            mf = fs::path(manifest);
        } else if (!images.empty()) {
            ref.images = fs::path(images);
            if (!labels.empty()) ref.labels = fs::path(labels);
        } else {
            throw ConfigError("one of --config, --dataset or --images is required");
        }
        if (limit) ref.limit = limit;
        return {ref, mf};
    }
};

std::vector<std::size_t> parse_layers(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const unsigned long v = std::stoul(item, &used);
            if (used != item.size() || v == 0) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ConfigError("--layers expects a comma-separated list of 1-based layer indices, got '" + s + "'");
        }
    }
    return out;
}

void record_inputs(RunRecord& run, const DatasetRef& ref, const std::optional<fs::path>& manifest) {
    for (const auto& f : dataset_files(ref, manifest)) run.add_input(f);
    if (ref.ising) run.add_seed("ising", ref.ising->seed);
}

void print_layers(const AnalysisOutcome& a) {
    auto line = [](const CodeAnalysis& l) {
        std::printf("layer %zu  threshold %.2f  M %llu  distinct %llu  H_Z %.4f  H_K %.4f", l.layer, l.threshold,
                    static_cast<unsigned long long>(l.info.M), static_cast<unsigned long long>(l.info.distinct),
                    l.info.H_Z, l.info.H_K);
        if (l.info.I_ZY) std::printf("  I_ZY %.4f", *l.info.I_ZY);
        if (l.fit)
            std::printf("  beta %.3f  k_min %llu  decades %.2f  R2 %.3f  %s\n", l.fit->beta,
                        static_cast<unsigned long long>(l.fit->k_min), l.fit->decades, l.fit->ls_r2,
                        l.power_law ? "power-law" : "no power-law");
        else
            std::printf("  fit: %s\n", l.fit_error.c_str());
    };
    for (const auto& l : a.layers) line(l);
    for (const auto& l : a.sweep) line(l);
    if (a.inputs) line(*a.inputs);
}

// ---------------------------------------------------------------------------

struct TrainCmd {
    std::string config, out;
    Overrides over;

    int run() const {
        ExperimentConfig cfg = ExperimentConfig::load(config);
        over.apply(cfg);
        RunRecord rec("train", out);
        rec.set_config(cfg.to_json());
        rec.add_seed("train", cfg.train.seed);
        record_inputs(rec, cfg.train_data, cfg.manifest);
        const LabeledDataset train = load_dataset(cfg.train_data, cfg.manifest);
        std::optional<LabeledDataset> test;
        if (cfg.test_data) {
            record_inputs(rec, *cfg.test_data, cfg.manifest);
            test = load_dataset(*cfg.test_data, cfg.manifest);
        }
        const TrainOutcome t = train_model(cfg, train, test ? &*test : nullptr, &rec);
        rec.write();
        for (const auto& m : t.history)
            std::printf("epoch %zu  loss %.6g  test_accuracy %.4f  reconstruction_mse %.6g\n", m.epoch, m.loss,
                        m.test_accuracy, m.reconstruction_mse);
        std::printf("wrote %s\n", rec.path("model.crck").c_str());
        return kOk;
    }
};

struct AnalyzeCmd {
    std::string checkpoint, out, layers, prefix;
    DataSource data;
    bool all_layers = false, sweep = false, no_labels = false, inputs = false;
    std::optional<double> threshold, k_cutoff;

    int run() const {
        const AnyModel model = read_checkpoint(checkpoint);
        const auto [ref, mf] = data.resolve();
        AnalysisOptions opts;
        if (!data.config.empty()) opts = ExperimentConfig::load(data.config).analysis;
        if (!layers.empty() && !all_layers) opts.layers = parse_layers(layers);
        if (all_layers) opts.layers.clear();
        if (threshold) opts.thresholds = {*threshold};
        if (k_cutoff) opts.k_cutoff = k_cutoff;
        opts.threshold_sweep = opts.threshold_sweep || sweep;
        opts.input_spectrum = opts.input_spectrum || inputs;
        if (no_labels) opts.labels = false;

        RunRecord rec("analyze", out);
        rec.set_config({{"checkpoint", checkpoint}, {"data", ref.to_json()}, {"analysis", opts.to_json()}});
        rec.add_input(checkpoint);
        record_inputs(rec, ref, mf);
        const LabeledDataset ds = load_dataset(ref, mf);
        const AnalysisOutcome a = analyze_model(model, ds, opts);
        write_analysis(rec, a, prefix);
        rec.write();
        print_layers(a);
        return kOk;
    }
};

struct IsingCmd {
    std::string preset, out;
    std::optional<double> temperature;
    std::size_t n = kIsingDefaultSamples, side = 10, chains = 1;
    std::size_t sweeps_equilibrate = IsingParams{}.sweeps_equilibrate;
    std::size_t sweeps_between = IsingParams{}.sweeps_between_samples;
    std::uint64_t seed = 1;
    std::string boundary = "periodic";

    int run() const {
        std::vector<std::pair<std::string, double>> jobs;
        if (temperature) {
            std::ostringstream name;
            name << "ising_T" << *temperature;
            jobs.emplace_back(name.str(), *temperature);
        }
        if (preset == "low" || preset == "all") jobs.emplace_back("ising_low", kIsingLowT);
        if (preset == "critical" || preset == "all") jobs.emplace_back("ising_critical", kIsingCriticalT);
        if (preset == "high" || preset == "all") jobs.emplace_back("ising_high", kIsingHighT);
        if (jobs.empty()) throw ConfigError("ising needs --preset or --temperature");
        if (n == 0 || chains == 0) throw ConfigError("--n and --chains must be >= 1");

        RunRecord rec("ising", out);
        json cfg = json::array();
        for (const auto& [stem, T] : jobs) {
            IsingParams p;
            p.temperature = T;
            p.side = side;
            p.sweeps_equilibrate = sweeps_equilibrate;
            p.sweeps_between_samples = sweeps_between;
            p.boundary = boundary == "free" ? Boundary::free : Boundary::periodic;
            try {
                p.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const LabeledDataset ds = generate_ising_dataset(p, n, Rng(seed), static_cast<unsigned>(chains));

            double mean_m = 0, mean_abs_m = 0;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                double s = 0;
                for (double v : ds.samples.row(i)) s += 2 * v - 1;
                s /= static_cast<double>(ds.features());
                mean_m += s;
                mean_abs_m += std::abs(s);
            }
            mean_m /= static_cast<double>(ds.size());
            mean_abs_m /= static_cast<double>(ds.size());

            write_idx_images(rec.path(stem + ".idx"), ds.samples, side, side);
            rec.add_output(rec.path(stem + ".idx"));
            const json side_car = {{"temperature", T},
                                   {"side", side},
                                   {"coupling", p.coupling},
                                   {"boundary", boundary},
                                   {"sweeps_equilibrate", p.sweeps_equilibrate},
                                   {"sweeps_between_samples", p.sweeps_between_samples},
                                   {"samples", n},
                                   {"chains", chains},
                                   {"seed", seed},
                                   {"rng", "xoshiro256** seeded by splitmix64"},
                                   {"encoding", "spin -1 -> 0, +1 -> 255"},
                                   {"mean_magnetization", mean_m},
                                   {"mean_abs_magnetization", mean_abs_m}};
            write_json(rec, stem + ".json", side_car);
            cfg.push_back(side_car);
            std::printf("%s: T %.2f  n %zu  <m> %.4f  <|m|> %.4f\n", stem.c_str(), T, n, mean_m, mean_abs_m);
        }
        rec.set_config(cfg);
        rec.add_seed("ising", seed);
        rec.write();
        return kOk;
    }
};

struct MaxentCmd {
    std::optional<double> beta, resolution;
    std::uint64_t k_max = MaxEntProblem{}.K_max, M = MaxEntProblem{}.M;
    std::string out;

    int run() const {
        const MaxEntProblem problem{k_max, M};
        try {
            problem.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        RunRecord rec("maxent", out);
        json j;
        std::vector<double> p;
        if (beta) {
            const FixedBetaSolution s = solve_fixed_beta(problem, *beta);
            j = to_json(s, M);
            p = s.iterative;
        } else {
            FixedResolutionSolution s;
            try {
                s = solve_fixed_resolution(problem, *resolution);
            } catch (const std::domain_error& e) {
                throw ConfigError(e.what());
            }
            j = to_json(s, M);
            j["requested_resolution"] = *resolution;
            p = s.distribution;
        }
        const auto m = degeneracy_from_distribution(p, M);
        std::ostringstream csv;
        csv << std::setprecision(17) << "k,p_k,m_k\n";
        for (std::size_t k = 0; k < p.size(); ++k) csv << k + 1 << ',' << p[k] << ',' << m[k] << '\n';
        write_json(rec, "maxent.json", j);
        write_text(rec, "maxent_spectrum.csv", csv.str());
        rec.set_config({{"K_max", k_max},
                        {"M", M},
                        {"beta", beta ? json(*beta) : json(nullptr)},
                        {"resolution", resolution ? json(*resolution) : json(nullptr)}});
        rec.write();
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

struct KMeansCmd {
    DataSource data;
    std::size_t k = kKMeansPresetK, max_iters = 100;
    std::uint64_t seed = 1;
    std::string out;
    bool assignments = false;

    int run() const {
        const auto [ref, mf] = data.resolve();
        RunRecord rec("kmeans", out);
        rec.set_config({{"data", ref.to_json()}, {"k", k}, {"max_iters", max_iters}});
        rec.add_seed("kmeans", seed);
        record_inputs(rec, ref, mf);
        const LabeledDataset ds = load_dataset(ref, mf);
        if (k > ds.size())
            throw ConfigError("k = " + std::to_string(k) + " exceeds the " + std::to_string(ds.size()) + " samples");
        const KMeansResult r = kmeans(ds.samples, k, seed, max_iters);
        const DegeneracySpectrum s = cluster_size_spectrum(r);
        std::ostringstream csv;
        csv << "k,m_k\n";
        for (const auto& pt : s.points()) csv << pt.k << ',' << pt.m << '\n';
        write_text(rec, "kmeans_spectrum.csv", csv.str());
        json j = to_json(r, assignments);
        j["size_cv"] = size_coefficient_of_variation(s);
        write_json(rec, "kmeans.json", j);
        rec.write();
        std::printf("k %zu  iterations %zu  converged %s  inertia %.6g  size CV %.4f\n", k, r.iterations,
                    r.converged ? "yes" : "no", r.inertia, size_coefficient_of_variation(s));
        return kOk;
    }
};

struct ReportCmd {
    std::string config, out;
    Overrides over;

    int run() const {
        ExperimentConfig cfg = ExperimentConfig::load(config);
        over.apply(cfg);
        RunRecord rec("report", out);
        const json r = run_report(cfg, rec);
        rec.write();
        std::printf("wrote %s and %s\n", rec.path("report.json").c_str(), rec.path("report.md").c_str());
        return kOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Train small networks, binarise their hidden layers and analyse the code statistics."};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker cap; 1 gives bit-exact reruns (0 = OpenMP default)")
        ->check(CLI::NonNegativeNumber);

    TrainCmd train;
    auto* t = app.add_subcommand("train", "Train a model and write checkpoints and metrics");
    t->add_option("--config", train.config, "Experiment config (JSON)")->required();
    t->add_option("--out", train.out, "Output directory")->required();
    train.over.attach(t);

    AnalyzeCmd analyze;
    auto* a = app.add_subcommand("analyze", "Code statistics of a checkpoint's hidden layers");
    a->add_option("--checkpoint", analyze.checkpoint, "Checkpoint file (.crck)")->required();
    a->add_option("--out", analyze.out, "Output directory")->required();
    analyze.data.attach(a);
    a->add_option("--layers", analyze.layers, "Comma-separated 1-based hidden layers");
    a->add_flag("--all-layers", analyze.all_layers, "Analyse every hidden layer");
    a->add_option("--threshold", analyze.threshold, "Binarisation threshold");
    a->add_flag("--threshold-sweep", analyze.sweep, "Also fit at thresholds 0.3 to 0.7");
    a->add_flag("--no-labels", analyze.no_labels, "Skip label-dependent quantities");
    a->add_flag("--input-spectrum", analyze.inputs, "Also analyse the binarised inputs");
    a->add_option("--k-cutoff", analyze.k_cutoff, "Drop frequencies above this before fitting");
    a->add_option("--prefix", analyze.prefix, "Prefix for output file names");

    IsingCmd ising;
    auto* i = app.add_subcommand("ising", "Generate 2D Ising samples as IDX files");
    auto* ip = i->add_option("--preset", ising.preset, "low, critical, high or all")
                   ->check(CLI::IsMember({"low", "critical", "high", "all"}));
    i->add_option("--temperature", ising.temperature, "Custom temperature")->excludes(ip);
    i->add_option("--n", ising.n, "Samples per temperature")->capture_default_str();
    i->add_option("--side", ising.side, "Lattice side")->capture_default_str();
    i->add_option("--chains", ising.chains, "Independent Markov chains")->capture_default_str();
    i->add_option("--sweeps-equilibrate", ising.sweeps_equilibrate, "Burn-in sweeps")->capture_default_str();
    i->add_option("--sweeps-between", ising.sweeps_between, "Sweeps between samples")->capture_default_str();
    i->add_option("--boundary", ising.boundary, "periodic or free")
        ->check(CLI::IsMember({"periodic", "free"}))
        ->capture_default_str();
    i->add_option("--seed", ising.seed, "RNG seed")->capture_default_str();
    i->add_option("--out", ising.out, "Output directory")->required();

    MaxentCmd maxent;
    auto* m = app.add_subcommand("maxent", "Solve the resolution/relevance trade-off numerically");
    auto* mb = m->add_option("--beta", maxent.beta, "Fixed Lagrange multiplier");
    auto* mr = m->add_option("--resolution", maxent.resolution, "Fixed resolution H(Z), in nats");
    mb->excludes(mr);
    m->add_option("--kmax", maxent.k_max, "Largest cluster size")->capture_default_str();
    m->add_option("--M", maxent.M, "Number of samples")->capture_default_str();
    m->add_option("--out", maxent.out, "Output directory")->required();

    KMeansCmd km;
    auto* k = app.add_subcommand("kmeans", "k-means cluster-size spectrum");
    km.data.attach(k);
    k->add_option("--k", km.k, "Number of clusters")->capture_default_str()->check(CLI::PositiveNumber);
    k->add_option("--seed", km.seed, "Seeding RNG")->capture_default_str();
    k->add_option("--max-iters", km.max_iters, "Lloyd iteration cap")->capture_default_str()
        ->check(CLI::PositiveNumber);
    k->add_flag("--assignments", km.assignments, "Include per-sample assignments in the JSON");
    k->add_option("--out", km.out, "Output directory")->required();

    ReportCmd report;
    auto* r = app.add_subcommand("report", "Train, analyse every snapshot and summarise");
    r->add_option("--config", report.config, "Experiment config (JSON)")->required();
    r->add_option("--out", report.out, "Output directory")->required();
    report.over.attach(r);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (threads > 0) set_threads(threads);
        if (*m && !maxent.beta && !maxent.resolution) throw ConfigError("maxent needs --beta or --resolution");
        if (*t) return train.run();
        if (*a) return analyze.run();
        if (*i) return ising.run();
        if (*m) return maxent.run();
        if (*k) return km.run();
        if (*r) return report.run();
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {  // ConfigError, DimensionError
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kUsage;
}
