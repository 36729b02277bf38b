// One PASS/FAIL line per criterion. Exit status 0 only if every selected
// criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <CLI11.hpp>

#include "critrep/experiment.hpp"
#include "critrep/infostats.hpp"
#include "critrep/kernels.hpp"
#include "critrep/kmeans.hpp"
#include "critrep/maxent.hpp"
#include "critrep/powerlaw.hpp"
#include "support/oracles.hpp"

using namespace critrep;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = CRITREP_SOURCE_DIR;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[fail] ";
        }
        detail << what << "; ";
    }
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

ExperimentConfig preset(const std::string& name) { return ExperimentConfig::load(kSource / "configs" / name); }

LabeledDataset load(const ExperimentConfig& cfg, const DatasetRef& ref) { return load_dataset(ref, cfg.manifest); }

std::string fit_text(const CodeAnalysis& a) {
    if (!a.fit) return "no fit (" + std::to_string(a.info.distinct) + " codes)";
    return "beta " + fmt(a.fit->beta, 3) + ", " + fmt(a.fit->decades, 3) + " decades, R2 " + fmt(a.fit->ls_r2, 3);
}

// --- 1, 2: max-entropy solution ---------------------------------------------

Outcome maxent_powerlaw() {
    Outcome o;
    const MaxEntProblem problem{1000, 10000};
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const FixedBetaSolution s = solve_fixed_beta(problem, beta);
        const double residual = verify_stationarity(s.iterative, beta, problem.M);
        const double slope = loglog_slope(degeneracy_from_distribution(s.iterative, problem.M));
        o.require(s.linf_difference < 1e-6 && residual < 1e-10 && std::abs(slope + beta + 1) <= 0.01,
                  "beta " + fmt(beta) + ": Linf " + fmt(s.linf_difference, 2) + ", residual " + fmt(residual, 2) +
                      ", slope " + fmt(slope, 6));
    }
    return o;
}

Outcome maxent_pure_clustering() {
    Outcome o;
    const MaxEntProblem problem{1000, 10000};
    const FixedBetaSolution s = solve_fixed_beta(problem, 0.0);
    const double slope = loglog_slope(degeneracy_from_distribution(s.iterative, problem.M));
    o.require(std::abs(slope + 1) <= 0.01, "slope " + fmt(slope, 8));
    return o;
}

// --- 3, 4: entropies ---------------------------------------------------------

BinaryCode code(unsigned v) {
    BinaryCode c(32);
    for (std::size_t i = 0; i < 32; ++i) c.set(i, (v >> i) & 1U);
    return c;
}

CodeHistogram labelled(const std::vector<unsigned>& z, const std::vector<int>& y) {
    std::vector<BinaryCode> codes;
    for (auto v : z) codes.push_back(code(v));
    return count_codes(codes, std::span<const int>(y));
}

Outcome entropy_extremes() {
    Outcome o;
    for (std::size_t M : {1000, 60000}) {
        std::vector<BinaryCode> distinct, same;
        for (unsigned i = 0; i < M; ++i) {
            distinct.push_back(code(i));
            same.push_back(code(12345));
        }
        const InfoSummary d = summarize(count_codes(distinct));
        const InfoSummary s = summarize(count_codes(same));
        const double log_m = std::log(static_cast<double>(M));
        o.require(std::abs(d.H_Z - log_m) <= 1e-12 && std::abs(d.H_K) <= 1e-12,
                  "M " + std::to_string(M) + " distinct: H_Z - log M " + fmt(d.H_Z - log_m, 2) + ", H_K " +
                      fmt(d.H_K, 2));
        o.require(std::abs(s.H_Z) <= 1e-12 && std::abs(s.H_K) <= 1e-12,
                  "identical: H_Z " + fmt(s.H_Z, 2) + ", H_K " + fmt(s.H_K, 2));
    }
    return o;
}

Outcome mutual_information() {
    Outcome o;
    Rng rng(2);
    double worst = 0, worst_oracle = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 50 + rng.below(5000);
        const unsigned codes = 1 + static_cast<unsigned>(rng.below(500));
        const int classes = 1 + static_cast<int>(rng.below(10));
        std::vector<unsigned> z(n);
        std::vector<int> y(n);
        std::map<unsigned, double> kz;
        std::map<int, double> ky;
        std::map<std::pair<int, unsigned>, double> kyz;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<int>(rng.below(classes));
            z[i] = rng.uniform() < 0.5 ? static_cast<unsigned>(y[i]) : static_cast<unsigned>(rng.below(codes));
            ++kz[z[i]];
            ++ky[y[i]];
            ++kyz[{y[i], z[i]}];
        }
        const InfoSummary s = entropies_with_labels(labelled(z, y));
        worst = std::max(worst, std::abs(*s.I_ZY - (*s.H_Y + s.H_Z - *s.H_YZ)));
        auto vals = [](const auto& m) {
            std::vector<double> v;
            for (const auto& [key, c] : m) v.push_back(c);
            return v;
        };
        const double mi = oracle::entropy(vals(ky)) + oracle::entropy(vals(kz)) - oracle::entropy(vals(kyz));
        worst_oracle = std::max(worst_oracle, std::abs(*s.I_ZY - mi));
    }
    o.require(worst <= 1e-12, "identity max error " + fmt(worst, 2));
    o.require(worst_oracle <= 1e-12, "oracle max error " + fmt(worst_oracle, 2));

    // m(k) changes, H(Y,Z) does not.
    const std::vector<int> y3{0, 1, 2};
    const CodeHistogram a0 = labelled({0, 1, 1}, y3), a1 = labelled({0, 0, 0}, y3);
    o.require(!(degeneracy(a0) == degeneracy(a1)) &&
                  *entropies_with_labels(a0).H_YZ == *entropies_with_labels(a1).H_YZ,
              "scenario a: m(k) changes, H(Y,Z) fixed");
    // H(Y,Z) changes, m(k) does not.
    const std::vector<unsigned> z3{0, 1, 1};
    const CodeHistogram b0 = labelled(z3, {0, 1, 2}), b1 = labelled(z3, {0, 1, 1});
    o.require(degeneracy(b0) == degeneracy(b1) && *entropies_with_labels(b0).H_YZ != *entropies_with_labels(b1).H_YZ,
              "scenario b: H(Y,Z) changes, m(k) fixed");
    return o;
}

// --- 5: power-law fitter -----------------------------------------------------

Outcome fitter_calibration() {
    Outcome o;
    const PowerLawFit f = fit_power_law(oracle::zipf_sizes(2.0, 100000, 1));
    o.require(std::abs(f.beta - 1.0) <= 0.05, "n 1e5: beta " + fmt(f.beta, 4));
    double prev = INFINITY;
    const int reps = 8;
    for (std::size_t n : {1000, 10000, 100000}) {
        double err = 0;
        for (int r = 0; r < reps; ++r) err += std::abs(fit_power_law(oracle::zipf_sizes(2.0, n, 100 + r)).beta - 1.0);
        err /= reps;
        o.require(err < prev, "n " + std::to_string(n) + ": mean |beta - 1| " + fmt(err, 3));
        prev = err;
    }
    return o;
}

// --- 6: gradients ------------------------------------------------------------

Outcome gradients() {
    Outcome o;
    struct Case {
        std::string name;
        std::vector<std::size_t> dims;
        OutputHead head;
    };
    const std::vector<Case> cases{{"classifier", supervised_preset_dims(), OutputHead::softmax_classifier},
                                  {"autoencoder", autoencoder_preset_dims(), OutputHead::reconstruction},
                                  {"ising autoencoder", {100, 16, 100}, OutputHead::reconstruction}};
    std::uint64_t seed = 1;
    for (const auto& c : cases)
        for (Activation act : {Activation::sigmoid, Activation::relu}) {
            Rng rng(seed);
            const MlpModel m = MlpModel::create(c.dims, act, c.head, rng);
            const Matrix x = oracle::random_matrix(5, c.dims.front(), seed + 100, 0, 1);
            Matrix target = x;
            if (c.head == OutputHead::softmax_classifier) {
                std::vector<int> labels(5);
                for (auto& l : labels) l = static_cast<int>(rng.below(c.dims.back()));
                target = one_hot(labels, c.dims.back());
            }
            const double err = oracle::fd_relative_error(m, x, target, mlp_gradients(m, x, target), 60, seed + 200);
            o.require(err < 1e-5, c.name + (act == Activation::relu ? " relu " : " sigmoid ") + fmt(err, 2));
            ++seed;
        }
    return o;
}

// --- 7: Ising sampler --------------------------------------------------------

Outcome ising_sampler() {
    Outcome o;
    IsingParams p;
    p.side = 3;
    p.temperature = kIsingCriticalT;
    p.sweeps_equilibrate = 1000;
    p.sweeps_between_samples = 5;
    const std::size_t n = 40000, batches = 40;
    const LabeledDataset ds = generate_ising_dataset(p, n, Rng(2024));
    std::vector<double> batch_mean(batches, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<int> s(9);
        for (int k = 0; k < 9; ++k) s[k] = ds.samples.row(i)[k] > 0.5 ? 1 : -1;
        batch_mean[i / (n / batches)] += oracle::ising_energy(s, 3, 1.0) / static_cast<double>(n / batches);
    }
    // Batch means absorb residual autocorrelation in the standard error.
    double mean = 0, var = 0;
    for (double b : batch_mean) mean += b / batches;
    for (double b : batch_mean) var += (b - mean) * (b - mean) / (batches - 1);
    const double se = std::sqrt(var / batches);
    const double exact = oracle::enumerate_ising(3, p.temperature).mean_energy;
    o.require(std::abs(mean - exact) <= 3 * se,
              "3x3 <E> " + fmt(mean, 5) + " vs exact " + fmt(exact, 5) + " (se " + fmt(se, 2) + ")");

    for (const char* name : {"ae-ising-low.json", "ae-ising-high.json"}) {
        const ExperimentConfig cfg = preset(name);
        const LabeledDataset d = load(cfg, cfg.train_data);
        const std::size_t side = cfg.train_data.ising->params.side;
        double m_signed = 0, m_abs = 0;
        for (std::size_t i = 0; i < d.samples.rows(); ++i) {
            double m = 0;
            for (double v : d.samples.row(i)) m += 2 * v - 1;
            m /= static_cast<double>(side * side);
            m_signed += m;
            m_abs += std::abs(m);
        }
        m_signed /= static_cast<double>(d.samples.rows());
        m_abs /= static_cast<double>(d.samples.rows());
        const double T = cfg.train_data.ising->params.temperature;
        if (T < kIsingCriticalT)
            o.require(m_abs > 0.9, "T " + fmt(T) + ": <|m|> " + fmt(m_abs));
        else
            o.require(std::abs(m_signed) < 0.05, "T " + fmt(T) + ": |<m>| " + fmt(std::abs(m_signed)));
    }
    return o;
}

// --- 8, 9: MNIST models ------------------------------------------------------

bool lacks_power_law(const CodeAnalysis& a) {
    const double span = a.fit ? a.fit->decades : 0.0;
    return static_cast<double>(a.info.distinct) < 0.01 * static_cast<double>(a.info.M) || span < 1.0;
}

struct RbmRun {
    AnalysisOutcome final_layers, epoch0;
    LabeledDataset data;
};

RbmRun train_rbm() {
    const ExperimentConfig cfg = preset("rbm-mnist.json");
    RbmRun r;
    r.data = load(cfg, cfg.train_data);
    const TrainOutcome t = train_model(cfg, r.data, nullptr, nullptr);
    r.final_layers = analyze_model(t.model, r.data, cfg.analysis);
    for (const auto& [epoch, model] : t.snapshots)
        if (epoch == 0) r.epoch0 = analyze_model(model, r.data, cfg.analysis);
    return r;
}

Outcome learned_power_laws() {
    Outcome o;
    const RbmRun rbm = train_rbm();
    for (const auto& a : rbm.final_layers.layers)
        o.require(a.power_law, "RBM final z" + std::to_string(a.layer) + ": " + fit_text(a));
    for (const auto& a : rbm.epoch0.layers)
        o.require(lacks_power_law(a), "RBM epoch 0 z" + std::to_string(a.layer) + ": " + fit_text(a));

    const ExperimentConfig cfg = preset("mlp-mnist.json");
    const LabeledDataset train = load(cfg, cfg.train_data), test = load(cfg, *cfg.test_data);
    const LabeledDataset analysis = load(cfg, *cfg.analysis_data);
    const TrainOutcome t = train_model(cfg, train, &test, nullptr);
    const double acc = t.history.back().test_accuracy;
    o.require(acc >= 0.85, "MLP test accuracy " + fmt(acc, 4) + " after " + std::to_string(t.history.back().epoch) +
                               " epochs");
    for (const auto& a : analyze_model(t.model, analysis, cfg.analysis).layers)
        o.require(a.power_law, "MLP final z" + std::to_string(a.layer) + ": " + fit_text(a));
    for (const auto& [epoch, model] : t.snapshots) {
        if (epoch != 0) continue;
        for (const auto& a : analyze_model(model, analysis, cfg.analysis).layers)
            if (a.layer >= 2)
                o.require(lacks_power_law(a), "MLP epoch 0 z" + std::to_string(a.layer) + ": " + fit_text(a));
    }
    return o;
}

Outcome kmeans_comparison() {
    Outcome o;
    const RbmRun rbm = train_rbm();
    const CodeAnalysis& z = rbm.final_layers.layers.front();
    const KMeansResult km = kmeans(rbm.data.samples, z.info.distinct, 1, 100);
    const double cv = size_coefficient_of_variation(cluster_size_spectrum(km));
    o.require(cv < z.size_cv, "k " + std::to_string(z.info.distinct) + ": k-means CV " + fmt(cv) + " vs RBM CV " +
                                  fmt(z.size_cv));
    return o;
}

// --- 10: Ising autoencoder ---------------------------------------------------

Outcome ising_autoencoder() {
    Outcome o;
    for (const char* name : {"ae-ising-critical.json", "ae-ising-high.json", "ae-ising-low.json"}) {
        const ExperimentConfig cfg = preset(name);
        const LabeledDataset d = load(cfg, cfg.train_data);
        const TrainOutcome t = train_model(cfg, d, nullptr, nullptr);
        const AnalysisOutcome a = analyze_model(t.model, d, cfg.analysis);
        const std::string T = "T " + fmt(cfg.train_data.ising->params.temperature);
        if (cfg.train_data.ising->params.temperature < kIsingCriticalT) {
            const std::size_t distinct = a.inputs->info.distinct;
            o.require(distinct < d.samples.rows(), T + " distinct x " + std::to_string(distinct) + " of " +
                                                       std::to_string(d.samples.rows()));
        } else {
            const CodeAnalysis& z = a.layers.front();
            o.require(z.power_law, T + " z: " + fit_text(z));
        }
    }
    return o;
}

// --- 11: determinism ---------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CRITREP_CLI) + " --threads 1 " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            files[fs::relative(e.path(), dir).string()] =
                std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        }
    return files;
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / ("critrep_determinism_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string configs = (kSource / "configs").string();
    const std::string manifest = (kSource / "data" / "manifest.json").string();
    const std::vector<std::pair<std::string, std::string>> commands{
        {"ising", "ising --temperature 2.26 --n 500 --side 10 --seed 3"},
        {"maxent", "maxent --beta 1"},
        {"maxent-resolution", "maxent --resolution 6"},
        {"train-mlp", "train --config " + configs + "/mlp-mnist-smoke.json"},
        {"train-rbm", "train --config " + configs + "/rbm-mnist.json --epochs 1 --limit 1000"},
        {"train-ae", "train --config " + configs + "/ae-ising-critical.json --epochs 1 --limit 2000"},
        {"kmeans", "kmeans --dataset mnist-test --manifest " + manifest + " --limit 1000 --k 64 --seed 2"},
        {"report", "report --config " + configs + "/mlp-mnist-smoke.json"},
    };
    auto run_twice = [&](const std::string& tag, const std::string& args) {
        const fs::path a = root / tag / "a", b = root / tag / "b";
        const int ra = run_cli(args + " --out " + a.string());
        const int rb = run_cli(args + " --out " + b.string());
        if (ra != 0 || rb != 0) {
            o.require(false, tag + " exit codes " + std::to_string(ra) + "/" + std::to_string(rb));
            return;
        }
        const auto fa = snapshot_dir(a), fb = snapshot_dir(b);
        o.require(fa == fb, tag + " " + std::to_string(fa.size()) + " files " + (fa == fb ? "identical" : "differ"));
    };
    for (const auto& [tag, args] : commands) run_twice(tag, args);
    const fs::path ckpt = root / "train-mlp" / "a" / "model.crck";
    if (fs::exists(ckpt))
        run_twice("analyze", "analyze --checkpoint " + ckpt.string() + " --dataset mnist-test --manifest " + manifest +
                                 " --limit 1000 --all-layers --threshold-sweep");
    fs::remove_all(root);
    return o;
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> selected;
    app.add_option("--criterion", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);
    set_threads(1);

    const std::vector<Criterion> criteria{
        {1, "max-entropy solver matches m(k) ~ k^(-beta-1)", 10, maxent_powerlaw},
        {2, "beta = 0 gives slope -1", 10, maxent_pure_clustering},
        {3, "entropy extremes", 60, entropy_extremes},
        {4, "I(Z;Y) decomposition and label/spectrum independence", 60, mutual_information},
        {5, "power-law fitter calibration on Zipf samples", 30, fitter_calibration},
        {6, "analytic gradients match finite differences", 60, gradients},
        {7, "Ising sampler against enumeration and magnetisation", 300, ising_sampler},
        {8, "learned layers show power laws, epoch-0 deep layers do not", 1800, learned_power_laws},
        {9, "k-means sizes less variable than RBM codes", 600, kmeans_comparison},
        {10, "Ising autoencoder spectra", 1200, ising_autoencoder},
        {11, "byte-identical reruns with --threads 1", 600, determinism},
    };

    bool all = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.require(secs < c.budget_s, "runtime " + fmt(secs, 3) + " s (budget " + fmt(c.budget_s) + " s)");
        all = all && o.pass;
        std::printf("criterion %2d: %s  %s  -- %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
