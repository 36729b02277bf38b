#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "critrep/errors.hpp"
#include "critrep/experiment.hpp"
#include "support/tempdir.hpp"

using namespace critrep;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const std::filesystem::path& p) { return json::parse(slurp(p)); }

int cli(const std::string& args) {
    const std::string cmd = std::string(CRITREP_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small_ising_config() {
    return json::parse(R"({
      "name": "tiny", "model": "autoencoder", "layers": [16, 4, 16],
      "train_data": {"ising": {"temperature": 2.26, "side": 4, "sweeps_equilibrate": 50,
                               "sweeps_between_samples": 2, "samples": 300, "seed": 3}},
      "train": {"epochs": 2, "batch_size": 16, "learning_rate": 0.1, "seed": 2, "snapshot_epochs": [0]},
      "analysis": {"thresholds": [0.5], "labels": false, "input_spectrum": true}
    })");
}

}  // namespace

TEST_CASE("config: defaults and round trip") {
    const ExperimentConfig c = ExperimentConfig::from_json(small_ising_config(), ".");
    CHECK(c.model == ModelKind::autoencoder);
    CHECK(c.layers == std::vector<std::size_t>{16, 4, 16});
    CHECK(c.train_data.ising->params.side == 4);
    CHECK_FALSE(c.analysis.labels);
    const ExperimentConfig back = ExperimentConfig::from_json(c.to_json(), ".");
    CHECK(back.to_json() == c.to_json());
}

TEST_CASE("config: malformed input raises ConfigError") {
    auto bad = [](auto edit) {
        json j = small_ising_config();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["model"] = "svm"; }), "."), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["train"]["epochs"] = "ten"; }), "."),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["train"]["batch_size"] = 0; }), "."),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j["train_data"]["name"] = "mnist-train"; }), "."),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) { j.erase("train_data"); }), "."), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad([](json& j) {
                        j["model"] = "rbm";
                        j["layers"] = {16, 4, 4};
                    }),
                                                "."),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), std::exception);
}

TEST_CASE("config: missing dataset files name the path") {
    DatasetRef ref;
    ref.images = "/nonexistent/images.idx";
    try {
        dataset_files(ref, std::nullopt);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/images.idx") != std::string::npos);
    }
}

TEST_CASE("run record: manifest lists config, seeds, inputs and outputs") {
    TempDir dir("record");
    {
        RunRecord run("unit", dir / "run");
        run.set_config({{"a", 1}});
        run.add_seed("train", 9);
        write_text(run, "note.txt", "abc");
        run.add_input(dir / "run" / "note.txt");
        run.write();
    }
    const json m = read_json(dir / "run" / "run_manifest.json");
    CHECK(m["command"] == "unit");
    CHECK(m["version"] == kVersion);
    CHECK(m["config"]["a"] == 1);
    CHECK(m["seeds"]["train"] == 9);
    CHECK(m["outputs"].contains("note.txt"));
    const std::string abc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
    bool found = false;
    for (const auto& [path, sha] : m["inputs"].items()) found = found || sha == abc;
    CHECK(found);
}

TEST_CASE("report: end-to-end on a tiny Ising autoencoder, bit-exact on rerun") {
    TempDir dir("report");
    const ExperimentConfig cfg = ExperimentConfig::from_json(small_ising_config(), ".");
    json a, b;
    {
        RunRecord run("report", dir / "a");
        a = run_report(cfg, run);
        run.write();
    }
    {
        RunRecord run("report", dir / "b");
        b = run_report(cfg, run);
        run.write();
    }
    CHECK(a == b);
    CHECK(slurp(dir / "a" / "report.md") == slurp(dir / "b" / "report.md"));
    for (const char* f : {"model.crck", "metrics.csv", "checkpoint_epoch_0.crck", "final_layer1_spectrum.csv",
                          "epoch_0_layer1_spectrum.csv", "final_inputs_spectrum.csv", "report.json", "report.md"})
        CHECK_MESSAGE(std::filesystem::exists(dir / "a" / f), f);
    const std::string metrics = slurp(dir / "a" / "metrics.csv");
    CHECK(metrics.rfind("epoch,loss,train_accuracy,test_accuracy,reconstruction_mse\n", 0) == 0);
}

TEST_CASE("cli: exit codes") {
    TempDir dir("cli_codes");
    CHECK(cli("--version") == 0);
    CHECK(cli("--bogus") == 2);
    CHECK(cli("maxent --out " + (dir / "m").string()) == 2);
    CHECK(cli("maxent --beta 1 --resolution 2 --out " + (dir / "m").string()) == 2);
    CHECK(cli("maxent --resolution 100 --out " + (dir / "m").string()) == 2);
    CHECK(cli("train --config /nonexistent.json --out " + (dir / "t").string()) == 2);
    CHECK(cli("kmeans --images /nonexistent.idx --out " + (dir / "k").string()) == 2);

    std::ofstream(dir / "bad.json") << "{not json";
    CHECK(cli("train --config " + (dir / "bad.json").string() + " --out " + (dir / "t").string()) == 2);
    std::ofstream(dir / "garbage.crck") << "garbage";
    CHECK(cli("analyze --checkpoint " + (dir / "garbage.crck").string() + " --images /dev/null --out " +
              (dir / "a").string()) == 4);
}

TEST_CASE("cli: ising samples round-trip through IDX") {
    TempDir dir("cli_ising");
    REQUIRE(cli("ising --temperature 2.5 --n 10 --side 4 --sweeps-equilibrate 20 --seed 4 --out " +
                (dir / "i").string()) == 0);
    const LabeledDataset d = load_idx(dir / "i" / "ising_T2.5.idx");
    CHECK(d.samples.rows() == 10);
    CHECK(d.samples.cols() == 16);
    for (std::size_t r = 0; r < 10; ++r)
        for (std::size_t c = 0; c < 16; ++c) CHECK((d.samples(r, c) == 0.0 || d.samples(r, c) == 1.0));
    const json side = read_json(dir / "i" / "ising_T2.5.json");
    CHECK(side["seed"] == 4);
    CHECK(std::filesystem::exists(dir / "i" / "run_manifest.json"));
}

TEST_CASE("cli: maxent writes a spectrum with the analytic slope") {
    TempDir dir("cli_maxent");
    for (double beta : {1.0, 0.0}) {
        const auto out = dir / ("b" + std::to_string(static_cast<int>(beta)));
        REQUIRE(cli("maxent --beta " + std::to_string(beta) + " --out " + out.string()) == 0);
        const json j = read_json(out / "maxent.json");
        CHECK(j["loglog_slope"].get<double>() == doctest::Approx(-beta - 1).epsilon(1e-6));
        CHECK(slurp(out / "maxent_spectrum.csv").rfind("k,p_k,m_k\n", 0) == 0);
    }
}

TEST_CASE("cli: kmeans with one cluster") {
    TempDir dir("cli_kmeans");
    Matrix x(12, 4, 0.0);
    for (std::size_t i = 0; i < 12; ++i) x(i, i % 4) = 1.0;
    write_idx_images(dir / "x.idx", x, 2, 2);
    REQUIRE(cli("kmeans --images " + (dir / "x.idx").string() + " --k 1 --out " + (dir / "k").string()) == 0);
    CHECK(slurp(dir / "k" / "kmeans_spectrum.csv") == "k,m_k\n12,1\n");
    CHECK(cli("kmeans --images " + (dir / "x.idx").string() + " --k 13 --out " + (dir / "k2").string()) == 2);
}
