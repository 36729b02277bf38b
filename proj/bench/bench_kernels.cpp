// Serial references against the OpenMP kernels. Arg 0 selects the serial
// path; otherwise the argument is the thread cap.

#include <benchmark/benchmark.h>

#include "critrep/ising.hpp"
#include "critrep/kernels.hpp"
#include "critrep/representation.hpp"
#include "critrep/rng.hpp"

using namespace critrep;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform();
    return m;
}

void threads_arg(benchmark::internal::Benchmark* b) {
    b->Arg(0);
    for (int t = 1; t <= max_threads(); t *= 2) b->Arg(t);
}

// Chains have no serial twin; thread count 1 is the reference.
void chain_threads_arg(benchmark::internal::Benchmark* b) {
    for (int t = 1; t <= max_threads(); t *= 2) b->Arg(t);
}

void BM_gemm_nn(benchmark::State& state) {
    // One minibatch through the first layer of the supervised preset.
    const Matrix a = random_matrix(256, 784, 1), b = random_matrix(784, 70, 2);
    Matrix out(256, 70);
    const int mode = static_cast<int>(state.range(0));
    if (mode > 0) set_threads(mode);
    for (auto _ : state) {
        if (mode == 0)
            serial::gemm_nn(a, b, out);
        else
            kernels::gemm_nn(a, b, out);
        benchmark::DoNotOptimize(out.values().data());
    }
    state.SetItemsProcessed(state.iterations() * 256 * 784 * 70);
}
BENCHMARK(BM_gemm_nn)->Apply(threads_arg);

void BM_gemm_tn(benchmark::State& state) {
    const Matrix a = random_matrix(256, 784, 3), b = random_matrix(256, 70, 4);
    Matrix out(784, 70);
    const int mode = static_cast<int>(state.range(0));
    if (mode > 0) set_threads(mode);
    for (auto _ : state) {
        if (mode == 0)
            serial::gemm_tn(a, b, out);
        else
            kernels::gemm_tn(a, b, out);
        benchmark::DoNotOptimize(out.values().data());
    }
}
BENCHMARK(BM_gemm_tn)->Apply(threads_arg);

void BM_nearest_centroid(benchmark::State& state) {
    const Matrix data = random_matrix(2000, 784, 5), centroids = random_matrix(256, 784, 6);
    std::vector<std::uint32_t> assignment(2000);
    std::vector<double> dist2(2000);
    const int mode = static_cast<int>(state.range(0));
    if (mode > 0) set_threads(mode);
    for (auto _ : state) {
        if (mode == 0)
            serial::nearest_centroid(data, centroids, assignment, dist2);
        else
            kernels::nearest_centroid(data, centroids, assignment, dist2);
        benchmark::DoNotOptimize(dist2.data());
    }
}
BENCHMARK(BM_nearest_centroid)->Apply(threads_arg);

void BM_count_codes(benchmark::State& state) {
    Rng rng(7);
    std::vector<BinaryCode> codes;
    for (int i = 0; i < 60000; ++i) {
        BinaryCode c(64);
        for (std::size_t b = 0; b < 64; ++b) c.set(b, rng.uniform() < 0.1);
        codes.push_back(c);
    }
    const int mode = static_cast<int>(state.range(0));
    if (mode > 0) set_threads(mode);
    for (auto _ : state) {
        if (mode == 0)
            benchmark::DoNotOptimize(serial::count_codes(codes).distinct());
        else
            benchmark::DoNotOptimize(count_codes(codes).distinct());
    }
}
BENCHMARK(BM_count_codes)->Apply(threads_arg);

void BM_ising_chains(benchmark::State& state) {
    IsingParams p;
    p.side = 10;
    p.sweeps_equilibrate = 200;
    p.sweeps_between_samples = 10;
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(generate_ising_dataset(p, 2000, Rng(8), 4).samples.rows());
}
BENCHMARK(BM_ising_chains)->Apply(chain_threads_arg)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
