#include "critrep/ising.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "critrep/errors.hpp"

namespace critrep {

void IsingParams::validate() const {
    if (side < 2) throw std::invalid_argument("IsingParams: side must be >= 2");
    if (!(temperature > 0.0)) throw std::invalid_argument("IsingParams: temperature must be > 0");
    if (sweeps_between_samples == 0) throw std::invalid_argument("IsingParams: sample stride must be >= 1");
}

IsingLattice IsingLattice::all_up(std::size_t side) {
    return {side, std::vector<std::int8_t>(side * side, 1)};
}

IsingLattice IsingLattice::random(std::size_t side, Rng& rng) {
    IsingLattice l{side, std::vector<std::int8_t>(side * side)};
    for (auto& s : l.spins) s = (rng.next() >> 63) ? 1 : -1;
    return l;
}

double IsingLattice::magnetization() const {
    long total = 0;
    for (auto s : spins) total += s;
    return static_cast<double>(total) / static_cast<double>(spins.size());
}

void IsingLattice::validate() const {
    if (spins.size() != side * side) throw DimensionError("IsingLattice: spin count != side^2");
    for (auto s : spins)
        if (s != 1 && s != -1) throw std::invalid_argument("IsingLattice: spin not +-1");
}

long bond_sum(const IsingLattice& l, Boundary boundary) {
    const std::size_t n = l.side;
    long total = 0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            const int s = l.spins[r * n + c];
            if (c + 1 < n) total += s * l.spins[r * n + c + 1];
            else if (boundary == Boundary::periodic) total += s * l.spins[r * n];
            if (r + 1 < n) total += s * l.spins[(r + 1) * n + c];
            else if (boundary == Boundary::periodic) total += s * l.spins[c];
        }
    }
    return total;
}

double ising_energy(const IsingLattice& lattice, const IsingParams& params) {
    if (lattice.side != params.side) throw DimensionError("ising_energy: lattice side != params side");
    return -params.coupling * static_cast<double>(bond_sum(lattice, params.boundary));
}

double metropolis_acceptance(double delta_energy, double temperature) {
    return delta_energy <= 0.0 ? 1.0 : std::exp(-delta_energy / temperature);
}

SweepStats metropolis_sweep(IsingLattice& l, const IsingParams& p, Rng& rng) {
    const std::size_t n = l.side;
    const bool periodic = p.boundary == Boundary::periodic;
    // s_i * (local field) ranges over [-4, 4]; flipping costs dE = 2 J s_i h.
    std::array<double, 9> accept{};
    for (int x = -4; x <= 4; ++x) accept[x + 4] = metropolis_acceptance(2.0 * p.coupling * x, p.temperature);

    SweepStats stats;
    const std::size_t sites = n * n;
    for (std::size_t step = 0; step < sites; ++step) {
        const std::size_t i = rng.below(sites);
        const std::size_t r = i / n, c = i % n;
        int h = 0;
        if (c + 1 < n) h += l.spins[i + 1];
        else if (periodic) h += l.spins[r * n];
        if (c > 0) h += l.spins[i - 1];
        else if (periodic) h += l.spins[r * n + n - 1];
        if (r + 1 < n) h += l.spins[i + n];
        else if (periodic) h += l.spins[c];
        if (r > 0) h += l.spins[i - n];
        else if (periodic) h += l.spins[(n - 1) * n + c];

        const int x = l.spins[i] * h;
        const double a = accept[x + 4];
        if (a >= 1.0 || rng.uniform() < a) {
            l.spins[i] = static_cast<std::int8_t>(-l.spins[i]);
            stats.delta_bond_sum -= 2 * x;
            ++stats.accepted;
        }
    }
    return stats;
}

LabeledDataset generate_ising_dataset(const IsingParams& params, std::size_t n_samples,
                                      const Rng& rng, unsigned chains) {
    params.validate();
    if (n_samples == 0) throw std::invalid_argument("generate_ising_dataset: n_samples must be >= 1");
    if (chains == 0) chains = 1;

    const std::size_t sites = params.side * params.side;
    LabeledDataset ds;
    ds.samples = Matrix(n_samples, sites);
    ds.image_rows = ds.image_cols = params.side;

    std::vector<std::size_t> offset(chains + 1, 0);
    for (unsigned c = 0; c < chains; ++c)
        offset[c + 1] = offset[c] + n_samples / chains + (c < n_samples % chains ? 1 : 0);

#pragma omp parallel for schedule(static, 1)
    for (int ci = 0; ci < static_cast<int>(chains); ++ci) {
        const auto c = static_cast<unsigned>(ci);
        Rng chain_rng = rng.stream(c);
        IsingLattice lattice = IsingLattice::random(params.side, chain_rng);
        for (std::size_t s = 0; s < params.sweeps_equilibrate; ++s) metropolis_sweep(lattice, params, chain_rng);
        for (std::size_t row = offset[c]; row < offset[c + 1]; ++row) {
            for (std::size_t s = 0; s < params.sweeps_between_samples; ++s)
                metropolis_sweep(lattice, params, chain_rng);
            auto out = ds.samples.row(row);
            for (std::size_t k = 0; k < sites; ++k) out[k] = lattice.spins[k] > 0 ? 1.0 : 0.0;
        }
    }
    return ds;
}

}  // namespace critrep
