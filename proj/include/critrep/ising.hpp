#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "critrep/dataset.hpp"
#include "critrep/rng.hpp"

namespace critrep {

enum class Boundary { periodic, free };

// Shipped temperatures for the low / critical / high Ising datasets.
inline constexpr double kIsingLowT = 1.53;
inline constexpr double kIsingCriticalT = 2.26;
inline constexpr double kIsingHighT = 3.28;
inline constexpr std::size_t kIsingDefaultSamples = 50000;

struct IsingParams {
    std::size_t side = 10;
    double coupling = 1.0;
    double temperature = kIsingCriticalT;
    std::size_t sweeps_equilibrate = 10000;
    std::size_t sweeps_between_samples = 10;
    Boundary boundary = Boundary::periodic;

    void validate() const;  // side >= 2, T > 0
};

struct IsingLattice {
    std::size_t side = 0;
    std::vector<std::int8_t> spins;  // row-major, each +1 or -1

    static IsingLattice all_up(std::size_t side);
    static IsingLattice random(std::size_t side, Rng& rng);

    double magnetization() const;  // mean spin in [-1, 1]
    void validate() const;
};

/// Sum over nearest-neighbour bonds (each counted once) of s_i * s_j.
/// On a periodic lattice with side 2 the wrap-around bond doubles up, matching
/// the four-neighbour local field used by the sampler.
long bond_sum(const IsingLattice& lattice, Boundary boundary);

/// E = -J * bond_sum.
double ising_energy(const IsingLattice& lattice, const IsingParams& params);

/// Metropolis acceptance probability min(1, exp(-dE / T)).
double metropolis_acceptance(double delta_energy, double temperature);

struct SweepStats {
    std::size_t accepted = 0;
    long delta_bond_sum = 0;  // change in bond_sum accumulated flip by flip
};

/// side^2 single-spin-flip proposals at uniformly drawn sites. A uniform draw
/// is consumed only for energy-raising proposals.
SweepStats metropolis_sweep(IsingLattice& lattice, const IsingParams& params, Rng& rng);

/// Equilibrates, then records one sample every `sweeps_between_samples`
/// sweeps with spins mapped -1 -> 0 and +1 -> 1. Samples come from `chains`
/// independent chains (chain c uses rng.stream(c), starting from a random
/// lattice) and are concatenated chain by chain, so the output depends on the
/// chain count but not on the number of threads.
LabeledDataset generate_ising_dataset(const IsingParams& params, std::size_t n_samples,
                                      const Rng& rng, unsigned chains = 1);

}  // namespace critrep
