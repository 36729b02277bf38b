#pragma once

#include <array>
#include <cstdint>

namespace critrep {

/// xoshiro256** generator, seeded by expanding a 64-bit seed with splitmix64.
///
/// Stream layout is fixed so other implementations can reproduce draws:
///   - next():          xoshiro256** output
///   - uniform():       (next() >> 11) * 2^-53, in [0, 1)
///   - below(n):        rejection on next() < (2^64 mod n), then next() % n
///   - normal():        Box-Muller, one output per call, u1 = 1 - uniform()
///   - jump():          the reference 2^128-step jump polynomial
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t next();
    double uniform();
    std::uint64_t below(std::uint64_t n);
    double normal();
    bool bernoulli(double p) { return uniform() < p; }

    void jump();

    /// Copy advanced by `index` jumps; stream `index` for parallel workers.
    [[nodiscard]] Rng stream(unsigned index) const;

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace critrep
