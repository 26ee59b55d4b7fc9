#pragma once

#include <cstdint>
#include <random>

namespace cpf {

/// Purpose tags for independent random streams derived from one master seed.
enum class Stream : std::uint32_t {
    Init = 1,
    Shuffle = 2,
    Dropout = 3,
    Simulation = 4,
    NullReplication = 5,
};

/**
 * Portable pseudo-random source.
 *
 * The engine is std::mt19937_64 seeded through std::seed_seq; both have
 * exactly specified output sequences, so a given (seed, stream, index)
 * triple produces the same numbers on every conforming platform. The
 * standard distributions are not portable, so the variate transforms are
 * done here.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed, Stream stream = Stream::Init, std::uint64_t index = 0);

    /// Raw 64-bit output.
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via the Marsaglia polar method.
    double normal();

    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cpf
