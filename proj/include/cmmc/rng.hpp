#pragma once

#include <array>
#include <cstdint>

namespace cmmc {

/// Deterministic splittable random stream.
///
/// A stream is identified by (seed, stream_id). Equal identifiers reproduce
/// the exact same draw sequence on every platform; distinct stream_ids give
/// statistically independent streams. The generator is xoshiro256++ with
/// per-stream state derived from (seed, stream_id) by SplitMix64 hashing.
/// All distribution samplers below are implemented in-repo so that draws are
/// bit-reproducible independently of the standard library.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Independent stream derived from this stream's identity and a key.
    RngStream sub(std::uint64_t key) const;

    std::uint64_t next_u64();

    /// Uniform on [0,1) with 53 random bits.
    double uniform();
    double uniform(double a, double b);

    /// Uniform integer on {0, ..., bound-1}; bound >= 1.
    std::uint64_t uniform_int(std::uint64_t bound);

    /// Standard normal (Box-Muller, one value per two uniforms).
    double normal();

    /// Exponential with rate 1.
    double exponential();

    /// Poisson draw; inversion for small means, transformed rejection (PTRS)
    /// for large means.
    long poisson(double mean);

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::array<std::uint64_t, 4> s_{};
};

} // namespace cmmc
