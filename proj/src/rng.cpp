#include "cmmc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace cmmc {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
    std::uint64_t x = seed;
    (void)splitmix64(x);
    x ^= 0x9E3779B97F4A7C15ULL * (stream_id + 0x632BE59BD9B4E019ULL);
    for (auto& w : s_) w = splitmix64(x);
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
}

RngStream RngStream::sub(std::uint64_t key) const {
    std::uint64_t x = seed_;
    (void)splitmix64(x);
    x ^= 0xD1B54A32D192ED03ULL * (stream_id_ + 1);
    std::uint64_t derived_seed = splitmix64(x);
    return RngStream(derived_seed, key);
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double a, double b) {
    return a + (b - a) * uniform();
}

std::uint64_t RngStream::uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be >= 1");
    // rejection sampling on the top bits, no modulo bias
    const std::uint64_t threshold = (~bound + 1) % bound; // (2^64 - bound) mod bound
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= threshold) return r % bound;
    }
}

double RngStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    return radius * std::cos(6.283185307179586476925286766559 * u2);
}

double RngStream::exponential() {
    return -std::log1p(-uniform());
}

long RngStream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 30.0) {
        // inversion by sequential search
        const double p0 = std::exp(-mean);
        double p = p0, cum = p0;
        const double u = uniform();
        long k = 0;
        while (u > cum) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
            if (k > 2000) break; // numerically exhausted tail
        }
        return k;
    }
    // PTRS transformed rejection (Hoermann 1993), valid for mean >= 10
    const double lam = mean;
    const double log_lam = std::log(lam);
    const double b = 0.931 + 2.53 * std::sqrt(lam);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lam + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_lam - lam - std::lgamma(kf + 1.0))
            return static_cast<long>(kf);
    }
}

} // namespace cmmc
