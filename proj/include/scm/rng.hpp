#pragma once

#include <complex>
#include <cstdint>

namespace scm {

// Mixes two 64-bit values into a well-scrambled stream seed.
std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b);

// Counter-addressable deterministic generator (SplitMix64 core).
//
// A stream is fully determined by (seed, s1, s2); values never depend on what
// other streams have drawn, so per-trial streams keyed by (seed, snr_index,
// trial_index) make simulation results independent of execution order and
// worker count. Output is identical on any platform with IEEE-754 doubles.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t seed, std::uint64_t s1 = 0, std::uint64_t s2 = 0);

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform();
    // Uniform in (0, 1]; safe as a log() argument.
    double uniform_pos();
    // Standard normal via Box-Muller (second value cached).
    double normal();
    // Circularly symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> cscg(double variance);
    // Gamma(shape, scale) via Marsaglia-Tsang squeeze (with boost for shape < 1).
    double gamma(double shape, double scale);

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace scm
