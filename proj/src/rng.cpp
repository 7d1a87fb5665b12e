#include "scm/rng.hpp"

#include <cmath>

namespace scm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix_final(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t mix_u64(std::uint64_t a, std::uint64_t b) {
    // Two finalizer rounds decorrelate nearby (a, b) pairs.
    return splitmix_final(splitmix_final(a + kGolden * (b + 1)) + kGolden);
}

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t s1, std::uint64_t s2)
    : state_(mix_u64(mix_u64(seed, s1), s2)) {}

std::uint64_t StreamRng::next_u64() {
    state_ += kGolden;
    return splitmix_final(state_);
}

double StreamRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double StreamRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

std::complex<double> StreamRng::cscg(double variance) {
    const double s = std::sqrt(variance * 0.5);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
}

double StreamRng::gamma(double shape, double scale) {
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^(1/a).
        const double u = uniform_pos();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

} // namespace scm
