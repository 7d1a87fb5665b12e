#include "scm/constellation.hpp"

#include <cmath>

#include "scm/errors.hpp"

namespace scm {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_int(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

unsigned gray(unsigned n) { return n ^ (n >> 1); }

std::string bit_string(unsigned value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i)
        if (value & (1u << (width - 1 - i))) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

} // namespace

int Constellation::bits() const { return log2_int(order); }

Constellation build_constellation(ApmKind kind, int order) {
    if (!is_power_of_two(order) || order < 2)
        throw ConfigError("constellation order must be a power of two >= 2, got " +
                          std::to_string(order));

    Constellation c;
    c.kind = kind;
    c.order = order;
    c.points.resize(static_cast<std::size_t>(order));
    c.labels.resize(static_cast<std::size_t>(order));
    const int b = log2_int(order);

    if (kind == ApmKind::Psk) {
        // Rotate QPSK onto the diagonals; other rings start at angle 0.
        const double offset = (order == 4) ? M_PI / 4.0 : 0.0;
        for (int n = 0; n < order; ++n) {
            const double phi = 2.0 * M_PI * n / order + offset;
            c.points[static_cast<std::size_t>(n)] = {std::cos(phi), std::sin(phi)};
            c.labels[static_cast<std::size_t>(n)] = bit_string(gray(static_cast<unsigned>(n)), b);
        }
        if (order == 2) {
            c.points[0] = {1.0, 0.0};
            c.points[1] = {-1.0, 0.0};
        }
        return c;
    }

    if (order != 4 && order != 16 && order != 64)
        throw ConfigError("square QAM supports orders 4, 16, 64; got " + std::to_string(order));

    const int side = (order == 4) ? 2 : (order == 16 ? 4 : 8);
    const int half = b / 2;
    // Average pre-scaling power of a square grid with odd-integer levels.
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            const double re = (2 * col - (side - 1)) * scale;
            const double im = (2 * row - (side - 1)) * scale;
            const int idx = row * side + col;
            c.points[static_cast<std::size_t>(idx)] = {re, im};
            c.labels[static_cast<std::size_t>(idx)] =
                bit_string(gray(static_cast<unsigned>(row)), half) +
                bit_string(gray(static_cast<unsigned>(col)), half);
        }
    }
    return c;
}

ApmKind apm_kind_from_string(const std::string& name) {
    if (name == "psk" || name == "PSK") return ApmKind::Psk;
    if (name == "qam" || name == "QAM") return ApmKind::Qam;
    throw ConfigError("unknown constellation kind '" + name + "' (expected psk or qam)");
}

std::string apm_kind_to_string(ApmKind kind) {
    return kind == ApmKind::Psk ? "psk" : "qam";
}

} // namespace scm
