#pragma once

#include <complex>
#include <string>
#include <vector>

namespace scm {

enum class ApmKind { Psk, Qam };

// Unit-average-power symbol set with Gray bit labels.
struct Constellation {
    ApmKind kind = ApmKind::Psk;
    int order = 0;
    std::vector<std::complex<double>> points;
    std::vector<std::string> labels;

    int bits() const; // log2(order)
};

// kind = Psk: order >= 2 points on the unit circle (QPSK rotated by pi/4 so
// points sit on the diagonals; BPSK is {+1, -1}), ring Gray labels.
// kind = Qam: square grids of order 4/16/64, odd-integer coordinates scaled to
// unit average power, per-axis Gray labels.
Constellation build_constellation(ApmKind kind, int order);

ApmKind apm_kind_from_string(const std::string& name);
std::string apm_kind_to_string(ApmKind kind);

} // namespace scm
