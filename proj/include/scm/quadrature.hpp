#pragma once

#include <vector>

namespace scm {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre rule with n nodes on (a, b).
QuadratureRule gauss_legendre(int n, double a, double b);

// Rule on (0, pi/2), the Craig-representation integration range.
QuadratureRule gauss_legendre_half_pi(int n = 64);

} // namespace scm
