#include "scm/quadrature.hpp"

#include <cmath>

#include "scm/errors.hpp"

namespace scm {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw ConfigError("quadrature rule needs at least 1 node");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));

    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Newton iteration on P_n from the Chebyshev-angle initial guess.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        rule.nodes[static_cast<std::size_t>(i)] = xm - xl * z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = xm + xl * z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

QuadratureRule gauss_legendre_half_pi(int n) { return gauss_legendre(n, 0.0, M_PI / 2.0); }

} // namespace scm
