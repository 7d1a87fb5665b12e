#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "scm/alphabet.hpp"
#include "scm/channel.hpp"
#include "scm/quadrature.hpp"

namespace scm {

struct BoundInput {
    double sigma2 = 1.0; // noise variance (linear); SNR = 1/sigma2
    double gamma2 = 0.0; // channel-estimate error variance (0 => perfect CSI)
    ChannelMoments moments;
    ScmAlphabet alphabet;
};

// E[exp(t * omega^H A omega)] for omega ~ CN(mu, sigma):
// |I - t*sigma*A|^{-1} * exp(t * mu^H A (I - t*sigma*A)^{-1} mu).
// Requires t <= 0 for the uses below; throws NumericalError when the linear
// system is singular or the analytically-real result has imaginary residue.
double mgf_gaussian_quadratic(double t, const Eigen::VectorXcd& mu, const Eigen::MatrixXcd& sigma,
                              const Eigen::MatrixXcd& A);

struct CapacityEstimate {
    double bits = 0.0;
    double std_err = 0.0;
};

// Monte Carlo mutual-information estimate for a uniform input over the
// alphabet: log2 L - (1/L) sum_i E[log2 sum_j exp((||u||^2 -
// ||u + H(x_j - x_i)||^2)/sigma2)], one fresh (H, u) pair per (trial, i),
// log-domain inner sum. Trial t uses the counter stream (seed, stream, t), so
// the estimate is deterministic for fixed seed, any worker count; sweep
// drivers pass the grid index as `stream`.
CapacityEstimate capacity_mc(const ScmAlphabet& alphabet, const ChannelSpec& spec, double sigma2,
                             long trials, std::uint64_t seed, std::uint64_t stream = 0,
                             int workers = 1);

// 2*log2 L - log2 sum_ij MGF(-1/(2*sigma2)); perfect CSI only.
double capacity_lower_bound(const BoundInput& input);

// (1/(pi L log2 L)) * sum_ij d(x_i,x_j) * integral over theta of
// MGF(-1/(4 sigma2 sin^2 theta)), with a node-doubling convergence check.
double ber_union_bound(const BoundInput& input, const QuadratureRule& quad);

// Same with per-transmit-symbol noise eta_i^2 = gamma2*||x_i||^2 + sigma2 and
// covariance sigma + gamma2*I; reduces to ber_union_bound at gamma2 = 0.
double ber_union_bound_icsi(const BoundInput& input, const QuadratureRule& quad);

struct RayleighBounds {
    double capacity_lb = 0.0;
    double ber_ub = 0.0;
};

// Closed-form i.i.d.-Rayleigh expressions driven by min ||delta||^2 and the
// label-distance sum, printed-form verbatim:
//   capacity_lb = log2 L - log2(1 + (L-1)/2 * (1 + dmin2/(2 sigma2))^{-N})
//   ber_ub      = (L-1) d_sum / (2 pi log2 L) * (1 + dmin2/(8 sigma2^2))^{-N}
// The ber_ub exponent uses sigma^4 and the prefactor over-counts pairs; both
// are reproduced as printed (see README "known formula quirks").
RayleighBounds rayleigh_simple_bounds(const ScmAlphabet& alphabet, double sigma2, int N);

} // namespace scm
