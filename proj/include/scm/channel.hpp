#pragma once

#include <Eigen/Dense>

#include "scm/rng.hpp"

namespace scm {

enum class FadingModel { Rayleigh, Rician, Nakagami };

struct ChannelSpec {
    FadingModel model = FadingModel::Rayleigh;
    int N = 1;           // receive antennas
    int M = 1;           // transmit antennas
    double K = 0.0;      // Rician factor (linear power ratio)
    double m = 1.0;      // Nakagami shape
    double rho = 0.0;    // receive correlation coefficient
    double tau = 0.0;    // transmit correlation coefficient
    double gamma2 = 0.0; // channel-estimate error variance

    void validate() const; // throws ConfigError
};

struct ChannelDraw {
    Eigen::MatrixXcd H;     // true channel, N x M
    Eigen::MatrixXcd H_hat; // receiver's estimate; equals H when gamma2 = 0
};

// First/second moments of the stacked channel vector omega.
//
// Stacking convention (fixed for the whole tool): omega[n*M + m] = H(n, m),
// i.e. receive rows are stacked in order. Under this convention cov(omega)
// factorizes as kron(F, G) and the quadratic-form matrix below satisfies
// omega^H A omega = ||H delta||^2.
struct ChannelMoments {
    Eigen::VectorXcd mu;
    Eigen::MatrixXcd sigma;
};

// size x size matrix with entry (l, k) = coef^|l-k|.
Eigen::MatrixXd correlation_matrix(int size, double coef);

// Hermitian PSD square root; eigenvalues below 1e-12 are clipped to zero
// (correlation coefficient 1 makes the matrices singular).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& mat);

Eigen::VectorXcd stack_channel(const Eigen::MatrixXcd& H);

// A = I_N kron (conj(delta) * delta^T), so omega^H A omega = ||H delta||^2.
Eigen::MatrixXcd quadratic_form_matrix(const Eigen::VectorXcd& delta, int N);

// Draws channels; precomputes the correlation roots once.
class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelSpec& spec);

    ChannelDraw draw(StreamRng& rng) const;
    const ChannelSpec& spec() const { return spec_; }

private:
    ChannelSpec spec_;
    Eigen::MatrixXd froot_, groot_;
    bool correlated_ = false;
    double los_ = 0.0;       // Rician line-of-sight amplitude
    double scatter_ = 1.0;   // Rician scattered amplitude
    double nak_shape_ = 0.0; // per-quadrature Gamma shape (m/2)
    double nak_scale_ = 0.0; // per-quadrature Gamma scale (1/m)
};

ChannelDraw sample_channel(const ChannelSpec& spec, StreamRng& rng);

ChannelMoments channel_moments(const ChannelSpec& spec);

} // namespace scm
