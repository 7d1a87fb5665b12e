#include "scm/channel.hpp"

#include <cmath>

#include "scm/errors.hpp"

namespace scm {

namespace {

// Gamma((m+1)/2) / Gamma(m/2), evaluated stably.
double gamma_ratio_half(double m) {
    return std::exp(std::lgamma((m + 1.0) * 0.5) - std::lgamma(m * 0.5));
}

} // namespace

void ChannelSpec::validate() const {
    if (N < 1 || M < 1) throw ConfigError("channel needs N >= 1 and M >= 1");
    if (K < 0.0) throw ConfigError("Rician factor must be >= 0");
    if (m < 0.5) throw ConfigError("Nakagami shape must be >= 0.5");
    if (rho < 0.0 || rho > 1.0 || tau < 0.0 || tau > 1.0)
        throw ConfigError("correlation coefficients must lie in [0, 1]");
    if (gamma2 < 0.0) throw ConfigError("channel-estimate error variance must be >= 0");
}

Eigen::MatrixXd correlation_matrix(int size, double coef) {
    if (coef < 0.0 || coef > 1.0) throw ConfigError("correlation coefficient must lie in [0, 1]");
    Eigen::MatrixXd r(size, size);
    for (int l = 0; l < size; ++l)
        for (int k = 0; k < size; ++k) r(l, k) = std::pow(coef, std::abs(l - k));
    return r;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& mat) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in psd_sqrt");
    Eigen::VectorXd d = es.eigenvalues();
    for (int i = 0; i < d.size(); ++i) d(i) = d(i) < 1e-12 ? 0.0 : std::sqrt(d(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::VectorXcd stack_channel(const Eigen::MatrixXcd& H) {
    const int N = static_cast<int>(H.rows());
    const int M = static_cast<int>(H.cols());
    Eigen::VectorXcd omega(N * M);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) omega(n * M + m) = H(n, m);
    return omega;
}

Eigen::MatrixXcd quadratic_form_matrix(const Eigen::VectorXcd& delta, int N) {
    const int M = static_cast<int>(delta.size());
    const Eigen::MatrixXcd block = delta.conjugate() * delta.transpose();
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N * M, N * M);
    for (int n = 0; n < N; ++n) A.block(n * M, n * M, M, M) = block;
    return A;
}

ChannelSampler::ChannelSampler(const ChannelSpec& spec) : spec_(spec) {
    spec_.validate();
    correlated_ = spec_.rho != 0.0 || spec_.tau != 0.0;
    if (correlated_) {
        froot_ = psd_sqrt(correlation_matrix(spec_.N, spec_.rho));
        groot_ = psd_sqrt(correlation_matrix(spec_.M, spec_.tau));
    }
    if (spec_.model == FadingModel::Rician) {
        los_ = std::sqrt(spec_.K / (spec_.K + 1.0));
        scatter_ = std::sqrt(1.0 / (spec_.K + 1.0));
    }
    if (spec_.model == FadingModel::Nakagami) {
        nak_shape_ = spec_.m * 0.5;
        nak_scale_ = 1.0 / spec_.m;
    }
}

ChannelDraw ChannelSampler::draw(StreamRng& rng) const {
    const int N = spec_.N;
    const int M = spec_.M;
    Eigen::MatrixXcd H(N, M);

    switch (spec_.model) {
    case FadingModel::Rayleigh:
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) H(n, m) = rng.cscg(1.0);
        break;
    case FadingModel::Rician:
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) H(n, m) = los_ + scatter_ * rng.cscg(1.0);
        break;
    case FadingModel::Nakagami:
        // Each quadrature is an independent real Nakagami(m/2, 1/2) amplitude,
        // i.e. the square root of a Gamma(m/2, 1/m) draw; this reproduces the
        // per-entry mean with phase pi/4 and unit second moment.
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) {
                const double re = std::sqrt(rng.gamma(nak_shape_, nak_scale_));
                const double im = std::sqrt(rng.gamma(nak_shape_, nak_scale_));
                H(n, m) = {re, im};
            }
        break;
    }

    if (correlated_) H = froot_ * H * groot_;

    ChannelDraw draw;
    if (spec_.gamma2 > 0.0) {
        Eigen::MatrixXcd eps(N, M);
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) eps(n, m) = rng.cscg(spec_.gamma2);
        draw.H_hat = H - eps;
    } else {
        draw.H_hat = H;
    }
    draw.H = std::move(H);
    return draw;
}

ChannelDraw sample_channel(const ChannelSpec& spec, StreamRng& rng) {
    return ChannelSampler(spec).draw(rng);
}

ChannelMoments channel_moments(const ChannelSpec& spec) {
    spec.validate();
    const int N = spec.N;
    const int M = spec.M;
    const Eigen::MatrixXd F = correlation_matrix(N, spec.rho);
    const Eigen::MatrixXd G = correlation_matrix(M, spec.tau);

    Eigen::MatrixXd B(N * M, N * M);
    for (int n = 0; n < N; ++n)
        for (int np = 0; np < N; ++np)
            B.block(n * M, np * M, M, M) = F(n, np) * G;

    ChannelMoments mom;
    switch (spec.model) {
    case FadingModel::Rayleigh:
        mom.mu = Eigen::VectorXcd::Zero(N * M);
        mom.sigma = B.cast<std::complex<double>>();
        break;
    case FadingModel::Rician: {
        const Eigen::VectorXd broot_ones = psd_sqrt(B) * Eigen::VectorXd::Ones(N * M);
        mom.mu = std::sqrt(spec.K / (spec.K + 1.0)) * broot_ones.cast<std::complex<double>>();
        mom.sigma = (B / (spec.K + 1.0)).cast<std::complex<double>>();
        break;
    }
    case FadingModel::Nakagami: {
        const double ratio = gamma_ratio_half(spec.m);
        const double mean_amp = ratio / std::sqrt(spec.m * 0.5);
        const std::complex<double> phase(std::sqrt(0.5), std::sqrt(0.5)); // e^{i pi/4}
        const Eigen::VectorXd broot_ones = psd_sqrt(B) * Eigen::VectorXd::Ones(N * M);
        mom.mu = (mean_amp * phase) * broot_ones.cast<std::complex<double>>();
        const double var = 1.0 - (2.0 / spec.m) * ratio * ratio;
        mom.sigma = (var * B).cast<std::complex<double>>();
        break;
    }
    }
    return mom;
}

} // namespace scm
