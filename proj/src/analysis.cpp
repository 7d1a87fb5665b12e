#include "scm/analysis.hpp"

#include <cmath>
#include <cstring>
#include <thread>
#include <unordered_map>
#include <vector>

#include "scm/errors.hpp"

namespace scm {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Byte key for the pair-difference vector, canonicalized so that a common
// phase rotation (which leaves the quadratic-form matrix unchanged) maps to
// the same key: the first nonzero component is rotated onto the positive
// real axis.
std::string delta_key(const Eigen::VectorXcd& delta) {
    Eigen::VectorXcd canon = delta;
    for (int i = 0; i < canon.size(); ++i) {
        const double mag = std::abs(canon(i));
        if (mag > 0.0) {
            canon *= std::conj(canon(i)) / mag;
            break;
        }
    }
    return {reinterpret_cast<const char*>(canon.data()),
            static_cast<std::size_t>(canon.size()) * sizeof(std::complex<double>)};
}

int infer_rx_count(const BoundInput& input) {
    const int M = input.alphabet.M();
    const auto dim = static_cast<int>(input.moments.mu.size());
    if (M <= 0 || dim % M != 0 || dim == 0)
        throw ConfigError("channel moments dimension does not match the alphabet antenna count");
    if (input.moments.sigma.rows() != dim || input.moments.sigma.cols() != dim)
        throw ConfigError("channel moment covariance has inconsistent dimensions");
    return dim / M;
}

// Integral over theta of MGF(-1/(4 eta2 sin^2 theta)) for one delta class,
// including the 1/pi Craig factor ... the caller divides by pi once.
double pair_integral(const Eigen::VectorXcd& delta, double eta2, const Eigen::VectorXcd& mu,
                     const Eigen::MatrixXcd& sigma, int N, const QuadratureRule& quad) {
    const Eigen::MatrixXcd A = quadratic_form_matrix(delta, N);
    double acc = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
        const double s = std::sin(quad.nodes[static_cast<std::size_t>(q)]);
        const double t = -1.0 / (4.0 * eta2 * s * s);
        acc += quad.weights[static_cast<std::size_t>(q)] * mgf_gaussian_quadratic(t, mu, sigma, A);
    }
    return acc;
}

double union_bound_with_rule(const BoundInput& input, const QuadratureRule& quad, bool icsi) {
    const ScmAlphabet& a = input.alphabet;
    const int L = a.L();
    const int N = infer_rx_count(input);
    const double log2L = a.bits_per_symbol();
    if (L < 2) throw ConfigError("BER bound undefined for an alphabet of size < 2");

    Eigen::MatrixXcd sigma_bar = input.moments.sigma;
    if (icsi && input.gamma2 > 0.0)
        sigma_bar += input.gamma2 * Eigen::MatrixXcd::Identity(sigma_bar.rows(), sigma_bar.cols());

    std::vector<double> eta2(static_cast<std::size_t>(L), input.sigma2);
    if (icsi)
        for (int i = 0; i < L; ++i)
            eta2[static_cast<std::size_t>(i)] =
                input.gamma2 * a.vectors[static_cast<std::size_t>(i)].squaredNorm() + input.sigma2;

    std::unordered_map<std::string, double> cache;

    auto integral_for = [&](const Eigen::VectorXcd& delta, double e2) {
        std::string key = delta_key(delta);
        key.append(reinterpret_cast<const char*>(&e2), sizeof(double));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const double val = pair_integral(delta, e2, input.moments.mu, sigma_bar, N, quad);
        cache.emplace(std::move(key), val);
        return val;
    };

    double total = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = i + 1; j < L; ++j) {
            const int d = label_distance(a, i, j);
            if (d == 0) continue;
            const Eigen::VectorXcd delta =
                a.vectors[static_cast<std::size_t>(i)] - a.vectors[static_cast<std::size_t>(j)];
            // Ordered pairs (i,j) and (j,i) share A but not (under imperfect
            // CSI) the transmitted symbol's equivalent noise.
            const double fwd = integral_for(delta, eta2[static_cast<std::size_t>(i)]);
            const double rev = eta2[static_cast<std::size_t>(j)] == eta2[static_cast<std::size_t>(i)]
                                   ? fwd
                                   : integral_for(delta, eta2[static_cast<std::size_t>(j)]);
            total += d * (fwd + rev);
        }
    }
    return total / (M_PI * L * log2L);
}

double union_bound_impl(const BoundInput& input, const QuadratureRule& quad, bool icsi) {
    if (input.sigma2 <= 0.0) throw ConfigError("noise variance must be > 0");
    if (input.gamma2 < 0.0) throw ConfigError("channel-estimate error variance must be >= 0");

    const double coarse = union_bound_with_rule(input, quad, icsi);
    const QuadratureRule doubled = gauss_legendre_half_pi(2 * quad.size());
    const double fine = union_bound_with_rule(input, doubled, icsi);
    const double rel = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
    if (rel > 1e-6)
        throw NumericalError("quadrature did not converge: node doubling moved the bound by " +
                             std::to_string(rel) + " relative");
    return fine;
}

} // namespace

double mgf_gaussian_quadratic(double t, const Eigen::VectorXcd& mu, const Eigen::MatrixXcd& sigma,
                              const Eigen::MatrixXcd& A) {
    const auto n = A.rows();
    if (A.cols() != n || sigma.rows() != n || sigma.cols() != n || mu.size() != n)
        throw ConfigError("MGF inputs must share one square dimension");

    const Eigen::MatrixXcd B =
        Eigen::MatrixXcd::Identity(n, n) - t * (sigma * A);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
    const std::complex<double> det = lu.determinant();
    const double b_norm = B.cwiseAbs().maxCoeff();
    if (!std::isfinite(std::abs(det)) || std::abs(det) < 1e-280 * std::max(1.0, b_norm))
        throw NumericalError("singular system in MGF evaluation: |det| = " +
                             std::to_string(std::abs(det)) +
                             ", matrix max-entry = " + std::to_string(b_norm));

    const Eigen::VectorXcd z = lu.solve(mu);
    const std::complex<double> quad_form = mu.dot(A * z); // mu^H A (I - t sigma A)^{-1} mu
    const std::complex<double> val = std::exp(t * quad_form) / det;
    if (std::abs(val.imag()) > 1e-10 * std::max(1.0, std::abs(val.real())))
        throw NumericalError("MGF evaluated to a non-real value; imaginary residue = " +
                             std::to_string(val.imag()));
    return val.real();
}

CapacityEstimate capacity_mc(const ScmAlphabet& alphabet, const ChannelSpec& spec, double sigma2,
                             long trials, std::uint64_t seed, std::uint64_t stream, int workers) {
    if (trials < 1) throw ConfigError("capacity estimation needs at least 1 trial");
    if (sigma2 <= 0.0) throw ConfigError("noise variance must be > 0");
    spec.validate();
    if (spec.M != alphabet.M())
        throw ConfigError("channel antenna count does not match the alphabet");

    const ChannelSampler sampler(spec);
    const int L = alphabet.L();
    const int nc = alphabet.codebook.size();
    const int N = spec.N;
    const double log2L = alphabet.bits_per_symbol();

    std::vector<double> per_trial(static_cast<std::size_t>(trials));
    const int nw = static_cast<int>(std::min<long>(std::max(workers, 1), trials));
    const long chunk = (trials + nw - 1) / nw;

    auto run_range = [&](long lo, long hi) {
        std::vector<Eigen::VectorXcd> tdir(static_cast<std::size_t>(nc));
        std::vector<double> expo(static_cast<std::size_t>(L));
        Eigen::VectorXcd u(N);
        for (long trial = lo; trial < hi; ++trial) {
            StreamRng rng(seed, stream, static_cast<std::uint64_t>(trial));
            double acc = 0.0;
            for (int i = 0; i < L; ++i) {
                const ChannelDraw draw = sampler.draw(rng);
                for (int n = 0; n < N; ++n) u(n) = rng.cscg(sigma2);
                for (int ci = 0; ci < nc; ++ci) {
                    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(N);
                    const auto& row = alphabet.codebook.codewords[static_cast<std::size_t>(ci)];
                    int w = 0;
                    for (int m = 0; m < alphabet.M(); ++m)
                        if (row[static_cast<std::size_t>(m)]) {
                            t += draw.H.col(m);
                            ++w;
                        }
                    tdir[static_cast<std::size_t>(ci)] = t / std::sqrt(static_cast<double>(w));
                }
                const Eigen::VectorXcd vi =
                    tdir[static_cast<std::size_t>(alphabet.codeword_of(i))] *
                    alphabet.constellation.points[static_cast<std::size_t>(alphabet.apm_of(i))];
                const double un = u.squaredNorm();

                // log-domain inner sum; the j = i term contributes exactly 0,
                // so the max exponent is always >= 0.
                double emax = 0.0;
                for (int j = 0; j < L; ++j) {
                    const Eigen::VectorXcd e =
                        u + tdir[static_cast<std::size_t>(alphabet.codeword_of(j))] *
                                alphabet.constellation
                                    .points[static_cast<std::size_t>(alphabet.apm_of(j))] -
                        vi;
                    const double aj = (un - e.squaredNorm()) / sigma2;
                    expo[static_cast<std::size_t>(j)] = aj;
                    if (aj > emax) emax = aj;
                }
                double s = 0.0;
                for (int j = 0; j < L; ++j) {
                    const double shifted = expo[static_cast<std::size_t>(j)] - emax;
                    if (shifted > -40.0) s += std::exp(shifted);
                }
                acc += (emax + std::log(s)) / kLn2;
            }
            per_trial[static_cast<std::size_t>(trial)] = log2L - acc / L;
        }
    };

    if (nw == 1) {
        run_range(0, trials);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) {
            const long lo = w * chunk;
            const long hi = std::min<long>(trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    double mean = 0.0;
    for (double g : per_trial) mean += g;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double g : per_trial) var += (g - mean) * (g - mean);
    var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;

    CapacityEstimate est;
    est.bits = mean;
    est.std_err = std::sqrt(var / static_cast<double>(trials));
    return est;
}

double capacity_lower_bound(const BoundInput& input) {
    if (input.sigma2 <= 0.0) throw ConfigError("noise variance must be > 0");
    if (input.gamma2 != 0.0)
        throw ConfigError("capacity lower bound is defined for perfect CSI (gamma2 = 0)");
    const ScmAlphabet& a = input.alphabet;
    const int L = a.L();
    const int N = infer_rx_count(input);
    const double t = -1.0 / (2.0 * input.sigma2);

    std::unordered_map<std::string, double> cache;
    double total = 0.0;
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            if (i == j) {
                total += 1.0; // zero difference: MGF is exactly 1
                continue;
            }
            const Eigen::VectorXcd delta =
                a.vectors[static_cast<std::size_t>(i)] - a.vectors[static_cast<std::size_t>(j)];
            const std::string key = delta_key(delta);
            auto it = cache.find(key);
            double val;
            if (it != cache.end()) {
                val = it->second;
            } else {
                val = mgf_gaussian_quadratic(t, input.moments.mu, input.moments.sigma,
                                             quadratic_form_matrix(delta, N));
                cache.emplace(key, val);
            }
            total += val;
        }
    }
    return 2.0 * a.bits_per_symbol() - std::log2(total);
}

double ber_union_bound(const BoundInput& input, const QuadratureRule& quad) {
    if (input.gamma2 != 0.0)
        throw ConfigError("perfect-CSI BER bound requires gamma2 = 0; use the icsi variant");
    return union_bound_impl(input, quad, false);
}

double ber_union_bound_icsi(const BoundInput& input, const QuadratureRule& quad) {
    return union_bound_impl(input, quad, true);
}

RayleighBounds rayleigh_simple_bounds(const ScmAlphabet& alphabet, double sigma2, int N) {
    if (sigma2 <= 0.0) throw ConfigError("noise variance must be > 0");
    if (N < 1) throw ConfigError("receive antenna count must be >= 1");
    const int L = alphabet.L();
    const double log2L = alphabet.bits_per_symbol();
    const double dmin2 = min_delta_norm_sq(alphabet);
    const auto dsum = static_cast<double>(label_distance_sum(alphabet));

    RayleighBounds out;
    out.capacity_lb =
        log2L - std::log2(1.0 + 0.5 * (L - 1) * std::pow(1.0 + dmin2 / (2.0 * sigma2), -N));
    out.ber_ub = (L - 1) * dsum / (2.0 * M_PI * log2L) *
                 std::pow(1.0 + dmin2 / (8.0 * sigma2 * sigma2), -N);
    return out;
}

} // namespace scm
