#include "scm/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scm/errors.hpp"

namespace scm {

namespace {

// Column sum of H_hat over the codeword's active antennas, scaled by
// 1/sqrt(w): the receive-side direction of codeword ci.
Eigen::VectorXcd codeword_direction(const Eigen::MatrixXcd& H_hat, const SpatialCodebook& cb,
                                    int ci, bool normalize_weight) {
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(H_hat.rows());
    const auto& row = cb.codewords[static_cast<std::size_t>(ci)];
    int w = 0;
    for (int m = 0; m < cb.M; ++m)
        if (row[static_cast<std::size_t>(m)]) {
            t += H_hat.col(m);
            ++w;
        }
    if (normalize_weight) t /= std::sqrt(static_cast<double>(w));
    return t;
}

Detection make_detection(const ScmAlphabet& a, int index) {
    Detection d;
    d.index = index;
    d.codeword_label = a.codebook.labels[static_cast<std::size_t>(a.codeword_of(index))];
    d.apm_label = a.constellation.labels[static_cast<std::size_t>(a.apm_of(index))];
    return d;
}

// Minimum of ||r - t_c s||^2 over the given codewords (ascending index order)
// and all constellation points, via the expanded metric
// |s|^2 ||t_c||^2 - 2 Re(s g_c) with g_c = r^H t_c; the ||r||^2 term is common.
int best_symbol(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat, const ScmAlphabet& a,
                const std::vector<int>& codeword_indices) {
    const int ns = a.constellation.order;
    int best = -1;
    double best_metric = std::numeric_limits<double>::infinity();
    for (int ci : codeword_indices) {
        const Eigen::VectorXcd t = codeword_direction(H_hat, a.codebook, ci, true);
        const double tn = t.squaredNorm();
        const std::complex<double> g = r.dot(t); // = r^H t (Eigen conjugates the left side)
        for (int si = 0; si < ns; ++si) {
            const std::complex<double> s = a.constellation.points[static_cast<std::size_t>(si)];
            const double metric = std::norm(s) * tn - 2.0 * (s * g).real();
            if (metric < best_metric) {
                best_metric = metric;
                best = ci * ns + si;
            }
        }
    }
    return best;
}

} // namespace

Detection ml_detect(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                    const ScmAlphabet& a) {
    std::vector<int> all(static_cast<std::size_t>(a.codebook.size()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return make_detection(a, best_symbol(r, H_hat, a, all));
}

std::vector<int> candidate_set(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                               const SpatialCodebook& cb, int T) {
    const int nc = cb.size();
    if (T < 1 || T > nc)
        throw ConfigError("candidate-set cardinality must lie in [1, " + std::to_string(nc) +
                          "], got " + std::to_string(T));

    const double rn = r.norm();
    std::vector<int> indices(static_cast<std::size_t>(nc));
    for (int i = 0; i < nc; ++i) indices[static_cast<std::size_t>(i)] = i;
    if (rn == 0.0) {
        indices.resize(static_cast<std::size_t>(T));
        return indices;
    }

    std::vector<double> angle(static_cast<std::size_t>(nc));
    for (int ci = 0; ci < nc; ++ci) {
        const Eigen::VectorXcd t = codeword_direction(H_hat, cb, ci, false);
        const double tn = t.norm();
        if (tn == 0.0) {
            angle[static_cast<std::size_t>(ci)] = M_PI / 2.0;
            continue;
        }
        const double cosine = std::min(1.0, std::abs(t.dot(r)) / (tn * rn));
        angle[static_cast<std::size_t>(ci)] = std::acos(cosine);
    }
    std::stable_sort(indices.begin(), indices.end(), [&](int lhs, int rhs) {
        return angle[static_cast<std::size_t>(lhs)] < angle[static_cast<std::size_t>(rhs)];
    });
    indices.resize(static_cast<std::size_t>(T));
    return indices;
}

Detection suboptimal_detect(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                            const ScmAlphabet& a, const SuboptimalConfig& cfg) {
    std::vector<int> candidates = candidate_set(r, H_hat, a.codebook, cfg.T);
    // Metric ties resolve to the lowest alphabet index, matching ml_detect.
    std::sort(candidates.begin(), candidates.end());
    return make_detection(a, best_symbol(r, H_hat, a, candidates));
}

} // namespace scm
