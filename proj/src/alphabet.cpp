#include "scm/alphabet.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "scm/errors.hpp"

namespace scm {

ScmAlphabet scm_alphabet(const SpatialCodebook& cb, const Constellation& cons) {
    ScmAlphabet a;
    a.codebook = cb;
    a.constellation = cons;
    const int nc = cb.size();
    const int ns = cons.order;
    const int L = nc * ns;
    const int bits = cb.k + cons.bits();
    if (bits > 31) throw ConfigError("alphabet too large: more than 31 bits per symbol");

    a.vectors.reserve(static_cast<std::size_t>(L));
    a.labels.reserve(static_cast<std::size_t>(L));
    a.label_words.reserve(static_cast<std::size_t>(L));
    a.index_of_label.assign(static_cast<std::size_t>(L), -1);

    for (int ci = 0; ci < nc; ++ci) {
        const auto& row = cb.codewords[static_cast<std::size_t>(ci)];
        const double inv_sqrt_w = 1.0 / std::sqrt(static_cast<double>(cb.weight(ci)));
        for (int si = 0; si < ns; ++si) {
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(cb.M);
            const std::complex<double> s =
                cons.points[static_cast<std::size_t>(si)] * inv_sqrt_w;
            for (int m = 0; m < cb.M; ++m)
                if (row[static_cast<std::size_t>(m)]) x(m) = s;
            a.vectors.push_back(std::move(x));

            const std::string label =
                cb.labels[static_cast<std::size_t>(ci)] + cons.labels[static_cast<std::size_t>(si)];
            std::uint32_t word = 0;
            for (char ch : label) word = (word << 1) | static_cast<std::uint32_t>(ch == '1');
            a.labels.push_back(label);
            a.label_words.push_back(word);
            a.index_of_label[word] = ci * ns + si;
        }
    }
    return a;
}

int label_distance(const ScmAlphabet& a, int i, int j) {
    return std::popcount(a.label_words[static_cast<std::size_t>(i)] ^
                         a.label_words[static_cast<std::size_t>(j)]);
}

long long label_distance_sum(const ScmAlphabet& a) {
    const int L = a.L();
    long long sum = 0;
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) sum += 2LL * label_distance(a, i, j);
    return sum;
}

double min_delta_norm_sq(const ScmAlphabet& a) {
    const int L = a.L();
    if (L < 2) throw ConfigError("minimum pair distance undefined for alphabet of size < 2");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            const double d = (a.vectors[static_cast<std::size_t>(i)] -
                              a.vectors[static_cast<std::size_t>(j)])
                                 .squaredNorm();
            if (d < best) best = d;
        }
    return best;
}

} // namespace scm
