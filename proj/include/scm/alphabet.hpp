#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "scm/codebook.hpp"
#include "scm/constellation.hpp"

namespace scm {

// Composite transmit alphabet: index (ci, si) -> x = c * s / sqrt(w(c)),
// laid out as index = ci * |S| + si with label = spatial bits ++ APM bits.
struct ScmAlphabet {
    SpatialCodebook codebook;
    Constellation constellation;
    std::vector<Eigen::VectorXcd> vectors;
    std::vector<std::string> labels;
    std::vector<std::uint32_t> label_words; // labels as integers, MSB-first
    std::vector<int> index_of_label;        // label integer -> alphabet index

    int L() const { return static_cast<int>(vectors.size()); }
    int M() const { return codebook.M; }
    int spatial_bits() const { return codebook.k; }
    int apm_bits() const { return constellation.bits(); }
    int bits_per_symbol() const { return spatial_bits() + apm_bits(); }
    int codeword_of(int index) const { return index / constellation.order; }
    int apm_of(int index) const { return index % constellation.order; }
};

ScmAlphabet scm_alphabet(const SpatialCodebook& cb, const Constellation& cons);

// Hamming distance between the bit labels of x_i and x_j.
int label_distance(const ScmAlphabet& a, int i, int j);

// Sum of label distances over all ordered pairs.
long long label_distance_sum(const ScmAlphabet& a);

// min over i != j of ||x_i - x_j||^2.
double min_delta_norm_sq(const ScmAlphabet& a);

} // namespace scm
