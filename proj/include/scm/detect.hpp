#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "scm/alphabet.hpp"

namespace scm {

struct Detection {
    int index = 0;              // alphabet index of the decided symbol
    std::string codeword_label; // k bits
    std::string apm_label;      // log|S| bits
};

struct SuboptimalConfig {
    int T = 1; // candidate-set cardinality, 1 <= T <= 2^k
};

// Joint minimum-distance decision over all L symbols; ties go to the lowest
// alphabet index. Uses the expanded per-codeword form (||t||^2 and one inner
// product per codeword) which is decision-equivalent to the direct norm.
Detection ml_detect(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                    const ScmAlphabet& a);

// Indices of the T codewords whose directions t_c = H_hat*c make the smallest
// angle with r, ascending by angle, ties to the lower codeword index.
// r = 0 falls back to the first T indices; t_c = 0 counts as angle pi/2.
std::vector<int> candidate_set(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                               const SpatialCodebook& cb, int T);

// Joint decision restricted to the candidate codewords; identical to
// ml_detect whenever T = 2^k.
Detection suboptimal_detect(const Eigen::VectorXcd& r, const Eigen::MatrixXcd& H_hat,
                            const ScmAlphabet& a, const SuboptimalConfig& cfg);

} // namespace scm
