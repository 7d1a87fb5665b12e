#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace scm {

enum class CodebookScheme { Scm, Sm, Gsm, Table };

// SCM(4,1) exists in two published variants; other sizes have one construction.
enum class ScmVariant { Auto, D3, D4 };

// Antenna activation patterns: 2^k distinct nonzero length-M binary codewords
// with k-bit labels. Bit 0 of a codeword string is antenna 1.
struct SpatialCodebook {
    CodebookScheme scheme = CodebookScheme::Table;
    int M = 0;
    int k = 0;
    std::vector<std::vector<std::uint8_t>> codewords;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(codewords.size()); }
    int weight(int row) const;
    std::string codeword_string(int row) const;
};

// One codeword per antenna (M a power of two), label = binary antenna index.
SpatialCodebook build_sm_codebook(int M);

// Constant-weight-W patterns. k = floor(log2 C(M,W)), patterns taken in
// colexicographic order, except published configurations: (3,2) uses the
// published rows {110, 011}; (4,2) uses the complementary pair {1100, 0011}
// (k = 1), the only choice with min distance 4.
SpatialCodebook build_gsm_codebook(int M, int W);

// Error-control-code patterns. Supported sizes: (7,4), (7,3), (8,4), (9,4)
// and the published small tables (4,1) [variant required] and (3,1).
SpatialCodebook build_scm_codebook(int M, int k, ScmVariant variant = ScmVariant::Auto);

// Codebook exactly as given; rows are (label bits, codeword bits).
SpatialCodebook build_table_codebook(const std::vector<std::pair<std::string, std::string>>& rows);

// Fixture format: one "<label_bits> <codeword_bits>" row per line, '#' comments.
SpatialCodebook load_codebook_file(const std::string& path);

int min_hamming_distance(const SpatialCodebook& cb);

ScmVariant scm_variant_from_string(const std::string& name);

} // namespace scm
