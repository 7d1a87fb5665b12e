#include "scm/codebook.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>

#include "scm/errors.hpp"

namespace scm {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Codeword strings read antenna 1 first; as integers we use char 0 = MSB.
std::vector<std::uint8_t> word_to_row(std::uint64_t w, int M) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(M), 0);
    for (int i = 0; i < M; ++i)
        row[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((w >> (M - 1 - i)) & 1u);
    return row;
}

std::uint64_t row_to_word(const std::vector<std::uint8_t>& row) {
    std::uint64_t w = 0;
    for (std::uint8_t b : row) w = (w << 1) | b;
    return w;
}

std::string label_string(unsigned value, int width) {
    std::string s(static_cast<std::size_t>(width), '0');
    for (int i = 0; i < width; ++i)
        if (value & (1u << (width - 1 - i))) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

void validate_codebook(const SpatialCodebook& cb, const std::string& context) {
    const std::size_t expected = std::size_t{1} << cb.k;
    if (cb.codewords.size() != expected || cb.labels.size() != expected)
        throw ConfigError(context + ": expected " + std::to_string(expected) + " rows, got " +
                          std::to_string(cb.codewords.size()));
    std::set<std::vector<std::uint8_t>> seen_words;
    std::set<std::string> seen_labels;
    for (std::size_t r = 0; r < cb.codewords.size(); ++r) {
        const auto& cw = cb.codewords[r];
        const auto& lb = cb.labels[r];
        const std::string where = context + ": row " + std::to_string(r);
        if (static_cast<int>(cw.size()) != cb.M)
            throw ConfigError(where + ": codeword length != " + std::to_string(cb.M));
        if (static_cast<int>(lb.size()) != cb.k)
            throw ConfigError(where + ": label length != " + std::to_string(cb.k));
        for (char c : lb)
            if (c != '0' && c != '1') throw ConfigError(where + ": label has non-binary character");
        bool any = false;
        for (std::uint8_t b : cw) {
            if (b > 1) throw ConfigError(where + ": codeword has non-binary entry");
            any = any || (b == 1);
        }
        if (!any) throw ConfigError(where + ": all-zero codeword is not allowed");
        if (!seen_words.insert(cw).second) throw ConfigError(where + ": duplicate codeword");
        if (!seen_labels.insert(lb).second) throw ConfigError(where + ": duplicate label");
    }
}

SpatialCodebook from_words(CodebookScheme scheme, int M, int k,
                           const std::vector<std::uint64_t>& words, const std::string& context) {
    SpatialCodebook cb;
    cb.scheme = scheme;
    cb.M = M;
    cb.k = k;
    cb.codewords.reserve(words.size());
    cb.labels.reserve(words.size());
    for (std::size_t r = 0; r < words.size(); ++r) {
        cb.codewords.push_back(word_to_row(words[r], M));
        cb.labels.push_back(label_string(static_cast<unsigned>(r), k));
    }
    validate_codebook(cb, context);
    return cb;
}

// Published (7,4) bit-to-antenna mapping, label order; a coset of a (7,4)
// Hamming code (translate every word by 0000001 to recover the linear code).
constexpr std::uint64_t kScm74Words[16] = {
    0b0000001, 0b0000110, 0b0011000, 0b0011111, 0b0101011, 0b0101100, 0b0110010, 0b0110101,
    0b1001010, 0b1001101, 0b1010011, 0b1010100, 0b1100000, 0b1100111, 0b1111001, 0b1111110,
};

// Published (7,3) bit-to-antenna mapping, label order; a coset of a distance-4
// code whose nonzero words all have weight 4.
constexpr std::uint64_t kScm73Words[8] = {
    0b0000001, 0b0001110, 0b0110010, 0b0111101, 0b1010100, 0b1011011, 0b1100111, 0b1101000,
};

// Smallest vector outside the code; translating by it removes the zero word
// while keeping every pairwise distance (and hence the minimum distance).
std::uint64_t coset_offset(const std::vector<std::uint64_t>& code, int M) {
    const std::set<std::uint64_t> in(code.begin(), code.end());
    for (std::uint64_t v = 1; v < (std::uint64_t{1} << M); ++v)
        if (!in.count(v)) return v;
    throw ConfigError("code covers the whole space; no coset offset exists");
}

std::vector<std::uint64_t> translate(std::vector<std::uint64_t> code, std::uint64_t t) {
    for (auto& w : code) w ^= t;
    return code;
}

std::uint64_t binomial_clamped(int n, int w) {
    // Clamps at 2^62 to keep floor(log2) exact; codebooks never get that large.
    const std::uint64_t cap = std::uint64_t{1} << 62;
    std::uint64_t c = 1;
    for (int i = 1; i <= w; ++i) {
        c = c * static_cast<std::uint64_t>(n - w + i);
        c /= static_cast<std::uint64_t>(i);
        if (c >= cap) return cap;
    }
    return c;
}

} // namespace

int SpatialCodebook::weight(int row) const {
    int w = 0;
    for (std::uint8_t b : codewords[static_cast<std::size_t>(row)]) w += b;
    return w;
}

std::string SpatialCodebook::codeword_string(int row) const {
    std::string s;
    s.reserve(static_cast<std::size_t>(M));
    for (std::uint8_t b : codewords[static_cast<std::size_t>(row)]) s.push_back(b ? '1' : '0');
    return s;
}

SpatialCodebook build_sm_codebook(int M) {
    if (!is_power_of_two(M) || M < 2)
        throw ConfigError("SM needs a power-of-two antenna count >= 2, got " + std::to_string(M));
    int k = 0;
    while ((1 << k) < M) ++k;
    std::vector<std::uint64_t> words;
    words.reserve(static_cast<std::size_t>(M));
    for (int l = 0; l < M; ++l) words.push_back(std::uint64_t{1} << (M - 1 - l));
    auto cb = from_words(CodebookScheme::Sm, M, k, words, "sm codebook");
    return cb;
}

SpatialCodebook build_gsm_codebook(int M, int W) {
    if (W < 1 || W >= M)
        throw ConfigError("GSM needs 1 <= W < M, got W=" + std::to_string(W) +
                          ", M=" + std::to_string(M));
    if (M > 62) throw ConfigError("GSM antenna count capped at 62, got " + std::to_string(M));

    if (M == 3 && W == 2) {
        // Published rows (the general rule below would pick {110, 101}).
        return from_words(CodebookScheme::Gsm, 3, 1, {0b110, 0b011}, "gsm codebook");
    }
    if (M == 4 && W == 2) {
        // Only a complementary pair reaches min distance 4; any third
        // weight-2 pattern would sit at distance 2 from one of them.
        return from_words(CodebookScheme::Gsm, 4, 1, {0b1100, 0b0011}, "gsm codebook");
    }

    const std::uint64_t combos = binomial_clamped(M, W);
    if (combos < 2) throw ConfigError("GSM needs at least 2 activation patterns");
    int k = 0;
    while ((std::uint64_t{2} << k) <= combos) ++k;
    if (k > 16) throw ConfigError("GSM codebook too large (k > 16)");

    // Colexicographic pattern order == ascending bitmask order at fixed weight
    // (Gosper's hack), with mask bit i meaning antenna i+1 active.
    std::vector<std::uint64_t> words;
    words.reserve(std::size_t{1} << k);
    std::uint64_t mask = (std::uint64_t{1} << W) - 1;
    while (words.size() < (std::size_t{1} << k)) {
        // Convert LSB-first mask to the MSB-first word convention.
        std::uint64_t w = 0;
        for (int i = 0; i < M; ++i)
            if ((mask >> i) & 1u) w |= std::uint64_t{1} << (M - 1 - i);
        words.push_back(w);
        const std::uint64_t c = mask & (~mask + 1);
        const std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    return from_words(CodebookScheme::Gsm, M, k, words, "gsm codebook");
}

SpatialCodebook build_scm_codebook(int M, int k, ScmVariant variant) {
    if (variant != ScmVariant::Auto && !(M == 4 && k == 1))
        throw ConfigError("codebook variant applies only to the (4,1) tables");

    if (M == 3 && k == 1)
        return from_words(CodebookScheme::Scm, 3, 1, {0b001, 0b110}, "scm codebook");

    if (M == 4 && k == 1) {
        if (variant == ScmVariant::D3)
            return from_words(CodebookScheme::Scm, 4, 1, {0b0011, 0b1000}, "scm codebook");
        if (variant == ScmVariant::D4)
            return from_words(CodebookScheme::Scm, 4, 1, {0b0001, 0b1110}, "scm codebook");
        throw ConfigError("SCM(4,1) is published in two variants; pass variant d3 or d4");
    }

    if (M == 7 && k == 4)
        return from_words(CodebookScheme::Scm, 7, 4,
                          {std::begin(kScm74Words), std::end(kScm74Words)}, "scm codebook");

    if (M == 7 && k == 3)
        return from_words(CodebookScheme::Scm, 7, 3,
                          {std::begin(kScm73Words), std::end(kScm73Words)}, "scm codebook");

    if (M == 8 && k == 4) {
        // Extend the (7,4) code underlying the published mapping by an overall
        // parity bit (distance 4), then translate to remove the zero word.
        std::vector<std::uint64_t> code;
        for (std::uint64_t w : kScm74Words) {
            const std::uint64_t lin = w ^ 0b0000001; // back to the linear code
            code.push_back((lin << 1) | (std::popcount(lin) & 1u));
        }
        return from_words(CodebookScheme::Scm, 8, 4, translate(code, coset_offset(code, 8)),
                          "scm codebook");
    }

    if (M == 9 && k == 4) {
        // Greedy distance-4 packing over ascending 9-bit words; reaches 16
        // words, which is optimal (no 16-word length-9 code has distance 5).
        std::vector<std::uint64_t> kept;
        for (std::uint64_t v = 1; v < 512 && kept.size() < 16; ++v) {
            bool ok = true;
            for (std::uint64_t w : kept)
                if (std::popcount(v ^ w) < 4) {
                    ok = false;
                    break;
                }
            if (ok) kept.push_back(v);
        }
        if (kept.size() != 16) throw NumericalError("greedy (9,4) search failed to reach 16 words");
        return from_words(CodebookScheme::Scm, 9, 4, kept, "scm codebook");
    }

    throw ConfigError("unsupported SCM size (" + std::to_string(M) + "," + std::to_string(k) +
                      "); supported: (3,1), (4,1) d3/d4, (7,3), (7,4), (8,4), (9,4)");
}

SpatialCodebook build_table_codebook(
    const std::vector<std::pair<std::string, std::string>>& rows) {
    if (rows.empty()) throw ConfigError("table codebook: no rows given");
    SpatialCodebook cb;
    cb.scheme = CodebookScheme::Table;
    cb.M = static_cast<int>(rows.front().second.size());
    cb.k = static_cast<int>(rows.front().first.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& [label, word] = rows[r];
        std::vector<std::uint8_t> cw;
        cw.reserve(word.size());
        for (char ch : word) {
            if (ch != '0' && ch != '1')
                throw ConfigError("table codebook: row " + std::to_string(r) +
                                  ": codeword has non-binary character");
            cw.push_back(static_cast<std::uint8_t>(ch - '0'));
        }
        cb.codewords.push_back(std::move(cw));
        cb.labels.push_back(label);
    }
    validate_codebook(cb, "table codebook");
    return cb;
}

SpatialCodebook load_codebook_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open codebook file: " + path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string label, word, extra;
        if (!(ls >> label)) continue; // blank line
        if (!(ls >> word) || (ls >> extra))
            throw ConfigError(path + ": expected '<label_bits> <codeword_bits>' per row, got: " +
                              line);
        rows.emplace_back(label, word);
    }
    return build_table_codebook(rows);
}

int min_hamming_distance(const SpatialCodebook& cb) {
    if (cb.size() < 2)
        throw ConfigError("minimum distance undefined for a codebook with fewer than 2 codewords");
    std::vector<std::uint64_t> words;
    words.reserve(cb.codewords.size());
    for (const auto& row : cb.codewords) words.push_back(row_to_word(row));
    int best = cb.M + 1;
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t j = i + 1; j < words.size(); ++j)
            best = std::min(best, std::popcount(words[i] ^ words[j]));
    return best;
}

ScmVariant scm_variant_from_string(const std::string& name) {
    if (name.empty() || name == "auto") return ScmVariant::Auto;
    if (name == "d3") return ScmVariant::D3;
    if (name == "d4") return ScmVariant::D4;
    throw ConfigError("unknown codebook variant '" + name + "' (expected d3, d4, or auto)");
}

} // namespace scm
