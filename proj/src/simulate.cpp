#include "scm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "scm/analysis.hpp"
#include "scm/errors.hpp"

namespace scm {

namespace {

// Split [lo, hi) into at most `workers` contiguous chunks and run
// fn(chunk_lo, chunk_hi, slot) on each, in parallel when workers > 1.
// Chunk boundaries depend only on (lo, hi, workers); callers must make each
// trial's work depend only on its own index for determinism.
void run_chunks(long lo, long hi, int workers, const std::function<void(long, long, int)>& fn) {
    const long n = hi - lo;
    if (n <= 0) return;
    const int nw = static_cast<int>(std::min<long>(std::max(workers, 1), n));
    if (nw == 1) {
        fn(lo, hi, 0);
        return;
    }
    const long chunk = (n + nw - 1) / nw;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
        const long a = lo + w * chunk;
        const long b = std::min(hi, a + chunk);
        if (a >= b) break;
        pool.emplace_back(fn, a, b, w);
    }
    for (auto& t : pool) t.join();
}

// Uniform index in [0, L) via 64x64 multiply-high; bias < 2^-57 for L <= 2^7.
int draw_index(StreamRng& rng, int L) {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(rng.next_u64()) * static_cast<unsigned __int128>(L);
    return static_cast<int>(prod >> 64);
}

long next_batch_size(long done, const SweepConfig& cfg) {
    if (done == 0) return std::min(cfg.min_trials, cfg.max_trials);
    const long grown = std::clamp(done, 1024L, 65536L);
    return std::min(grown, cfg.max_trials - done);
}

} // namespace

void SchemeConfig::validate() const {
    if (m < 1) throw ConfigError("scheme: transmit antenna count m must be >= 1");
    switch (scheme) {
        case CodebookScheme::Scm:
            if (k < 1) throw ConfigError("scheme: scm requires spatial bit count k >= 1");
            break;
        case CodebookScheme::Sm:
            if (k > 0 && (1 << k) != m)
                throw ConfigError("scheme: sm carries log2(m) spatial bits; k contradicts m");
            break;
        case CodebookScheme::Gsm:
            if (w < 1 || w > m)
                throw ConfigError("scheme: gsm requires active antenna count w in [1, m]");
            break;
        case CodebookScheme::Table:
            if (table_path.empty()) throw ConfigError("scheme: table requires a codebook file path");
            break;
    }
    if (apm_order < 2) throw ConfigError("scheme: constellation order must be >= 2");
    if (detector == DetectorKind::Suboptimal && t < 1)
        throw ConfigError("scheme: suboptimal detector requires candidate count t >= 1");
    if (detector != DetectorKind::Suboptimal && t != 0)
        throw ConfigError("scheme: candidate count t is only meaningful with detector = suboptimal");
}

ScmAlphabet build_scheme_alphabet(const SchemeConfig& scheme) {
    scheme.validate();
    SpatialCodebook cb;
    switch (scheme.scheme) {
        case CodebookScheme::Scm:
            cb = build_scm_codebook(scheme.m, scheme.k, scheme.variant);
            break;
        case CodebookScheme::Sm:
            cb = build_sm_codebook(scheme.m);
            break;
        case CodebookScheme::Gsm:
            cb = build_gsm_codebook(scheme.m, scheme.w);
            break;
        case CodebookScheme::Table:
            cb = load_codebook_file(scheme.table_path);
            break;
    }
    return scm_alphabet(cb, build_constellation(scheme.apm, scheme.apm_order));
}

DetectorKind detector_kind_from_string(const std::string& name) {
    if (name == "ml") return DetectorKind::Ml;
    if (name == "suboptimal") return DetectorKind::Suboptimal;
    if (name == "echo") return DetectorKind::Echo;
    throw ConfigError("unknown detector '" + name + "' (expected ml or suboptimal)");
}

std::string detector_kind_to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Ml: return "ml";
        case DetectorKind::Suboptimal: return "suboptimal";
        case DetectorKind::Echo: return "echo";
    }
    throw ConfigError("unrepresentable detector kind");
}

void SweepConfig::validate() const {
    scheme.validate();
    channel.validate();
    if (channel.M != scheme.m)
        throw ConfigError("channel antenna count M must match the scheme's m");
    if (snr_db.empty()) throw ConfigError("sweep: snr_db grid must be nonempty");
    for (double s : snr_db)
        if (!std::isfinite(s)) throw ConfigError("sweep: snr_db values must be finite");
    if (min_trials < 1) throw ConfigError("sweep: min_trials must be >= 1");
    if (min_trials > max_trials) throw ConfigError("sweep: min_trials must be <= max_trials");
    if (target_bit_errors < 1) throw ConfigError("sweep: target_bit_errors must be >= 1");
    if (trials < 1) throw ConfigError("sweep: trials must be >= 1");
}

Interval wilson_ci95(long errors, long n) {
    if (n < 0 || errors < 0 || errors > n) throw ConfigError("wilson_ci95: need 0 <= errors <= n");
    if (n == 0) return {0.0, 1.0};
    constexpr double z = 1.959963984540054; // Phi^{-1}(0.975)
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(errors) / nn;
    const double z2n = z * z / nn;
    const double denom = 1.0 + z2n;
    const double center = (p + z2n / 2.0) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2n / (4.0 * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

TrialOutcome run_ber_trial(const ScmAlphabet& a, const ChannelSampler& sampler, double sigma2,
                           DetectorKind detector, int T, StreamRng& rng) {
    const int L = a.L();
    const int tx = draw_index(rng, L);
    const ChannelDraw draw = sampler.draw(rng);
    Eigen::VectorXcd r = draw.H * a.vectors[static_cast<std::size_t>(tx)];
    if (sigma2 > 0.0)
        for (int n = 0; n < r.size(); ++n) r(n) += rng.cscg(sigma2);

    int decided;
    switch (detector) {
        case DetectorKind::Ml:
            decided = ml_detect(r, draw.H_hat, a).index;
            break;
        case DetectorKind::Suboptimal:
            decided = suboptimal_detect(r, draw.H_hat, a, SuboptimalConfig{T}).index;
            break;
        case DetectorKind::Echo:
            decided = tx;
            break;
        default:
            throw ConfigError("unrepresentable detector kind");
    }

    TrialOutcome out;
    out.bits_sent = a.bits_per_symbol();
    out.bit_errors = label_distance(a, tx, decided);
    return out;
}

BerSweepResult run_ber_sweep(const SweepConfig& cfg, int workers) {
    cfg.validate();
    const ScmAlphabet alphabet = build_scheme_alphabet(cfg.scheme);
    const ChannelSampler sampler(cfg.channel);

    BerSweepResult result;
    result.rows.reserve(cfg.snr_db.size());
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double sigma2 = snr_db_to_sigma2(cfg.snr_db[si]);
        long trials_done = 0;
        long bits_sent = 0;
        long bit_errors = 0;
        while (trials_done < cfg.max_trials &&
               (trials_done < cfg.min_trials || bit_errors < cfg.target_bit_errors)) {
            const long batch = next_batch_size(trials_done, cfg);
            const int nw = static_cast<int>(std::min<long>(std::max(workers, 1), batch));
            std::vector<TrialOutcome> slot(static_cast<std::size_t>(nw));
            run_chunks(trials_done, trials_done + batch, nw, [&](long lo, long hi, int w) {
                long b = 0, e = 0;
                for (long trial = lo; trial < hi; ++trial) {
                    StreamRng rng(cfg.seed, static_cast<std::uint64_t>(si),
                                  static_cast<std::uint64_t>(trial));
                    const TrialOutcome o = run_ber_trial(alphabet, sampler, sigma2,
                                                         cfg.scheme.detector, cfg.scheme.t, rng);
                    b += o.bits_sent;
                    e += o.bit_errors;
                }
                slot[static_cast<std::size_t>(w)].bits_sent = b;
                slot[static_cast<std::size_t>(w)].bit_errors = e;
            });
            for (const TrialOutcome& s : slot) {
                bits_sent += s.bits_sent;
                bit_errors += s.bit_errors;
            }
            trials_done += batch;
        }

        BerRow row;
        row.snr_db = cfg.snr_db[si];
        row.trials = trials_done;
        row.bit_errors = bit_errors;
        row.ber = static_cast<double>(bit_errors) / static_cast<double>(bits_sent);
        const Interval ci = wilson_ci95(bit_errors, bits_sent);
        row.ci95_low = ci.low;
        row.ci95_high = ci.high;
        result.rows.push_back(row);
    }
    return result;
}

CapacitySweepResult run_capacity_sweep(const SweepConfig& cfg, int workers) {
    cfg.validate();
    const ScmAlphabet alphabet = build_scheme_alphabet(cfg.scheme);

    CapacitySweepResult result;
    result.rows.reserve(cfg.snr_db.size());
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double sigma2 = snr_db_to_sigma2(cfg.snr_db[si]);
        const CapacityEstimate est = capacity_mc(alphabet, cfg.channel, sigma2, cfg.trials,
                                                 cfg.seed, static_cast<std::uint64_t>(si), workers);
        CapacityRow row;
        row.snr_db = cfg.snr_db[si];
        row.capacity_bits = est.bits;
        row.std_err = est.std_err;
        result.rows.push_back(row);
    }
    return result;
}

ConditionalSerResult run_conditional_ser(const SweepConfig& cfg, int workers) {
    cfg.validate();
    if (cfg.scheme.scheme != CodebookScheme::Sm || cfg.scheme.m != 2 ||
        cfg.scheme.apm != ApmKind::Psk || cfg.scheme.apm_order != 4)
        throw ConfigError("conditional-SER experiment is defined for sm with m = 2 and 4-PSK");
    if (cfg.channel.model != FadingModel::Rayleigh || cfg.channel.rho != 0.0 ||
        cfg.channel.tau != 0.0 || cfg.channel.gamma2 != 0.0)
        throw ConfigError(
            "conditional-SER experiment is defined for uncorrelated Rayleigh with perfect CSI");

    const ScmAlphabet alphabet = build_scheme_alphabet(cfg.scheme);
    const ChannelSampler sampler(cfg.channel);
    const int L = alphabet.L();

    ConditionalSerResult result;
    result.rows.reserve(cfg.snr_db.size());
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) {
        const double sigma2 = snr_db_to_sigma2(cfg.snr_db[si]);
        struct Counts {
            long correct_n = 0, correct_err = 0, wrong_n = 0, wrong_err = 0;
        };
        const int nw = static_cast<int>(std::min<long>(std::max(workers, 1), cfg.trials));
        std::vector<Counts> slot(static_cast<std::size_t>(nw));
        run_chunks(0, cfg.trials, nw, [&](long lo, long hi, int w) {
            Counts c;
            for (long trial = lo; trial < hi; ++trial) {
                StreamRng rng(cfg.seed, static_cast<std::uint64_t>(si),
                              static_cast<std::uint64_t>(trial));
                const int tx = draw_index(rng, L);
                const ChannelDraw draw = sampler.draw(rng);
                Eigen::VectorXcd r = draw.H * alphabet.vectors[static_cast<std::size_t>(tx)];
                for (int n = 0; n < r.size(); ++n) r(n) += rng.cscg(sigma2);
                const Detection det = ml_detect(r, draw.H_hat, alphabet);
                const bool apm_err = alphabet.apm_of(det.index) != alphabet.apm_of(tx);
                if (alphabet.codeword_of(det.index) == alphabet.codeword_of(tx)) {
                    ++c.correct_n;
                    c.correct_err += apm_err;
                } else {
                    ++c.wrong_n;
                    c.wrong_err += apm_err;
                }
            }
            slot[static_cast<std::size_t>(w)] = c;
        });
        Counts total;
        for (const Counts& c : slot) {
            total.correct_n += c.correct_n;
            total.correct_err += c.correct_err;
            total.wrong_n += c.wrong_n;
            total.wrong_err += c.wrong_err;
        }

        ConditionalSerRow row;
        row.snr_db = cfg.snr_db[si];
        row.trials = cfg.trials;
        row.antenna_correct = total.correct_n;
        row.antenna_wrong = total.wrong_n;
        row.ser_given_correct =
            total.correct_n > 0
                ? static_cast<double>(total.correct_err) / static_cast<double>(total.correct_n)
                : std::numeric_limits<double>::quiet_NaN();
        row.ser_given_wrong =
            total.wrong_n > 0
                ? static_cast<double>(total.wrong_err) / static_cast<double>(total.wrong_n)
                : std::numeric_limits<double>::quiet_NaN();
        row.status = (total.correct_n >= 100 && total.wrong_n >= 100) ? "ok" : "insufficient";
        result.rows.push_back(row);
    }
    return result;
}

BoundsSweepResult run_bounds_sweep(const SweepConfig& cfg) {
    cfg.validate();
    BoundInput input;
    input.gamma2 = cfg.channel.gamma2;
    input.moments = channel_moments(cfg.channel);
    input.alphabet = build_scheme_alphabet(cfg.scheme);
    const QuadratureRule quad = gauss_legendre_half_pi(64);

    BoundsSweepResult result;
    result.rows.reserve(cfg.snr_db.size());
    for (double snr : cfg.snr_db) {
        input.sigma2 = snr_db_to_sigma2(snr);
        BoundsRow row;
        row.snr_db = snr;
        if (cfg.channel.gamma2 == 0.0) {
            row.capacity_lb = capacity_lower_bound(input);
            row.ber_ub = ber_union_bound(input, quad);
        } else {
            row.capacity_lb = std::numeric_limits<double>::quiet_NaN();
            row.ber_ub = ber_union_bound_icsi(input, quad);
        }
        result.rows.push_back(row);
    }
    return result;
}

CsvTable to_csv(const BerSweepResult& result) {
    CsvTable t;
    t.header = {"snr_db", "trials", "bit_errors", "ber", "ci95_low", "ci95_high"};
    for (const BerRow& r : result.rows)
        t.rows.push_back({format_double(r.snr_db), format_long(r.trials),
                          format_long(r.bit_errors), format_double(r.ber),
                          format_double(r.ci95_low), format_double(r.ci95_high)});
    return t;
}

CsvTable to_csv(const CapacitySweepResult& result) {
    CsvTable t;
    t.header = {"snr_db", "capacity_bits", "std_err"};
    for (const CapacityRow& r : result.rows)
        t.rows.push_back(
            {format_double(r.snr_db), format_double(r.capacity_bits), format_double(r.std_err)});
    return t;
}

CsvTable to_csv(const ConditionalSerResult& result) {
    CsvTable t;
    t.header = {"snr_db",        "trials",            "antenna_correct", "antenna_wrong",
                "ser_given_correct", "ser_given_wrong", "status"};
    for (const ConditionalSerRow& r : result.rows)
        t.rows.push_back({format_double(r.snr_db), format_long(r.trials),
                          format_long(r.antenna_correct), format_long(r.antenna_wrong),
                          format_double(r.ser_given_correct), format_double(r.ser_given_wrong),
                          r.status});
    return t;
}

CsvTable to_csv(const BoundsSweepResult& result) {
    CsvTable t;
    t.header = {"snr_db", "capacity_lb", "ber_ub"};
    for (const BoundsRow& r : result.rows)
        t.rows.push_back(
            {format_double(r.snr_db), format_double(r.capacity_lb), format_double(r.ber_ub)});
    return t;
}

int resolve_workers(int requested) {
    if (requested >= 1) return requested;
    if (const char* env = std::getenv("SCMSIM_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096)
            throw ConfigError("SCMSIM_WORKERS must be an integer in [1, 4096]");
        return static_cast<int>(v);
    }
    return 1;
}

} // namespace scm
