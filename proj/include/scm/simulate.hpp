#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scm/alphabet.hpp"
#include "scm/channel.hpp"
#include "scm/csv.hpp"
#include "scm/detect.hpp"

namespace scm {

enum class DetectorKind {
    Ml,         // joint minimum-distance search over the full alphabet
    Suboptimal, // candidate-set detector with cardinality T
    Echo,       // test stub: "detects" the transmitted index (plumbing check)
};

// Transmission-side description: which spatial codebook, which constellation,
// and which detector the receiver runs.
struct SchemeConfig {
    CodebookScheme scheme = CodebookScheme::Scm;
    int m = 0;                             // transmit antennas
    int k = 0;                             // spatial bits (scm; informational for sm)
    int w = 0;                             // active antennas (gsm only)
    ScmVariant variant = ScmVariant::Auto; // scm(4,1) table selector
    std::string table_path;                // scheme = table only
    ApmKind apm = ApmKind::Psk;
    int apm_order = 0;
    DetectorKind detector = DetectorKind::Ml;
    int t = 0; // candidate-set size, suboptimal only

    void validate() const; // throws ConfigError on structural problems
};

// Build the transmit alphabet the config describes (codebook + constellation).
ScmAlphabet build_scheme_alphabet(const SchemeConfig& scheme);

DetectorKind detector_kind_from_string(const std::string& name);
std::string detector_kind_to_string(DetectorKind kind);

struct SweepConfig {
    SchemeConfig scheme;
    ChannelSpec channel;
    std::vector<double> snr_db;   // grid, nonempty
    long min_trials = 1000;       // BER: trials always run per point
    long max_trials = 100000000;  // BER: hard cap per point
    long target_bit_errors = 200; // BER: stop once reached (after min_trials)
    long trials = 2000;           // capacity / conditional-SER: fixed count
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError
};

struct BerRow {
    double snr_db = 0.0;
    long trials = 0;
    long bit_errors = 0;
    double ber = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

struct CapacityRow {
    double snr_db = 0.0;
    double capacity_bits = 0.0;
    double std_err = 0.0;
};

struct ConditionalSerRow {
    double snr_db = 0.0;
    long trials = 0;
    long antenna_correct = 0;         // trials with the antenna index decided correctly
    long antenna_wrong = 0;           // trials with it decided wrongly
    double ser_given_correct = 0.0;   // APM symbol error rate within each partition
    double ser_given_wrong = 0.0;
    std::string status;               // "ok" or "insufficient" (< 100 samples in a partition)
};

struct BoundsRow {
    double snr_db = 0.0;
    double capacity_lb = 0.0; // NaN under imperfect CSI (bound defined for gamma2 = 0)
    double ber_ub = 0.0;      // icsi variant when gamma2 > 0
};

struct BerSweepResult {
    std::vector<BerRow> rows;
};
struct CapacitySweepResult {
    std::vector<CapacityRow> rows;
};
struct ConditionalSerResult {
    std::vector<ConditionalSerRow> rows;
};
struct BoundsSweepResult {
    std::vector<BoundsRow> rows;
};

// 95% Wilson score interval for e errors out of n Bernoulli draws.
struct Interval {
    double low = 0.0;
    double high = 0.0;
};
Interval wilson_ci95(long errors, long n);

double snr_db_to_sigma2(double snr_db);

// One end-to-end trial: draw uniform label bits, transmit x over a fresh
// channel draw with CSCG noise of variance sigma2, detect against H_hat, and
// count label-bit disagreements. Returns (bits_sent, bit_errors).
struct TrialOutcome {
    long bits_sent = 0;
    long bit_errors = 0;
};
TrialOutcome run_ber_trial(const ScmAlphabet& a, const ChannelSampler& sampler, double sigma2,
                           DetectorKind detector, int T, StreamRng& rng);

// Per-SNR-point Monte Carlo until target_bit_errors or max_trials (always at
// least min_trials). Per-trial RNG streams are indexed by
// (seed, snr_index, trial_index), so the outcome is byte-identical for any
// worker count.
BerSweepResult run_ber_sweep(const SweepConfig& cfg, int workers = 1);

// capacity_mc at each grid point with cfg.trials trials; stream (seed, snr_index, trial).
CapacitySweepResult run_capacity_sweep(const SweepConfig& cfg, int workers = 1);

// The 2xN SM + QPSK experiment: APM symbol error rate conditioned on the
// antenna index being detected correctly vs wrongly, over an i.i.d. Rayleigh
// channel with ML detection and perfect CSI. cfg.scheme is ignored except for
// validation that it requests sm with m = 2 and a 4-point PSK.
ConditionalSerResult run_conditional_ser(const SweepConfig& cfg, int workers = 1);

// Analytical bounds over the SNR grid: exact-MGF capacity lower bound
// (gamma2 = 0 only; NaN otherwise) and the BER upper bound (icsi variant when
// gamma2 > 0), 64-node quadrature with an internal convergence check.
BoundsSweepResult run_bounds_sweep(const SweepConfig& cfg);

// Fixed column sets, doubles as %.17g (see README for the contract).
CsvTable to_csv(const BerSweepResult& result);
CsvTable to_csv(const CapacitySweepResult& result);
CsvTable to_csv(const ConditionalSerResult& result);
CsvTable to_csv(const BoundsSweepResult& result);

// Worker-count resolution used by the CLI: explicit argument wins, otherwise
// the SCMSIM_WORKERS environment variable, otherwise 1.
int resolve_workers(int requested);

} // namespace scm
