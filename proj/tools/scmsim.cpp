#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scm/codebook.hpp"
#include "scm/config.hpp"
#include "scm/csv.hpp"
#include "scm/errors.hpp"
#include "scm/simulate.hpp"
#include "scm/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out;
    long long seed = -1; // >= 0 overrides the config seed
    int workers = 0;     // 0 -> SCMSIM_WORKERS env or 1
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
    cmd->add_option("--config", args.config_path, "Experiment recipe file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", args.sets, "Override a config value (section.key=value)");
    cmd->add_option("--out", args.out, "Output CSV path (JSON sidecar lands next to it)");
    cmd->add_option("--seed", args.seed, "Override sweep.seed")->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", args.workers, "Worker threads (default: SCMSIM_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
}

scm::ExperimentConfig load_experiment(const RunArgs& args) {
    scm::RawConfig raw = scm::load_raw_config(args.config_path);
    for (const std::string& s : args.sets) scm::apply_override(raw, s);
    scm::ExperimentConfig cfg = scm::resolve_config(raw);
    if (args.seed >= 0) cfg.sweep.seed = static_cast<std::uint64_t>(args.seed);
    return cfg;
}

std::string output_path(const RunArgs& args, const scm::ExperimentConfig& cfg,
                        const std::string& command) {
    if (!args.out.empty()) return args.out;
    if (!cfg.output_path.empty()) return cfg.output_path;
    return command + ".csv";
}

// CSV first, then the sidecar; a failed sidecar removes the CSV so failures
// never leave partial artifact pairs behind.
void emit(const std::string& csv_path, const scm::CsvTable& table, const std::string& sidecar) {
    scm::write_text_file(csv_path, scm::csv_to_string(table));
    try {
        scm::write_text_file(csv_path + ".json", sidecar);
    } catch (...) {
        std::remove(csv_path.c_str());
        throw;
    }
}

scm::CsvTable compute(const std::string& command, const scm::ExperimentConfig& cfg, int workers) {
    if (command == "ber") return scm::to_csv(scm::run_ber_sweep(cfg.sweep, workers));
    if (command == "capacity") return scm::to_csv(scm::run_capacity_sweep(cfg.sweep, workers));
    if (command == "bounds") return scm::to_csv(scm::run_bounds_sweep(cfg.sweep));
    if (command == "conditional-ser")
        return scm::to_csv(scm::run_conditional_ser(cfg.sweep, workers));
    throw scm::ConfigError("unknown command '" + command + "' in sidecar");
}

void run_command(const std::string& command, const RunArgs& args) {
    const scm::ExperimentConfig cfg = load_experiment(args);
    const int workers = scm::resolve_workers(args.workers);
    scm::ExperimentConfig recorded = cfg;
    recorded.output_path = output_path(args, cfg, command);
    const scm::CsvTable table = compute(command, cfg, workers);
    emit(recorded.output_path, table, scm::sidecar_json(recorded, command, workers));
    std::cout << recorded.output_path << "\n";
}

void run_replay(const std::string& sidecar_path, const std::string& out_flag, int workers_flag) {
    const scm::ReplaySpec spec = scm::parse_sidecar(scm::read_text_file(sidecar_path));
    const int workers = workers_flag >= 1 ? workers_flag : spec.workers;
    std::string out = !out_flag.empty() ? out_flag : spec.config.output_path;
    if (out.empty()) out = spec.command + ".csv";
    scm::ExperimentConfig recorded = spec.config;
    recorded.output_path = out;
    const scm::CsvTable table = compute(spec.command, spec.config, workers);
    emit(out, table, scm::sidecar_json(recorded, spec.command, workers));
    std::cout << out << "\n";
}

void print_codebook(const scm::SpatialCodebook& cb) {
    std::cout << "# columns: label codeword weight\n";
    for (int row = 0; row < cb.size(); ++row)
        std::cout << cb.labels[static_cast<std::size_t>(row)] << " " << cb.codeword_string(row)
                  << " " << cb.weight(row) << "\n";
    std::cout << "# min_hamming_distance " << scm::min_hamming_distance(cb) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(scm::kToolName) + " " + scm::kVersion +
                 " — spatial coded modulation link simulator"};
    app.require_subcommand(1);

    // codebook
    auto* cb_cmd = app.add_subcommand("codebook", "Print a spatial codebook and its distance");
    std::string cb_scheme;
    int cb_m = 0, cb_k = 0, cb_w = 0;
    std::string cb_variant = "auto", cb_table;
    cb_cmd->add_option("--scheme", cb_scheme, "scm | sm | gsm | table")->required();
    cb_cmd->add_option("--m", cb_m, "Transmit antennas");
    cb_cmd->add_option("--k", cb_k, "Spatial bits (scm)");
    cb_cmd->add_option("--w", cb_w, "Active antennas (gsm)");
    cb_cmd->add_option("--variant", cb_variant, "scm(4,1) table selector: d3 | d4");
    cb_cmd->add_option("--table", cb_table, "Codebook file (scheme = table)");

    // sweep commands
    RunArgs ber_args, cap_args, bounds_args, cond_args;
    auto* ber_cmd = app.add_subcommand("ber", "Monte Carlo BER sweep");
    add_run_options(ber_cmd, ber_args);
    auto* cap_cmd = app.add_subcommand("capacity", "Monte Carlo capacity sweep");
    add_run_options(cap_cmd, cap_args);
    auto* bounds_cmd = app.add_subcommand("bounds", "Analytical capacity/BER bounds");
    add_run_options(bounds_cmd, bounds_args);
    auto* cond_cmd =
        app.add_subcommand("conditional-ser", "SER conditioned on antenna-index detection");
    add_run_options(cond_cmd, cond_args);

    // replay
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a JSON sidecar");
    std::string replay_sidecar, replay_out;
    int replay_workers = 0;
    replay_cmd->add_option("sidecar", replay_sidecar, "Sidecar JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--out", replay_out, "Output CSV path");
    replay_cmd->add_option("--workers", replay_workers, "Worker threads")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cb_cmd->parsed()) {
            scm::SchemeConfig scheme;
            scheme.scheme = scm::codebook_scheme_from_string(cb_scheme);
            scheme.m = cb_m;
            scheme.k = cb_k;
            scheme.w = cb_w;
            scheme.variant = scm::scm_variant_from_string(cb_variant);
            scheme.table_path = cb_table;
            switch (scheme.scheme) {
                case scm::CodebookScheme::Scm:
                    print_codebook(scm::build_scm_codebook(scheme.m, scheme.k, scheme.variant));
                    break;
                case scm::CodebookScheme::Sm:
                    print_codebook(scm::build_sm_codebook(scheme.m));
                    break;
                case scm::CodebookScheme::Gsm:
                    print_codebook(scm::build_gsm_codebook(scheme.m, scheme.w));
                    break;
                case scm::CodebookScheme::Table:
                    if (scheme.table_path.empty())
                        throw scm::ConfigError("--table is required for scheme = table");
                    print_codebook(scm::load_codebook_file(scheme.table_path));
                    break;
            }
        } else if (ber_cmd->parsed()) {
            run_command("ber", ber_args);
        } else if (cap_cmd->parsed()) {
            run_command("capacity", cap_args);
        } else if (bounds_cmd->parsed()) {
            run_command("bounds", bounds_args);
        } else if (cond_cmd->parsed()) {
            run_command("conditional-ser", cond_args);
        } else if (replay_cmd->parsed()) {
            run_replay(replay_sidecar, replay_out, replay_workers);
        }
    } catch (const scm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
