#pragma once

#include <map>
#include <string>

#include "scm/simulate.hpp"

namespace scm {

// Full experiment description: one sweep (scheme + channel + grid + trial
// budget + seed) plus an optional default output path.
struct ExperimentConfig {
    SweepConfig sweep;
    std::string output_path;
};

// Recipe files are a flat TOML subset: [section] headers; key = value lines;
// values are integers, floats, "quoted strings", or [numeric, arrays];
// # starts a comment. Sections: [scheme], [channel], [sweep], [output].
// Unknown sections/keys and duplicated keys are errors.
struct RawConfig {
    // section -> key -> raw value token (still unparsed)
    std::map<std::string, std::map<std::string, std::string>> values;
    std::string origin; // file name for error messages
};

RawConfig parse_config_text(const std::string& text, const std::string& origin);
RawConfig load_raw_config(const std::string& path);

// Apply one "section.key=value" assignment (same value grammar as the file);
// replaces any value from the file. Repeated overrides of one key: last wins.
void apply_override(RawConfig& raw, const std::string& assignment);

// Type-check and resolve a raw document into a validated config.
ExperimentConfig resolve_config(const RawConfig& raw);

// Sidecar JSON: resolved config + command + tool version; parsing it back
// yields a config that reproduces the run byte-identically.
std::string sidecar_json(const ExperimentConfig& cfg, const std::string& command, int workers);

struct ReplaySpec {
    ExperimentConfig config;
    std::string command; // ber | capacity | bounds | conditional-ser
    int workers = 1;
};
ReplaySpec parse_sidecar(const std::string& json_text);

// Name <-> enum helpers shared by config files and CLI flags.
CodebookScheme codebook_scheme_from_string(const std::string& name);
std::string codebook_scheme_to_string(CodebookScheme scheme);
FadingModel fading_model_from_string(const std::string& name);
std::string fading_model_to_string(FadingModel model);
std::string scm_variant_to_string(ScmVariant variant);

} // namespace scm
