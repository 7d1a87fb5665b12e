#include "scm/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scm/errors.hpp"
#include "scm/version.hpp"

namespace scm {

namespace {

enum class KeyType { Int, Float, Str, FloatArray };

const std::map<std::string, std::map<std::string, KeyType>>& schema() {
    static const std::map<std::string, std::map<std::string, KeyType>> s = {
        {"scheme",
         {{"codebook", KeyType::Str},
          {"m", KeyType::Int},
          {"k", KeyType::Int},
          {"w", KeyType::Int},
          {"variant", KeyType::Str},
          {"table", KeyType::Str},
          {"apm", KeyType::Str},
          {"apm_order", KeyType::Int},
          {"detector", KeyType::Str},
          {"t", KeyType::Int}}},
        {"channel",
         {{"model", KeyType::Str},
          {"n", KeyType::Int},
          {"k", KeyType::Float},
          {"m", KeyType::Float},
          {"rho", KeyType::Float},
          {"tau", KeyType::Float},
          {"gamma2", KeyType::Float}}},
        {"sweep",
         {{"snr_db", KeyType::FloatArray},
          {"snr_start", KeyType::Float},
          {"snr_stop", KeyType::Float},
          {"snr_step", KeyType::Float},
          {"min_trials", KeyType::Int},
          {"max_trials", KeyType::Int},
          {"target_bit_errors", KeyType::Int},
          {"trials", KeyType::Int},
          {"seed", KeyType::Int}}},
        {"output", {{"path", KeyType::Str}}},
    };
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Remove a trailing # comment, respecting double quotes.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

[[noreturn]] void fail(const std::string& origin, int lineno, const std::string& what) {
    std::ostringstream os;
    os << origin;
    if (lineno > 0) os << ":" << lineno;
    os << ": " << what;
    throw ConfigError(os.str());
}

KeyType key_type(const std::string& section, const std::string& key, const std::string& origin,
                 int lineno) {
    const auto sit = schema().find(section);
    if (sit == schema().end()) fail(origin, lineno, "unknown section [" + section + "]");
    const auto kit = sit->second.find(key);
    if (kit == sit->second.end())
        fail(origin, lineno, "unknown key '" + key + "' in section [" + section + "]");
    return kit->second;
}

bool valid_key_chars(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

long long parse_int_token(const std::string& raw, const std::string& where) {
    if (raw.find_first_of(".eE") != std::string::npos)
        throw ConfigError(where + ": expected an integer, got '" + raw + "'");
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(where + ": expected an integer, got '" + raw + "'");
    return v;
}

double parse_float_token(const std::string& raw, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
        throw ConfigError(where + ": expected a number, got '" + raw + "'");
    return v;
}

std::string parse_str_token(const std::string& raw, const std::string& where) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        throw ConfigError(where + ": expected a \"quoted string\", got '" + raw + "'");
    const std::string body = raw.substr(1, raw.size() - 2);
    if (body.find('"') != std::string::npos)
        throw ConfigError(where + ": embedded quotes are not supported");
    return body;
}

std::vector<double> parse_array_token(const std::string& raw, const std::string& where) {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']')
        throw ConfigError(where + ": expected a [list, of, numbers], got '" + raw + "'");
    std::vector<double> out;
    std::string body = raw.substr(1, raw.size() - 2);
    if (trim(body).empty()) return out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        const std::size_t comma = body.find(',', pos);
        const std::string item =
            trim(comma == std::string::npos ? body.substr(pos) : body.substr(pos, comma - pos));
        out.push_back(parse_float_token(item, where));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Check a raw token against its declared type (parse errors surface with
// file/line context instead of at resolve time).
void check_token(KeyType type, const std::string& raw, const std::string& where) {
    switch (type) {
        case KeyType::Int: parse_int_token(raw, where); break;
        case KeyType::Float: parse_float_token(raw, where); break;
        case KeyType::Str: parse_str_token(raw, where); break;
        case KeyType::FloatArray: parse_array_token(raw, where); break;
    }
}

class Resolver {
public:
    explicit Resolver(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& sec, const std::string& key) const {
        const auto sit = raw_.values.find(sec);
        return sit != raw_.values.end() && sit->second.count(key) > 0;
    }
    std::string where(const std::string& sec, const std::string& key) const {
        return raw_.origin + ": [" + sec + "] " + key;
    }
    const std::string& token(const std::string& sec, const std::string& key) const {
        return raw_.values.at(sec).at(key);
    }

    long long require_int(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) throw ConfigError(where(sec, key) + " is required");
        return parse_int_token(token(sec, key), where(sec, key));
    }
    long long int_or(const std::string& sec, const std::string& key, long long dflt) const {
        return has(sec, key) ? parse_int_token(token(sec, key), where(sec, key)) : dflt;
    }
    double require_float(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) throw ConfigError(where(sec, key) + " is required");
        return parse_float_token(token(sec, key), where(sec, key));
    }
    double float_or(const std::string& sec, const std::string& key, double dflt) const {
        return has(sec, key) ? parse_float_token(token(sec, key), where(sec, key)) : dflt;
    }
    std::string require_str(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) throw ConfigError(where(sec, key) + " is required");
        return parse_str_token(token(sec, key), where(sec, key));
    }
    std::string str_or(const std::string& sec, const std::string& key,
                       const std::string& dflt) const {
        return has(sec, key) ? parse_str_token(token(sec, key), where(sec, key)) : dflt;
    }
    std::vector<double> require_array(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) throw ConfigError(where(sec, key) + " is required");
        return parse_array_token(token(sec, key), where(sec, key));
    }

private:
    const RawConfig& raw_;
};

int narrow_int(long long v, const std::string& where) {
    if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(where + ": value out of range");
    return static_cast<int>(v);
}

} // namespace

RawConfig parse_config_text(const std::string& text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail(origin, lineno, "malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (schema().find(section) == schema().end())
                fail(origin, lineno, "unknown section [" + section + "]");
            // Re-opening a section is allowed; duplicate keys are not.
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (section.empty()) fail(origin, lineno, "key outside any [section]");
        if (!valid_key_chars(key)) fail(origin, lineno, "malformed key '" + key + "'");
        if (value.empty()) fail(origin, lineno, "missing value for '" + key + "'");
        const KeyType type = key_type(section, key, origin, lineno);
        if (raw.values[section].count(key))
            fail(origin, lineno, "duplicate key '" + key + "' in section [" + section + "]");
        std::ostringstream where;
        where << origin << ":" << lineno << ": " << key;
        check_token(type, value, where.str());
        raw.values[section][key] = value;
    }
    return raw;
}

RawConfig load_raw_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "' must look like section.key=value");
    const std::string lhs = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    const std::size_t dot = lhs.find('.');
    if (dot == std::string::npos)
        throw ConfigError("override '" + assignment + "' must look like section.key=value");
    const std::string section = lhs.substr(0, dot);
    const std::string key = lhs.substr(dot + 1);
    const KeyType type = key_type(section, key, "--set " + assignment, 0);
    // Shells strip quotes; accept bare strings for string-typed keys.
    if (type == KeyType::Str && (value.empty() || value.front() != '"'))
        value = "\"" + value + "\"";
    check_token(type, value, "--set " + lhs);
    // Overriding one SNR-grid form supersedes the other.
    if (section == "sweep") {
        auto& sweep = raw.values["sweep"];
        if (key == "snr_db") {
            sweep.erase("snr_start");
            sweep.erase("snr_stop");
            sweep.erase("snr_step");
        } else if (key == "snr_start" || key == "snr_stop" || key == "snr_step") {
            sweep.erase("snr_db");
        }
    }
    raw.values[section][key] = value;
}

ExperimentConfig resolve_config(const RawConfig& raw) {
    const Resolver r(raw);
    ExperimentConfig cfg;
    SweepConfig& sw = cfg.sweep;

    // [scheme]
    sw.scheme.scheme = codebook_scheme_from_string(r.require_str("scheme", "codebook"));
    sw.scheme.m = narrow_int(r.require_int("scheme", "m"), r.where("scheme", "m"));
    sw.scheme.k = narrow_int(r.int_or("scheme", "k", 0), r.where("scheme", "k"));
    sw.scheme.w = narrow_int(r.int_or("scheme", "w", 0), r.where("scheme", "w"));
    sw.scheme.variant = scm_variant_from_string(r.str_or("scheme", "variant", "auto"));
    sw.scheme.table_path = r.str_or("scheme", "table", "");
    sw.scheme.apm = apm_kind_from_string(r.require_str("scheme", "apm"));
    sw.scheme.apm_order =
        narrow_int(r.require_int("scheme", "apm_order"), r.where("scheme", "apm_order"));
    sw.scheme.detector = detector_kind_from_string(r.str_or("scheme", "detector", "ml"));
    sw.scheme.t = narrow_int(r.int_or("scheme", "t", 0), r.where("scheme", "t"));

    // [channel]
    sw.channel.model = fading_model_from_string(r.require_str("channel", "model"));
    sw.channel.N = narrow_int(r.require_int("channel", "n"), r.where("channel", "n"));
    sw.channel.M = sw.scheme.m;
    sw.channel.K = r.float_or("channel", "k", 0.0);
    sw.channel.m = r.float_or("channel", "m", 1.0);
    sw.channel.rho = r.float_or("channel", "rho", 0.0);
    sw.channel.tau = r.float_or("channel", "tau", 0.0);
    sw.channel.gamma2 = r.float_or("channel", "gamma2", 0.0);

    // [sweep]
    const bool explicit_grid = r.has("sweep", "snr_db");
    const bool stepped_grid =
        r.has("sweep", "snr_start") || r.has("sweep", "snr_stop") || r.has("sweep", "snr_step");
    if (explicit_grid && stepped_grid)
        throw ConfigError(raw.origin + ": give either sweep.snr_db or snr_start/stop/step, not both");
    if (explicit_grid) {
        sw.snr_db = r.require_array("sweep", "snr_db");
    } else if (stepped_grid) {
        const double start = r.require_float("sweep", "snr_start");
        const double stop = r.require_float("sweep", "snr_stop");
        const double step = r.require_float("sweep", "snr_step");
        if (step <= 0.0 || stop < start)
            throw ConfigError(raw.origin + ": need snr_step > 0 and snr_stop >= snr_start");
        const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) sw.snr_db.push_back(start + static_cast<double>(i) * step);
    } else {
        throw ConfigError(raw.origin + ": sweep needs an SNR grid (snr_db or snr_start/stop/step)");
    }
    sw.min_trials = r.int_or("sweep", "min_trials", sw.min_trials);
    sw.max_trials = r.int_or("sweep", "max_trials", sw.max_trials);
    sw.target_bit_errors = r.int_or("sweep", "target_bit_errors", sw.target_bit_errors);
    sw.trials = r.int_or("sweep", "trials", sw.trials);
    const long long seed = r.int_or("sweep", "seed", static_cast<long long>(sw.seed));
    if (seed < 0) throw ConfigError(raw.origin + ": sweep.seed must be >= 0");
    sw.seed = static_cast<std::uint64_t>(seed);

    // [output]
    cfg.output_path = r.str_or("output", "path", "");

    sw.validate();
    return cfg;
}

std::string sidecar_json(const ExperimentConfig& cfg, const std::string& command, int workers) {
    nlohmann::json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["command"] = command;
    j["workers"] = workers;

    const SweepConfig& sw = cfg.sweep;
    j["scheme"] = {{"codebook", codebook_scheme_to_string(sw.scheme.scheme)},
                   {"m", sw.scheme.m},
                   {"k", sw.scheme.k},
                   {"w", sw.scheme.w},
                   {"variant", scm_variant_to_string(sw.scheme.variant)},
                   {"table", sw.scheme.table_path},
                   {"apm", apm_kind_to_string(sw.scheme.apm)},
                   {"apm_order", sw.scheme.apm_order},
                   {"detector", detector_kind_to_string(sw.scheme.detector)},
                   {"t", sw.scheme.t}};
    j["channel"] = {{"model", fading_model_to_string(sw.channel.model)}, {"n", sw.channel.N},
                    {"k", sw.channel.K},                                 {"m", sw.channel.m},
                    {"rho", sw.channel.rho},                             {"tau", sw.channel.tau},
                    {"gamma2", sw.channel.gamma2}};
    j["sweep"] = {{"snr_db", sw.snr_db},
                  {"min_trials", sw.min_trials},
                  {"max_trials", sw.max_trials},
                  {"target_bit_errors", sw.target_bit_errors},
                  {"trials", sw.trials},
                  {"seed", sw.seed}};
    j["output"] = {{"path", cfg.output_path}};
    return j.dump(2) + "\n";
}

ReplaySpec parse_sidecar(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sidecar is not valid JSON: ") + e.what());
    }
    try {
        ReplaySpec spec;
        spec.command = j.at("command").get<std::string>();
        spec.workers = j.at("workers").get<int>();

        SweepConfig& sw = spec.config.sweep;
        const auto& s = j.at("scheme");
        sw.scheme.scheme = codebook_scheme_from_string(s.at("codebook").get<std::string>());
        sw.scheme.m = s.at("m").get<int>();
        sw.scheme.k = s.at("k").get<int>();
        sw.scheme.w = s.at("w").get<int>();
        sw.scheme.variant = scm_variant_from_string(s.at("variant").get<std::string>());
        sw.scheme.table_path = s.at("table").get<std::string>();
        sw.scheme.apm = apm_kind_from_string(s.at("apm").get<std::string>());
        sw.scheme.apm_order = s.at("apm_order").get<int>();
        sw.scheme.detector = detector_kind_from_string(s.at("detector").get<std::string>());
        sw.scheme.t = s.at("t").get<int>();

        const auto& c = j.at("channel");
        sw.channel.model = fading_model_from_string(c.at("model").get<std::string>());
        sw.channel.N = c.at("n").get<int>();
        sw.channel.M = sw.scheme.m;
        sw.channel.K = c.at("k").get<double>();
        sw.channel.m = c.at("m").get<double>();
        sw.channel.rho = c.at("rho").get<double>();
        sw.channel.tau = c.at("tau").get<double>();
        sw.channel.gamma2 = c.at("gamma2").get<double>();

        const auto& w = j.at("sweep");
        sw.snr_db = w.at("snr_db").get<std::vector<double>>();
        sw.min_trials = w.at("min_trials").get<long>();
        sw.max_trials = w.at("max_trials").get<long>();
        sw.target_bit_errors = w.at("target_bit_errors").get<long>();
        sw.trials = w.at("trials").get<long>();
        sw.seed = w.at("seed").get<std::uint64_t>();

        spec.config.output_path = j.at("output").at("path").get<std::string>();
        sw.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("sidecar is missing or mistypes a field: ") + e.what());
    }
}

CodebookScheme codebook_scheme_from_string(const std::string& name) {
    if (name == "scm") return CodebookScheme::Scm;
    if (name == "sm") return CodebookScheme::Sm;
    if (name == "gsm") return CodebookScheme::Gsm;
    if (name == "table") return CodebookScheme::Table;
    throw ConfigError("unknown codebook scheme '" + name + "' (expected scm, sm, gsm, or table)");
}

std::string codebook_scheme_to_string(CodebookScheme scheme) {
    switch (scheme) {
        case CodebookScheme::Scm: return "scm";
        case CodebookScheme::Sm: return "sm";
        case CodebookScheme::Gsm: return "gsm";
        case CodebookScheme::Table: return "table";
    }
    throw ConfigError("unrepresentable codebook scheme");
}

FadingModel fading_model_from_string(const std::string& name) {
    if (name == "rayleigh") return FadingModel::Rayleigh;
    if (name == "rician") return FadingModel::Rician;
    if (name == "nakagami") return FadingModel::Nakagami;
    throw ConfigError("unknown fading model '" + name +
                      "' (expected rayleigh, rician, or nakagami)");
}

std::string fading_model_to_string(FadingModel model) {
    switch (model) {
        case FadingModel::Rayleigh: return "rayleigh";
        case FadingModel::Rician: return "rician";
        case FadingModel::Nakagami: return "nakagami";
    }
    throw ConfigError("unrepresentable fading model");
}

std::string scm_variant_to_string(ScmVariant variant) {
    switch (variant) {
        case ScmVariant::Auto: return "auto";
        case ScmVariant::D3: return "d3";
        case ScmVariant::D4: return "d4";
    }
    throw ConfigError("unrepresentable codebook variant");
}

} // namespace scm
