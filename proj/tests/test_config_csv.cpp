#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "scm/config.hpp"
#include "scm/csv.hpp"
#include "scm/errors.hpp"

using namespace scm;

namespace {

const char* kMinimalDoc =
    "[scheme]\n"
    "codebook = \"sm\"\n"
    "m = 2\n"
    "apm = \"psk\"\n"
    "apm_order = 4\n"
    "\n"
    "[channel]\n"
    "model = \"rayleigh\"\n"
    "n = 2\n"
    "\n"
    "[sweep]\n"
    "snr_db = [0, 10]\n";

std::string thrown_message(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("config parsing: sections, comments, and value grammar") {
    const RawConfig raw = parse_config_text(
        "# leading comment\n"
        "[scheme]\n"
        "codebook = \"scm\"   # trailing comment\n"
        "m = 7\n"
        "k = 3\n"
        "apm = \"qam\"\n"
        "apm_order = 16\n"
        "table = \"path/with#hash.txt\"  # hash inside quotes survives\n"
        "[channel]\n"
        "model = \"rician\"\n"
        "n = 2\n"
        "k = 5.5\n"
        "rho = 0.3\n"
        "[sweep]\n"
        "snr_db = [0, 2.5, 5]\n"
        "seed = 42\n",
        "inline");
    CHECK(raw.values.at("scheme").at("m") == "7");
    CHECK(raw.values.at("scheme").at("table") == "\"path/with#hash.txt\"");
    CHECK(raw.values.at("channel").at("k") == "5.5");
    CHECK(raw.values.at("sweep").at("snr_db") == "[0, 2.5, 5]");

    // Re-opening a section is allowed.
    CHECK_NOTHROW(parse_config_text("[sweep]\nseed = 1\n[sweep]\ntrials = 5\n", "x"));
}

TEST_CASE("config parsing errors carry the origin and line number") {
    CHECK(mentions(thrown_message([] { parse_config_text("[nope]\n", "f.toml"); }),
                   "f.toml:1"));
    CHECK(mentions(thrown_message([] { parse_config_text("[nope]\n", "f.toml"); }),
                   "unknown section"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nbogus = 1\n", "f.toml"); }),
        "f.toml:2"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nbogus = 1\n", "f.toml"); }),
        "unknown key"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nseed = 1\nseed = 2\n", "f.toml"); }),
        "duplicate key"));
    CHECK(mentions(thrown_message([] { parse_config_text("seed = 1\n", "f.toml"); }),
                   "outside any"));
    CHECK(mentions(thrown_message([] { parse_config_text("[sweep]\nseed\n", "f.toml"); }),
                   "key = value"));
    CHECK(mentions(thrown_message([] { parse_config_text("[sweep]\nseed =\n", "f.toml"); }),
                   "missing value"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nSeed = 1\n", "f.toml"); }),
        "malformed key"));
    CHECK(mentions(thrown_message([] { parse_config_text("[sweep\nseed = 1\n", "f.toml"); }),
                   "malformed section"));

    // Type errors surface at parse time with position info.
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nseed = 1.5\n", "f.toml"); }),
        "expected an integer"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[channel]\nrho = fast\n", "f.toml"); }),
        "expected a number"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[scheme]\napm = psk\n", "f.toml"); }),
        "quoted string"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nsnr_db = 5\n", "f.toml"); }),
        "list"));
    CHECK(mentions(
        thrown_message([] { parse_config_text("[sweep]\nsnr_db = [1, oops]\n", "f.toml"); }),
        "expected a number"));
}

TEST_CASE("config resolution: defaults and required keys") {
    const ExperimentConfig cfg = resolve_config(parse_config_text(kMinimalDoc, "mini"));
    CHECK(cfg.sweep.scheme.scheme == CodebookScheme::Sm);
    CHECK(cfg.sweep.scheme.m == 2);
    CHECK(cfg.sweep.scheme.apm == ApmKind::Psk);
    CHECK(cfg.sweep.scheme.apm_order == 4);
    CHECK(cfg.sweep.scheme.detector == DetectorKind::Ml);
    CHECK(cfg.sweep.channel.model == FadingModel::Rayleigh);
    CHECK(cfg.sweep.channel.N == 2);
    CHECK(cfg.sweep.channel.M == 2); // mirrored from scheme.m
    CHECK(cfg.sweep.channel.K == 0.0);
    CHECK(cfg.sweep.channel.m == 1.0);
    CHECK(cfg.sweep.channel.gamma2 == 0.0);
    CHECK(cfg.sweep.snr_db == std::vector<double>{0.0, 10.0});
    CHECK(cfg.sweep.min_trials == 1000);
    CHECK(cfg.sweep.max_trials == 100000000);
    CHECK(cfg.sweep.target_bit_errors == 200);
    CHECK(cfg.sweep.trials == 2000);
    CHECK(cfg.sweep.seed == 1);
    CHECK(cfg.output_path.empty());

    // Missing required keys.
    CHECK_THROWS_AS(resolve_config(parse_config_text("[sweep]\nsnr_db = [1]\n", "x")),
                    ConfigError);
    CHECK(mentions(thrown_message([] {
                       resolve_config(parse_config_text(
                           "[scheme]\ncodebook = \"sm\"\nm = 2\napm = \"psk\"\n"
                           "[channel]\nmodel = \"rayleigh\"\nn = 1\n[sweep]\nsnr_db = [1]\n",
                           "x"));
                   }),
                   "apm_order"));
}

TEST_CASE("config resolution: SNR grid forms") {
    const std::string head =
        "[scheme]\ncodebook = \"sm\"\nm = 2\napm = \"psk\"\napm_order = 4\n"
        "[channel]\nmodel = \"rayleigh\"\nn = 1\n[sweep]\n";

    const ExperimentConfig stepped = resolve_config(
        parse_config_text(head + "snr_start = 0\nsnr_stop = 10\nsnr_step = 2\n", "x"));
    CHECK(stepped.sweep.snr_db == std::vector<double>{0, 2, 4, 6, 8, 10});

    const ExperimentConfig uneven = resolve_config(
        parse_config_text(head + "snr_start = 0\nsnr_stop = 10\nsnr_step = 3\n", "x"));
    CHECK(uneven.sweep.snr_db == std::vector<double>{0, 3, 6, 9});

    const ExperimentConfig fractional = resolve_config(
        parse_config_text(head + "snr_start = 1\nsnr_stop = 3\nsnr_step = 0.5\n", "x"));
    CHECK(fractional.sweep.snr_db.size() == 5);
    CHECK(fractional.sweep.snr_db.front() == 1.0);
    CHECK(fractional.sweep.snr_db.back() == doctest::Approx(3.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        resolve_config(parse_config_text(head + "snr_db = [1]\nsnr_start = 0\n", "x")),
        ConfigError);
    CHECK_THROWS_AS(resolve_config(parse_config_text(head, "x")), ConfigError);
    CHECK_THROWS_AS(
        resolve_config(parse_config_text(
            head + "snr_start = 5\nsnr_stop = 0\nsnr_step = 1\n", "x")),
        ConfigError);
    CHECK_THROWS_AS(
        resolve_config(parse_config_text(
            head + "snr_start = 0\nsnr_stop = 5\nsnr_step = 0\n", "x")),
        ConfigError);
}

TEST_CASE("config resolution: seed validation and channel wiring") {
    const std::string head =
        "[scheme]\ncodebook = \"sm\"\nm = 2\napm = \"psk\"\napm_order = 4\n"
        "[channel]\nmodel = \"rician\"\nn = 3\nk = 7\nrho = 0.5\ntau = 0.25\ngamma2 = 0.01\n"
        "[sweep]\nsnr_db = [5]\n";
    const ExperimentConfig cfg = resolve_config(parse_config_text(head, "x"));
    CHECK(cfg.sweep.channel.model == FadingModel::Rician);
    CHECK(cfg.sweep.channel.N == 3);
    CHECK(cfg.sweep.channel.K == 7.0);
    CHECK(cfg.sweep.channel.rho == 0.5);
    CHECK(cfg.sweep.channel.tau == 0.25);
    CHECK(cfg.sweep.channel.gamma2 == 0.01);

    CHECK_THROWS_AS(resolve_config(parse_config_text(head + "seed = -3\n", "x")),
                    ConfigError);
}

TEST_CASE("overrides: grammar, auto-quoting, and grid supersession") {
    RawConfig raw = parse_config_text(kMinimalDoc, "mini");
    apply_override(raw, "sweep.seed=123");
    apply_override(raw, "scheme.apm=qam"); // bare string gets quoted
    apply_override(raw, "scheme.apm_order=16");
    ExperimentConfig cfg = resolve_config(raw);
    CHECK(cfg.sweep.seed == 123);
    CHECK(cfg.sweep.scheme.apm == ApmKind::Qam);
    CHECK(cfg.sweep.scheme.apm_order == 16);

    // Explicit grid in the file, stepped override => file grid removed.
    raw = parse_config_text(kMinimalDoc, "mini");
    apply_override(raw, "sweep.snr_start=0");
    apply_override(raw, "sweep.snr_stop=4");
    apply_override(raw, "sweep.snr_step=2");
    cfg = resolve_config(raw);
    CHECK(cfg.sweep.snr_db == std::vector<double>{0, 2, 4});

    // And the reverse direction.
    apply_override(raw, "sweep.snr_db=[7, 9]");
    cfg = resolve_config(raw);
    CHECK(cfg.sweep.snr_db == std::vector<double>{7, 9});

    CHECK_THROWS_AS(apply_override(raw, "no_dot_or_equals"), ConfigError);
    CHECK_THROWS_AS(apply_override(raw, "sweepseed=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(raw, "sweep.bogus=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(raw, "sweep.seed=1.5"), ConfigError);
    CHECK_THROWS_AS(apply_override(raw, "bogus.seed=1"), ConfigError);
}

TEST_CASE("sidecar: round trip preserves every field") {
    RawConfig raw = parse_config_text(kMinimalDoc, "mini");
    apply_override(raw, "sweep.seed=77");
    apply_override(raw, "sweep.min_trials=500");
    apply_override(raw, "output.path=run.csv");
    const ExperimentConfig cfg = resolve_config(raw);

    const std::string json = sidecar_json(cfg, "ber", 4);
    const ReplaySpec spec = parse_sidecar(json);
    CHECK(spec.command == "ber");
    CHECK(spec.workers == 4);
    CHECK(spec.config.output_path == "run.csv");
    CHECK(spec.config.sweep.seed == 77);
    CHECK(spec.config.sweep.min_trials == 500);
    CHECK(spec.config.sweep.snr_db == cfg.sweep.snr_db);
    CHECK(spec.config.sweep.scheme.m == cfg.sweep.scheme.m);
    CHECK(spec.config.sweep.channel.N == cfg.sweep.channel.N);

    // Re-serializing the parsed sidecar reproduces the original bytes.
    CHECK(sidecar_json(spec.config, spec.command, spec.workers) == json);
}

TEST_CASE("sidecar: malformed input is a config error") {
    CHECK_THROWS_AS(parse_sidecar("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_sidecar("{}"), ConfigError);
    CHECK_THROWS_AS(parse_sidecar("{\"command\": \"ber\"}"), ConfigError);

    RawConfig raw = parse_config_text(kMinimalDoc, "mini");
    const std::string json = sidecar_json(resolve_config(raw), "ber", 1);
    // Corrupt one required field's type.
    std::string broken = json;
    const auto pos = broken.find("\"workers\": 1");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, 12, "\"workers\": \"x\"");
    CHECK_THROWS_AS(parse_sidecar(broken), ConfigError);
}

TEST_CASE("name mappings reject unknown tokens") {
    CHECK(codebook_scheme_from_string("gsm") == CodebookScheme::Gsm);
    CHECK(codebook_scheme_to_string(CodebookScheme::Table) == "table");
    CHECK_THROWS_AS(codebook_scheme_from_string("qsm"), ConfigError);
    CHECK(fading_model_from_string("nakagami") == FadingModel::Nakagami);
    CHECK(fading_model_to_string(FadingModel::Rician) == "rician");
    CHECK_THROWS_AS(fading_model_from_string("awgn"), ConfigError);
    CHECK(scm_variant_to_string(ScmVariant::D3) == "d3");
}

TEST_CASE("doubles survive the CSV round trip bit-exactly") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    // %.17g strips trailing zeros, so this one round-trips in short form.
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_long(-42) == "-42");
    CHECK(format_long(100000000) == "100000000");

    for (double v : {0.1, 1.0 / 3.0, 2.5e17, 1e-17, 123.456}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("CSV writer: layout and refusal to quote") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}, {"3", "nan"}};
    CHECK(csv_to_string(t) == "a,b\n1,2\n3,nan\n");

    CsvTable ragged = t;
    ragged.rows.push_back({"only one"});
    CHECK_THROWS_AS(csv_to_string(ragged), ConfigError);

    CsvTable comma = t;
    comma.rows[0][0] = "1,5";
    CHECK_THROWS_AS(csv_to_string(comma), ConfigError);

    CsvTable quote = t;
    quote.rows[0][0] = "\"1\"";
    CHECK_THROWS_AS(csv_to_string(quote), ConfigError);

    CsvTable empty_cell = t;
    empty_cell.rows[0][0] = "";
    CHECK_THROWS_AS(csv_to_string(empty_cell), ConfigError);

    CsvTable no_header;
    CHECK_THROWS_AS(csv_to_string(no_header), ConfigError);
}

TEST_CASE("CSV parser: round trip and strictness") {
    CsvTable t;
    t.header = {"snr_db", "ber"};
    t.rows = {{format_double(0.0), format_double(0.10000000000000001)},
              {format_double(10.0), format_double(1e-5)}};
    const std::string text = csv_to_string(t);
    const CsvTable back = parse_csv(text);
    CHECK(back.header == t.header);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows == t.rows);

    // Windows line endings are tolerated.
    const CsvTable crlf = parse_csv("a,b\r\n1,2\r\n");
    CHECK(crlf.rows[0][1] == "2");

    CHECK_THROWS_AS(parse_csv(""), ConfigError);
    CHECK_THROWS_AS(parse_csv("a,b\n\n1,2\n"), ConfigError);   // empty line
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), ConfigError);       // ragged row
    CHECK_THROWS_AS(parse_csv("a,b\n1,\n"), ConfigError);      // empty cell
    CHECK_THROWS_AS(parse_csv("a,b\n\"1\",2\n"), ConfigError); // quoted cell
}

TEST_CASE("text file helpers") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "scmsim_test_roundtrip.txt").string();
    write_text_file(path, "line1\nline2\n");
    CHECK(read_text_file(path) == "line1\nline2\n");
    std::remove(path.c_str());

    CHECK_THROWS_AS(write_text_file("/nonexistent_dir_scmsim/x.txt", "y"),
                    std::runtime_error);
    CHECK_THROWS_AS(read_text_file("/nonexistent_dir_scmsim/x.txt"), std::runtime_error);
}
