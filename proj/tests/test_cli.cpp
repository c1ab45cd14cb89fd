#include <doctest.h>

#include "qtrans/config.hpp"
#include "qtrans/error.hpp"
#include "qtrans/oracle.hpp"
#include "qtrans/report.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace qtrans;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "qtrans_tests";
    fs::create_directories(dir);
    return dir / name;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(QTRANS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t count_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        ++n;
    return n;
}

} // namespace

TEST_CASE("defaults")
{
    const JobConfig c = parse_config_text("", {});
    CHECK(c.mode == Mode::Spectrum);
    CHECK(c.physics.bath == BathKind::Structured);
    CHECK(c.physics.g == 0.2);
    CHECK(c.physics.kappa == 0.05);
    CHECK(c.physics.temperature == 1.0);
    CHECK(c.physics.n_factor == 0.1);
    CHECK(c.physics.eps0 == 0.0);
    CHECK(c.physics.delta == 1.0);
    CHECK(c.provenance.at("g") == Provenance::Default);

    std::ostringstream os;
    echo_config(c, os);
    CHECK(os.str().find("g = 0.2  (default)") != std::string::npos);
}

TEST_CASE("file and flag precedence")
{
    const std::string file = "# comment\n[physics]\nomega = 1.0\ng = 0.3 ; trailing\n";
    const JobConfig c = parse_config_text(file, {{"omega", "1.2"}});
    CHECK(c.physics.omega == 1.2);
    CHECK(c.physics.g == 0.3);
    CHECK(c.provenance.at("omega") == Provenance::Flag);
    CHECK(c.provenance.at("g") == Provenance::File);
    CHECK(config_value(c, "omega") == "1.2");
}

TEST_CASE("configuration errors")
{
    try {
        parse_config_text("[physics]\nkappa = 0.4\n", {});
        FAIL("kappa = 0.4 accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("0.3183") != std::string::npos);
    }
    try {
        parse_config_text("[physics]\nomgea = 1.0\n", {});
        FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'omega'") != std::string::npos);
    }
    CHECK(nearest_key("omega_p_cont") == "omega_p_count");
    CHECK_THROWS_AS(parse_config_text("[grid]\ng = 0.3\n", {}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[nowhere]\n", {}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("g 0.3\n", {}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"g", "abc"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"temperature", "0"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"mode", "colormap"}, {"outer_count", "1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"gme_eps_ratio", "0.5"}}), ConfigError);
    CHECK_THROWS_AS(parse_config_text("", {{"format", "xml"}}), ConfigError);
}

TEST_CASE("row-count contracts")
{
    const JobConfig cm = parse_config_text("", {{"mode", "colormap"}});
    CHECK(cm.grid().size() == 20000);
    CHECK(result_columns(cm.grid())
          == std::vector<std::string>{"omega", "omega_p", "g", "alpha", "T_re", "T_im", "T_abs2"});

    const JobConfig one = parse_config_text("", {{"omega_p_count", "1"}, {"omega_p_min", "1.0"}});
    const SweepResult r = run_sweep(one.grid(), one.sweep_options());
    REQUIRE(r.rows.size() == 1);
    std::ostringstream os;
    write_csv(r, os);
    const std::string s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 2);
    CHECK(s.back() == '\n');
    CHECK(s.rfind("omega,omega_p,g,alpha,T_re,T_im,T_abs2,valid\n", 0) == 0);

    const JobConfig oh = parse_config_text("", {{"bath", "ohmic"}});
    CHECK(result_columns(oh.grid()).front() == "omega_p");
}

TEST_CASE("JSON round trip")
{
    const JobConfig c = parse_config_text("", {{"omega_p_count", "64"}, {"omega", "1.15"}});
    const SweepResult r = run_sweep(c.grid(), c.sweep_options());
    const fs::path p = scratch("round.json");
    emit_result(r, p.string(), EmitOptions{Format::Json, false});
    const auto rows = read_json_rows(p.string());
    REQUIRE(rows.size() == r.rows.size());
    const auto cols = result_columns(c.grid());
    const auto col = [&](const char* n) {
        return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), n) - cols.begin());
    };
    const std::size_t at = col("T_abs2"), wp = col("omega_p");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].valid);
        CHECK(rows[i].values.at(at) == r.rows[i].t_abs2);
        CHECK(rows[i].values.at(wp) == r.rows[i].axis_values[0]);
    }
    CHECK_THROWS_AS(emit_result(r, "/nonexistent-dir/x.json", EmitOptions{}), IoError);
}

TEST_CASE("oracle-check paths")
{
    JobConfig c = parse_config_text("", {{"g", "0"}});
    const OracleReport dec = oracle_check(c);
    REQUIRE(dec.checks.size() == 3);
    CHECK(dec.passed());
    CHECK(dec.checks[2].skipped);
    CHECK(dec.checks[2].note == "decoupled: chi = 0 identically");

    c = parse_config_text("", {{"kappa", "0.3"}});
    const OracleReport near = oracle_check(c);
    REQUIRE(near.checks.size() == 3);
    CHECK(near.checks[0].note.find("quadrature fallback") != std::string::npos);
    CHECK(near.checks[0].passed);
    std::ostringstream os;
    print_report(near, os);
    CHECK(os.str().find("quadrature fallback") != std::string::npos);
}

TEST_CASE("command-line exit codes")
{
    const fs::path out = scratch("cli.csv");
    CHECK(run_cli("spectrum --omega_p_count 40 --output " + out.string()) == 0);
    CHECK(count_lines(out) == 41);

    const fs::path ini = scratch("job.ini");
    std::ofstream(ini) << "[physics]\nomega = 1.0\n[grid]\nomega_p_count = 5\n";
    CHECK(run_cli("spectrum --config " + ini.string() + " --omega 1.2 --output " + out.string()) == 0);
    std::ifstream in(out);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header.rfind("omega,", 0) == 0);
    CHECK(first.rfind("1.2,", 0) == 0);
    CHECK(count_lines(out) == 6);

    CHECK(run_cli("spectrum --kappa 0.4") == 2);
    CHECK(run_cli("spectrum --omgea 1.0") == 2);
    CHECK(run_cli("nonsense") == 2);
    CHECK(run_cli("spectrum --config /nonexistent-dir/job.ini") == 4);
    CHECK(run_cli("spectrum --omega_p_count 5 --output /nonexistent-dir/out.csv") == 4);
    // memory of a very weak coupling never decays within the horizon cap
    CHECK(run_cli("dump-corr --g 0.001 --output /dev/null") == 3);
    CHECK(run_cli("--version") == 0);
}
