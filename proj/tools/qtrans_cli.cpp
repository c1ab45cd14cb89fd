// qtrans: probe transmission of a flux qubit behind a dissipative resonator.
//
//   qtrans <mode> [--config FILE] [--key value ...]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.

#include "qtrans/config.hpp"
#include "qtrans/error.hpp"
#include "qtrans/gme.hpp"
#include "qtrans/oracle.hpp"
#include "qtrans/report.hpp"
#include "qtrans/sweep.hpp"
#include "qtrans/version.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>

using namespace qtrans;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

BathSpec bath_of(const FixedParams& f)
{
    if (f.bath == BathKind::Structured)
        return effective_bath(ResonatorParams{f.omega, f.g, f.kappa});
    return OhmicExpCutoff{f.alpha, f.omega_c};
}

int run_sweep_mode(const JobConfig& cfg)
{
    const SweepResult res = run_sweep(cfg.grid(), cfg.sweep_options());

    std::size_t invalid = 0, above = 0;
    double worst = 0.0;
    for (const auto& r : res.rows) {
        if (!r.valid) {
            ++invalid;
            continue;
        }
        worst = std::max(worst, r.t_abs2);
        if (r.t_abs2 > 1.05 || r.t_abs2 < 0.0)
            ++above;
    }
    std::fprintf(stderr, "# %zu rows, %zu invalid, %zu tables, %.2f s\n", res.rows.size(), invalid, res.meta.tables,
                 res.meta.wall_seconds);
    if (above)
        std::fprintf(stderr, "# warning: %zu rows outside 0 <= |T|^2 <= 1.05 (max %.6g)\n", above, worst);
    for (const auto& ld : res.dips) {
        std::fprintf(stderr, "# dips");
        if (cfg.mode == Mode::Colormap)
            std::fprintf(stderr, " @ %s=%.6g", to_string(cfg.outer_axis), ld.outer_value);
        std::fprintf(stderr, ":");
        for (const auto& d : ld.dips)
            std::fprintf(stderr, " %.5g (|T|^2=%.5g, width %.3g)", d.center, d.value, d.width);
        std::fprintf(stderr, "\n");
    }
    emit_result(res, cfg.output, EmitOptions{cfg.format, cfg.record_timing});
    return 0;
}

int run_oracle_mode(const JobConfig& cfg)
{
    const OracleReport rep = oracle_check(cfg);
    with_output(cfg.output, [&](std::ostream& os) { print_report(rep, os); });
    return rep.passed() ? 0 : kExitNumeric;
}

int run_gme_mode(const JobConfig& cfg)
{
    const Thermal th(cfg.physics.temperature);
    const BathSpec bath = bath_of(cfg.physics);
    const SystemParams sys{cfg.physics.delta, cfg.physics.eps0, cfg.physics.eps_p, cfg.physics.n_factor};
    const double wp = cfg.physics.omega_p;
    auto table = std::make_shared<const CorrTable>(tabulate(bath, th, cfg.tabulate_options()));
    if (table->identically_zero()) {
        with_output(cfg.output, [](std::ostream& os) { os << "SKIP  GME vs chi  [decoupled: chi = 0 identically]\n"; });
        return 0;
    }

    Trajectory traj;
    const GmeComparison r = gme_vs_chi(table, sys, wp, cfg.gme_eps_ratio, true, &traj);
    const GmeComparison half = gme_vs_chi(table, sys, wp, 0.5 * cfg.gme_eps_ratio, false);
    const double lin = std::abs(r.p1_over_eps - half.p1_over_eps) / std::abs(r.p1_over_eps);
    const bool ok = r.rel_error <= kGmeOracleRelTol && lin <= 0.01;

    with_output(cfg.output, [&](std::ostream& os) {
        char buf[512];
        std::snprintf(buf, sizeof buf,
                      "omega_p = %.6g  eps_p = %.6g  dt = %.6g  t_end = %.6g  step_error = %.3e\n"
                      "p1/eps_p = %.8g %+.8gi\n"
                      "chi      = %.8g %+.8gi\n"
                      "relative error %.3e (tol 5e-2), linearity %.3e (tol 1e-2): %s\n",
                      wp, r.eps_p, r.dt, r.t_end, r.step_error, r.p1_over_eps.real(), r.p1_over_eps.imag(),
                      r.chi.real(), r.chi.imag(), r.rel_error, lin, ok ? "PASS" : "FAIL");
        os << buf;
    });
    if (!cfg.gme_trajectory.empty()) {
        with_output(cfg.gme_trajectory, [&](std::ostream& os) {
            os << "t,P\n";
            char buf[64];
            for (std::size_t i = 0; i < traj.p.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", traj.dt * static_cast<double>(i), traj.p[i]);
                os << buf;
            }
        });
    }
    return ok ? 0 : kExitNumeric;
}

int run_dump_mode(const JobConfig& cfg)
{
    const Thermal th(cfg.physics.temperature);
    const CorrTable table = tabulate(bath_of(cfg.physics), th, cfg.tabulate_options());
    std::fprintf(stderr, "# Q(t) table: %zu samples, t_max %.6g, source %s, interpolation error %.3g\n", table.size(),
                 table.t_max(), to_string(table.source()), table.interp_error());
    with_output(cfg.output, [&](std::ostream& os) { table.write_csv(os); });
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weak-probe transmission of a qubit coupled to a dissipative resonator"};
    app.set_version_flag("--version", QTRANS_VERSION);
    app.allow_extras();

    std::string mode;
    std::string config_file;
    app.add_option("mode", mode, "spectrum | colormap | oracle-check | gme-validate | dump-corr");
    app.add_option("--config", config_file, "INI-style file with [section] headers and key = value lines");

    std::map<std::string, std::string> values;
    for (const auto& key : config_keys()) {
        if (key == "mode")
            continue;
        app.add_option("--" + key, values[key], "override " + key);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        for (const auto& extra : app.remaining()) {
            if (extra.rfind("--", 0) == 0) {
                const std::string key = extra.substr(2, extra.find('=') - 2);
                throw ConfigError("unknown option '--" + key + "'; did you mean '--" + nearest_key(key) + "'?");
            }
            throw ConfigError("unexpected argument '" + extra + "'");
        }

        std::vector<std::pair<std::string, std::string>> flags;
        if (!mode.empty())
            flags.emplace_back("mode", mode);
        for (const auto& key : config_keys())
            if (key != "mode" && app.count("--" + key))
                flags.emplace_back(key, values[key]);

        const JobConfig cfg = parse_config(config_file, flags);
        std::cerr << "# qtrans " << QTRANS_VERSION << '\n';
        echo_config(cfg, std::cerr);

        switch (cfg.mode) {
        case Mode::Spectrum:
        case Mode::Colormap: return run_sweep_mode(cfg);
        case Mode::OracleCheck: return run_oracle_mode(cfg);
        case Mode::GmeValidate: return run_gme_mode(cfg);
        case Mode::DumpCorr: return run_dump_mode(cfg);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
