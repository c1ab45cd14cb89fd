#include "qtrans/gme.hpp"

#include "qtrans/error.hpp"
#include "qtrans/niba.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace qtrans {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::size_t steps_per_period(double dt, double omega_p)
{
    const double period = 2.0 * kPi / omega_p;
    const double n = period / dt;
    const auto k = static_cast<std::size_t>(std::llround(n));
    if (k < 2 || std::abs(n - static_cast<double>(k)) > 1e-6 * n)
        throw NumericError("trajectory step " + num(dt) + " does not divide the probe period " + num(period));
    return k;
}

} // namespace

double dynamical_phase(double eps0, double eps_p, double omega_p, double t, double tp)
{
    return eps0 * (t - tp) + (eps_p / omega_p) * (std::sin(omega_p * t) - std::sin(omega_p * tp));
}

KernelPair kernels_t(const CorrTable& corr, double delta, double eps0, double eps_p, double omega_p,
                     double t, double tp)
{
    const HValue h = h_pm(corr, delta, t - tp);
    const double zeta = dynamical_phase(eps0, eps_p, omega_p, t, tp);
    return {h.plus * std::cos(zeta), h.minus * std::sin(zeta)};
}

double gme_step(const CorrTable& corr, const GmeConfig& cfg)
{
    if (!(cfg.omega_p > 0.0))
        throw ParameterError("probe frequency must be > 0");
    const double period = 2.0 * kPi / cfg.omega_p;
    double dt = cfg.dt;
    if (dt <= 0.0) {
        double fastest = cfg.omega_p;
        if (const auto* s = std::get_if<StructuredEffective>(&corr.spec()))
            fastest = std::max(fastest, std::sqrt(s->omega * s->omega - s->gamma * s->gamma));
        if (const auto* o = std::get_if<OhmicExpCutoff>(&corr.spec()))
            fastest = std::max(fastest, o->omega_c);
        fastest = std::max(fastest, std::abs(cfg.sys.eps0));
        dt = 2.0 * kPi / fastest / 64.0;
    }
    const double n = std::ceil(period / dt - 1e-9);
    return period / n;
}

void propagate_fixed(const CorrTable& corr, const GmeConfig& cfg, double dt, double t_end, Trajectory& traj)
{
    cfg.sys.validate();
    if (traj.p.empty()) {
        traj.dt = dt;
        traj.p.push_back(cfg.p0_init);
    } else if (traj.dt != dt) {
        throw ParameterError("cannot continue a trajectory with a different step");
    }

    const auto n_end = static_cast<std::size_t>(std::llround(t_end / dt));
    if (n_end < traj.p.size())
        return;

    // Memory window in steps.
    const std::size_t mem = corr.identically_zero()
                                ? n_end
                                : std::min(n_end, static_cast<std::size_t>(std::floor(corr.t_max() / dt)));
    std::vector<double> hp(mem + 1), hm(mem + 1);
    for (std::size_t k = 0; k <= mem; ++k) {
        const HValue h = h_pm(corr, cfg.sys.delta, static_cast<double>(k) * dt);
        hp[k] = h.plus;
        hm[k] = h.minus;
    }

    const double w = cfg.omega_p;
    const double b = cfg.sys.eps_p / w;
    const double e0 = cfg.sys.eps0;
    const double d2 = cfg.sys.delta * cfg.sys.delta;

    std::vector<double> s(n_end + 1);
    for (std::size_t j = 0; j <= n_end; ++j)
        s[j] = std::sin(w * (static_cast<double>(j) * dt));

    std::vector<double>& p = traj.p;
    p.reserve(n_end + 1);

    // History integral over t' < t_m (trapezoid, the t' = t_m end excluded).
    auto history = [&](std::size_t m) {
        const std::size_t j0 = m > mem ? m - mem : 0;
        double acc = 0.0;
        for (std::size_t j = j0; j < m; ++j) {
            const std::size_t k = m - j;
            const double zeta = e0 * (static_cast<double>(k) * dt) + b * (s[m] - s[j]);
            const double v = hm[k] * std::sin(zeta) - hp[k] * std::cos(zeta) * p[j];
            acc += (j == j0) ? 0.5 * v : v;
        }
        return acc * dt;
    };

    std::size_t n = p.size() - 1;
    double f_n = (n == 0) ? 0.0 : history(n) - 0.5 * dt * d2 * p[n];
    const double implicit = 1.0 + 0.25 * dt * dt * d2;
    for (std::size_t m = n + 1; m <= n_end; ++m) {
        const double a = history(m);
        const double pm = (p[m - 1] + 0.5 * dt * (f_n + a)) / implicit;
        p.push_back(pm);
        f_n = a - 0.5 * dt * d2 * pm;
    }
}

namespace {

double max_diff(const Trajectory& coarse, const Trajectory& fine)
{
    double err = 0.0;
    for (std::size_t i = 0; i < coarse.p.size() && 2 * i < fine.p.size(); ++i)
        err = std::max(err, std::abs(coarse.p[i] - fine.p[2 * i]));
    return err;
}

// Compares against a run at half the step; while they disagree by more than
// step_tol the finer run becomes the candidate. `traj` ends up holding the
// coarser member of the first agreeing pair.
double refine_step(const CorrTable& corr, const GmeConfig& cfg, Trajectory& traj)
{
    for (int r = 0;; ++r) {
        Trajectory fine;
        propagate_fixed(corr, cfg, 0.5 * traj.dt, traj.t_end(), fine);
        const double err = max_diff(traj, fine);
        if (err <= cfg.step_tol)
            return err;
        if (r >= cfg.max_refinements)
            throw NumericError("GME step-halving check failed: |P_dt - P_dt/2| = " + num(err) + " > "
                               + num(cfg.step_tol) + " at dt = " + num(traj.dt) + " after "
                               + std::to_string(r) + " refinements; reduce dt");
        traj = std::move(fine);
    }
}

} // namespace

GmeRun propagate(std::shared_ptr<const CorrTable> corr, const GmeConfig& cfg)
{
    if (!corr)
        throw ParameterError("propagate needs a correlation table");
    if (!(cfg.t_end > 0.0))
        throw ParameterError("GME horizon t_end must be > 0");
    GmeRun run;
    run.config = cfg;
    run.corr = corr;
    const double dt = gme_step(*corr, cfg);
    run.config.dt = dt;
    propagate_fixed(*corr, cfg, dt, cfg.t_end, run.trajectory);
    if (cfg.check_step) {
        run.step_error = refine_step(*corr, cfg, run.trajectory);
        run.config.dt = run.trajectory.dt;
    }
    return run;
}

GmeRun propagate_until_periodic(std::shared_ptr<const CorrTable> corr, GmeConfig cfg, double residual,
                                double max_t_end)
{
    if (!corr)
        throw ParameterError("propagate needs a correlation table");
    const double period = 2.0 * kPi / cfg.omega_p;
    double t_end = cfg.t_end > 0.0 ? cfg.t_end : corr->t_max() + 16.0 * period;

    GmeRun run;
    run.corr = corr;
    const double dt = gme_step(*corr, cfg);
    for (;;) {
        propagate_fixed(*corr, cfg, dt, t_end, run.trajectory);
        const double r = periodicity_residual(run.trajectory, cfg.omega_p);
        if (r <= residual)
            break;
        if (t_end >= max_t_end)
            throw NumericError("GME transient has not decayed by t = " + num(t_end) + " (periodicity residual "
                               + num(r) + ")");
        t_end = std::min(1.5 * t_end, max_t_end);
    }
    if (cfg.check_step)
        run.step_error = refine_step(*corr, cfg, run.trajectory);
    cfg.dt = run.trajectory.dt;
    cfg.t_end = run.trajectory.t_end();
    run.config = cfg;
    return run;
}

double periodicity_residual(const Trajectory& traj, double omega_p)
{
    const std::size_t np = steps_per_period(traj.dt, omega_p);
    if (traj.p.size() < 2 * np + 1)
        return INFINITY;
    const std::size_t last = traj.p.size() - 1;
    double r = 0.0;
    for (std::size_t i = last - np + 1; i <= last; ++i)
        r = std::max(r, std::abs(traj.p[i] - traj.p[i - np]));
    return r;
}

Harmonic extract_harmonic(const Trajectory& traj, double omega_p, int m, double discard, double periodic_tol)
{
    if (!(omega_p > 0.0))
        throw ParameterError("probe frequency must be > 0");
    if (!(discard >= 0.0 && discard < 1.0))
        throw ParameterError("discard fraction must lie in [0, 1)");
    const std::size_t np = steps_per_period(traj.dt, omega_p);
    if (traj.p.size() < 2)
        throw NumericError("trajectory too short for harmonic extraction");
    const std::size_t last = traj.p.size() - 1;
    const auto start = static_cast<std::size_t>(std::ceil(discard * static_cast<double>(last)));
    const std::size_t periods = (last - std::min(start, last)) / np;
    if (periods < 2)
        throw NumericError("fewer than two probe periods after transient discard; extend t_end");
    const double r = periodicity_residual(traj, omega_p);
    if (r > periodic_tol)
        throw NumericError("transient not decayed: last two periods differ by " + num(r) + "; extend t_end");

    // Whole periods ending at the last sample; for a periodic integrand the
    // trapezoid rule reduces to the plain sum over one end point.
    const std::size_t first = last - periods * np;
    std::complex<double> acc{};
    for (std::size_t j = first; j < last; ++j) {
        const double phase = -2.0 * kPi * static_cast<double>(m) * static_cast<double>(j % np) / static_cast<double>(np);
        acc += traj.p[j] * std::polar(1.0, phase);
    }
    return {m, acc / static_cast<double>(periods * np)};
}

} // namespace qtrans
