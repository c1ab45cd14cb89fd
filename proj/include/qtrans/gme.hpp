#pragma once

// Time-domain solution of the NIBA generalized master equation
//
//   dP/dt = int_{0}^{t} dt' [K-(t, t') - K+(t, t') P(t')]
//
// under the probe bias eps(t) = eps0 + eps_p cos(omega_p t), followed by
// Fourier projection of the periodic long-time state. This is an O(n^2)
// reference path used to validate the linear-response formulas, not a
// production spectrum path.

#include "qtrans/bathcorr.hpp"
#include "qtrans/model.hpp"

#include <complex>
#include <memory>
#include <vector>

namespace qtrans {

struct KernelPair {
    double plus = 0.0;
    double minus = 0.0;
};

/// Dynamical phase eps0 (t - t') + (eps_p / omega_p)(sin omega_p t - sin omega_p t').
double dynamical_phase(double eps0, double eps_p, double omega_p, double t, double tp);

/// K+(t, t') = h+(t - t') cos zeta, K-(t, t') = h-(t - t') sin zeta. Requires t >= t'.
KernelPair kernels_t(const CorrTable& corr, double delta, double eps0, double eps_p, double omega_p,
                     double t, double tp);

struct Trajectory {
    double dt = 0.0;
    std::vector<double> p; // P(n dt), n = 0, 1, ...

    double t_end() const { return p.empty() ? 0.0 : dt * static_cast<double>(p.size() - 1); }
};

struct GmeConfig {
    SystemParams sys;
    double omega_p = 1.0;
    double p0_init = 1.0;
    double dt = 0.0;        // 0: largest step with period / dt integral and
                            // dt <= min(2 pi / omega_p, 2 pi / omega_bar) / 64
    double t_end = 0.0;     // required by propagate; optional start for propagate_until_periodic
    bool check_step = true; // rerun at dt / 2 and compare, halving dt while they disagree
    double step_tol = 1e-4;
    int max_refinements = 3;
};

struct GmeRun {
    GmeConfig config;
    std::shared_ptr<const CorrTable> corr;
    Trajectory trajectory;
    double step_error = -1.0; // |P_dt - P_dt/2|_inf of the returned step, when checked
};

/// Step used for a configuration (see GmeConfig::dt).
double gme_step(const CorrTable& corr, const GmeConfig& cfg);

/// Integrate the GME. Memory is truncated at the table's t_max, where the
/// kernel envelope is below tol_tail. With check_step the step is halved
/// until |P_dt - P_dt/2| <= step_tol; NumericError once max_refinements
/// halvings have not sufficed.
GmeRun propagate(std::shared_ptr<const CorrTable> corr, const GmeConfig& cfg);

/// Integrates with a fixed step up to t_end, continuing `traj` if it
/// already holds a history computed with the same step. No convergence check.
void propagate_fixed(const CorrTable& corr, const GmeConfig& cfg, double dt, double t_end, Trajectory& traj);

struct Harmonic {
    int m = 0;
    std::complex<double> p_m{};
};

inline constexpr double kDefaultDiscard = 0.75;
inline constexpr double kPeriodicityTol = 1e-3;

/// p_m = (omega_p / 2 pi) int over whole periods of P(t) e^{-i m omega_p t},
/// using the whole probe periods after the first `discard` fraction of the
/// trajectory. Throws NumericError when the last two periods differ by more
/// than `periodic_tol` or fewer than two periods remain.
Harmonic extract_harmonic(const Trajectory& traj, double omega_p, int m, double discard = kDefaultDiscard,
                          double periodic_tol = kPeriodicityTol);

/// max |P(t) - P(t - period)| over the final period.
double periodicity_residual(const Trajectory& traj, double omega_p);

/// Integrates, then keeps extending the horizon by half until the
/// periodicity residual drops below `residual`. The initial horizon is
/// cfg.t_end, or t_max + 16 probe periods when that is 0. The step check
/// (if enabled) runs once on the final horizon.
GmeRun propagate_until_periodic(std::shared_ptr<const CorrTable> corr, GmeConfig cfg, double residual,
                                double max_t_end);

} // namespace qtrans
