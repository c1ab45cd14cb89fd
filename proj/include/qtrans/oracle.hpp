#pragma once

// Independent reference computations and the oracle-check report.

#include "qtrans/bathcorr.hpp"
#include "qtrans/config.hpp"
#include "qtrans/gme.hpp"
#include "qtrans/niba.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace qtrans {

/// Q(t) of the exponential-cutoff Ohmic bath from its Gamma-function form:
///   Q' = alpha ln(1 + wc^2 t^2) + 2 alpha sum_n ln(1 + (T t)^2 / (n + 1 + T/wc)^2)
///   Q'' = 2 alpha atan(wc t)
QValue q_ohmic_exact(const OhmicExpCutoff& bath, const Thermal& thermal, double t);

/// Response kernels by composite Simpson on a uniform grid of spacing <= step.
ResponseKernels brute_force_kernels(const KernelFunctions& kf, double eps0, double eps_p, double omega_p,
                                    double step);

struct GmeComparison {
    double omega_p = 0.0;
    double eps_p = 0.0;
    cplx p1_over_eps{};
    cplx chi{};
    double rel_error = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    double step_error = -1.0;
};

/// Drives the GME at eps_p = ratio * omega_p until periodic and compares the
/// first harmonic per unit drive with chi.
GmeComparison gme_vs_chi(std::shared_ptr<const CorrTable> corr, SystemParams sys, double omega_p, double ratio,
                         bool check_step = true, Trajectory* keep = nullptr);

struct CheckResult {
    std::string name;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    bool skipped = false;
    std::string note;
};

struct OracleReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

// Default tolerances of the oracle suite.
inline constexpr double kCorrOracleRelTol = 1e-6;
inline constexpr double kKernelOracleAbsTol = 1e-6;
inline constexpr double kGmeOracleRelTol = 0.05;

OracleReport oracle_check(const JobConfig& cfg);
void print_report(const OracleReport& r, std::ostream& os);

} // namespace qtrans
