#pragma once

// Parameter sweeps of |T(omega_p)|^2 and dip detection on line cuts.

#include "qtrans/bathcorr.hpp"
#include "qtrans/niba.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtrans {

enum class AxisName { Omega, OmegaP, G, Alpha, Kappa, Temperature };
enum class Spacing { Linear, Log };

const char* to_string(AxisName a);
std::optional<AxisName> axis_from_string(std::string_view s);

struct Axis {
    AxisName name = AxisName::OmegaP;
    double min = 0.6;
    double max = 1.6;
    std::size_t count = 200;
    Spacing spacing = Spacing::Linear;

    std::vector<double> values() const;
};

enum class BathKind { Structured, Ohmic };

/// Values of every parameter that is not swept.
struct FixedParams {
    BathKind bath = BathKind::Structured;
    double delta = 1.0;
    double omega = 1.2;
    double g = 0.2;
    double kappa = 0.05;
    double alpha = 0.1; // Ohmic bath only; the structured alpha follows from omega, g, kappa
    double omega_c = 10.0;
    double temperature = 1.0;
    double eps0 = 0.0;
    double eps_p = 1e-3;
    double n_factor = 0.1;
    double omega_p = 1.0;
};

/// Up to two axes, outermost first. Axes with count 1 are single values.
struct SweepGrid {
    std::vector<Axis> axes;
    FixedParams fixed;

    void validate() const;
    std::size_t size() const;
};

/// Physical parameters of one grid point.
struct PointParams {
    SystemParams sys;
    BathSpec bath{StructuredEffective{}};
    double temperature = 1.0;
    double omega_p = 1.0;
};

PointParams resolve_point(const FixedParams& fixed, std::span<const AxisName> names, std::span<const double> values);

struct SweepRow {
    std::vector<double> axis_values;
    double alpha = 0.0; // effective coupling at this point
    cplx transmission{1.0, 0.0};
    double t_abs2 = 1.0;
    bool valid = true;
    std::string error;
};

struct Dip {
    double center = 0.0;     // parabolic refinement
    double value = 0.0;      // |T|^2 at the refined center
    double depth = 0.0;      // 1 - value
    double prominence = 0.0;
    double width = 0.0;      // full width at half prominence
};

struct LineDips {
    double outer_value = 0.0; // value of the outer axis on this cut (0 for 1-D jobs)
    std::vector<Dip> dips;
};

struct SweepMeta {
    double tol_tail = 0.0;
    double interp_tol = 0.0;
    double kernel_tol = 0.0;
    double dip_prominence = 0.0;
    std::size_t workers = 1;
    std::size_t tables = 0;
    double wall_seconds = 0.0;
};

struct SweepResult {
    SweepGrid grid;
    std::vector<SweepRow> rows; // row-major, first axis outermost
    std::vector<LineDips> dips; // one per omega_p line cut with >= 32 points
    SweepMeta meta;
};

inline constexpr double kDipProminence = 0.005;
inline constexpr std::size_t kMinDipPoints = 32;

struct SweepOptions {
    std::size_t workers = 0; // 0: QTRANS_WORKERS or hardware concurrency
    bool cache_tables = true;
    TabulateOptions tabulate;
    KernelOptions kernel;
    double dip_prominence = kDipProminence;
};

std::size_t default_workers();

SweepResult run_sweep(const SweepGrid& grid, const SweepOptions& opt = {});

/// Interior local minima of y(x) with topographic prominence >= min_prominence.
/// Plateaus count once, at their lowest-x sample. x must be increasing and
/// hold at least kMinDipPoints samples.
std::vector<Dip> detect_dips(std::span<const double> x, std::span<const double> y,
                             double min_prominence = kDipProminence);

} // namespace qtrans
