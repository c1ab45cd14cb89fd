#pragma once

// Bath correlation function Q(t) = Q'(t) + i Q''(t).
//
//   Q(t) = int_0^inf dw G(w)/w^2 [coth(beta w / 2)(1 - cos w t) + i sin w t]
//
// For the structured bath Q has a closed form (damped-oscillator terms plus
// a Matsubara series); any UV-convergent bath can also go through direct
// quadrature of the integral above. CorrTable caches Q on a piecewise
// uniform grid for the kernel integrals.

#include "qtrans/model.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace qtrans {

struct QValue {
    double real = 0.0;
    double imag = 0.0;
};

/// Coefficients of the closed form for the structured bath.
struct CorrParams {
    double x_rate = 0.0;    // 2 pi alpha T, asymptotic slope of Q'
    double omega_bar = 0.0; // sqrt(omega^2 - gamma^2)
    double n_coef = 0.0;
    double l_coef = 0.0;
    double z_coef = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;
    double omega = 0.0;
};

CorrParams corr_params(const StructuredEffective& spec, const Thermal& thermal);

inline constexpr double kMatsubaraRelTol = 1e-12;

/// Matsubara part of Q'(t) for the structured bath. Summation stops once
/// n * term_n <= tol * sum (and n >= 4); the terms fall off at least as
/// n^-4, so the dropped tail stays below tol * sum / 3.
double q_matsubara(const StructuredEffective& spec, const Thermal& thermal, double t,
                   double tol = kMatsubaraRelTol);

// Partial sum with exactly `terms` terms.
double q_matsubara_partial(const StructuredEffective& spec, const Thermal& thermal, double t,
                           std::size_t terms);

QValue q_structured(const CorrParams& params, const Thermal& thermal, double t,
                    double mats_tol = kMatsubaraRelTol);

/// Q(t) by adaptive quadrature of the defining integral. Throws
/// ParameterError for StrictOhmic (UV divergent) and NumericError if the
/// tolerance is not reached.
QValue q_quadrature(const BathSpec& spec, const Thermal& thermal, double t, double abs_tol = 1e-9);

// Closed forms are used while gamma / omega stays below this; closer to
// critical damping the N sin(omega_bar t) term cancels catastrophically and
// tabulation switches to quadrature.
inline constexpr double kClosedFormGammaRatio = 0.9;

enum class CorrSource { Zero, ClosedForm, Quadrature };
const char* to_string(CorrSource s);

struct TabulateOptions {
    double tol_tail = 1e-10;     // envelope exp(-Q') at t_max
    double interp_tol = 1e-8;    // max abs interpolation error of Q', Q''
    double omega_p_max = 2.0;    // highest probe frequency to be resolved
    double default_t_max = 50.0; // used when Q vanishes identically
    double t_max_cap = 1e6;
    double quad_abs_tol = 1e-10; // for the quadrature source
};

struct CorrSample {
    double t = 0.0;
    double q_real = 0.0;
    double q_imag = 0.0;
};

/// Q(t) tabulated on [0, t_max] with local cubic interpolation.
/// Immutable after construction.
class CorrTable {
public:
    struct Segment {
        double t0 = 0.0;
        double step = 0.0;
        std::vector<double> q_real; // samples at t0 + i * step, both ends included
        std::vector<double> q_imag;
    };

    CorrTable() = default;
    CorrTable(BathSpec spec, double temperature, double t_max, double tol_tail,
              double interp_error, CorrSource source, std::vector<Segment> segments);

    const BathSpec& spec() const { return spec_; }
    double temperature() const { return temperature_; }
    double t_max() const { return t_max_; }
    double tol_tail() const { return tol_tail_; }
    double interp_error() const { return interp_error_; }
    CorrSource source() const { return source_; }
    const std::vector<Segment>& segments() const { return segments_; }
    bool identically_zero() const { return source_ == CorrSource::Zero; }

    // Requires 0 <= t <= t_max.
    QValue operator()(double t) const;

    std::vector<CorrSample> samples() const;
    std::size_t size() const;

    // CSV with header t,q_real,q_imag.
    void write_csv(std::ostream& os) const;

private:
    BathSpec spec_{StructuredEffective{}};
    double temperature_ = 1.0;
    double t_max_ = 0.0;
    double tol_tail_ = 0.0;
    double interp_error_ = 0.0;
    CorrSource source_ = CorrSource::Zero;
    std::vector<Segment> segments_;
};

/// Direct evaluator of Q for a bath: closed form when available and well
/// conditioned, quadrature otherwise.
std::function<QValue(double)> make_evaluator(const BathSpec& spec, const Thermal& thermal,
                                             double quad_abs_tol, CorrSource* source = nullptr);

CorrTable tabulate(const BathSpec& spec, const Thermal& thermal, const TabulateOptions& opt = {});

} // namespace qtrans
