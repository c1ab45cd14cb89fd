#pragma once

// Parameter types and closed-form model quantities.
//
// Units: hbar = k_B = 1. Every frequency is an angular frequency and the
// qubit splitting delta is the natural unit (delta = 1 in all defaults).

#include <string>
#include <variant>

namespace qtrans {

inline constexpr double kPi = 3.14159265358979323846;

struct SystemParams {
    double delta = 1.0;     // bare qubit splitting
    double eps0 = 0.0;      // static bias
    double eps_p = 1e-3;    // probe amplitude
    double n_factor = 0.1;  // transmission-line ratio f / f_Z

    void validate() const;
};

// Linear response needs eps_p / omega_p << 1; we flag eps_p > 0.1 omega_p.
bool probe_is_weak(double eps_p, double omega_p);

struct ResonatorParams {
    double omega = 1.0;  // resonator frequency
    double g = 0.2;      // qubit-resonator coupling
    double kappa = 0.05; // resonator-bath coupling

    void validate() const;
};

// kappa must stay below this so that the resonator is underdamped.
inline constexpr double kKappaBound = 1.0 / kPi;

/// Effective spectral density of the qubit after eliminating a damped
/// resonator: Ohmic at low frequency with a Lorentzian peak at `omega`
/// of semi-width `gamma`.
struct StructuredEffective {
    double alpha = 0.0;
    double omega = 1.0;
    double gamma = 0.0;
};

/// G(w) = 2 alpha w exp(-w / omega_c).
struct OhmicExpCutoff {
    double alpha = 0.0;
    double omega_c = 10.0;
};

/// G(w) = kappa w with no cutoff. Describes the resonator's own bath; it is
/// UV divergent and every correlation evaluator rejects it.
struct StrictOhmic {
    double kappa = 0.0;
};

using BathSpec = std::variant<StructuredEffective, OhmicExpCutoff, StrictOhmic>;

void validate(const BathSpec& spec);
double coupling_alpha(const BathSpec& spec);
std::string describe(const BathSpec& spec);

class Thermal {
public:
    explicit Thermal(double temperature);

    double temperature() const { return temperature_; }
    double beta() const { return 1.0 / temperature_; }
    // First Matsubara frequency 2 pi T.
    double nu1() const { return 2.0 * kPi * temperature_; }

private:
    double temperature_;
};

// alpha = 8 kappa g^2 / omega^2, gamma = pi kappa omega.
StructuredEffective effective_bath(const ResonatorParams& res);

double spectral_density(const BathSpec& spec, double omega);

struct RabiSpectrum {
    double w0 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double w10 = 0.0;
    double w20 = 0.0;
    // false when g > 0.5 min(delta, omega): the perturbative result is
    // only valid for g << delta, omega.
    bool perturbative = true;
};

// Second-order shift f(omega) = g^2 / (delta + omega).
double van_vleck_shift(double delta, double omega, double g);
// The same shift written as g^2 delta^2 / (delta^2 (delta + omega)).
double van_vleck_shift_unsimplified(double delta, double omega, double g);

/// Ground and first two excited levels of the unbiased Rabi model from
/// Van Vleck perturbation theory in g.
RabiSpectrum rabi_spectrum(double delta, double omega, double g);

// Zero-temperature renormalized splitting delta (delta / omega_c)^(alpha / (1 - alpha)).
double renormalized_splitting(double delta, double alpha, double omega_c);

/// Temperature-renormalized splitting of an Ohmic qubit,
/// delta_r (nu1 / delta_r)^alpha. Requires 0 <= alpha < 1.
double delta_T(double delta, double alpha, double omega_c, const Thermal& thermal);

} // namespace qtrans
