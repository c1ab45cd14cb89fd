#include "qtrans/model.hpp"

#include "qtrans/error.hpp"

#include <cmath>
#include <cstdio>
#include <type_traits>

namespace qtrans {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

void SystemParams::validate() const
{
    if (!(delta > 0.0))
        throw ParameterError("delta must be > 0, got " + fmt_double(delta));
    if (!(eps_p >= 0.0))
        throw ParameterError("eps_p must be >= 0, got " + fmt_double(eps_p));
    if (!std::isfinite(eps0))
        throw ParameterError("eps0 must be finite");
    if (!(n_factor >= 0.0))
        throw ParameterError("n_factor must be >= 0, got " + fmt_double(n_factor));
}

bool probe_is_weak(double eps_p, double omega_p)
{
    return eps_p <= 0.1 * omega_p;
}

void ResonatorParams::validate() const
{
    if (!(omega > 0.0))
        throw ParameterError("resonator omega must be > 0, got " + fmt_double(omega));
    if (!(g >= 0.0))
        throw ParameterError("g must be >= 0, got " + fmt_double(g));
    if (!(kappa >= 0.0))
        throw ParameterError("kappa must be >= 0, got " + fmt_double(kappa));
    if (!(kappa < kKappaBound))
        throw ParameterError("kappa must satisfy kappa < 1/pi ~ 0.3183 (underdamped resonator), got "
                             + fmt_double(kappa));
}

void validate(const BathSpec& spec)
{
    std::visit(overloaded{
                   [](const StructuredEffective& s) {
                       if (!(s.alpha >= 0.0))
                           throw ParameterError("alpha must be >= 0");
                       if (!(s.omega > 0.0))
                           throw ParameterError("structured bath omega must be > 0");
                       // gamma = 0 (kappa = 0) is allowed only together with alpha = 0.
                       if (!(s.gamma > 0.0) && !(s.gamma == 0.0 && s.alpha == 0.0))
                           throw ParameterError("structured bath gamma must be > 0");
                       if (!(s.gamma < s.omega))
                           throw ParameterError("structured bath requires gamma < omega (underdamped)");
                   },
                   [](const OhmicExpCutoff& s) {
                       if (!(s.alpha >= 0.0))
                           throw ParameterError("alpha must be >= 0");
                       if (!(s.omega_c > 0.0))
                           throw ParameterError("omega_c must be > 0");
                   },
                   [](const StrictOhmic& s) {
                       if (!(s.kappa > 0.0))
                           throw ParameterError("strict Ohmic kappa must be > 0");
                   },
               },
               spec);
}

double coupling_alpha(const BathSpec& spec)
{
    return std::visit(overloaded{
                          [](const StructuredEffective& s) { return s.alpha; },
                          [](const OhmicExpCutoff& s) { return s.alpha; },
                          [](const StrictOhmic& s) { return 0.5 * s.kappa; },
                      },
                      spec);
}

std::string describe(const BathSpec& spec)
{
    return std::visit(overloaded{
                          [](const StructuredEffective& s) {
                              return "structured(alpha=" + fmt_double(s.alpha) + ", omega="
                                     + fmt_double(s.omega) + ", gamma=" + fmt_double(s.gamma) + ")";
                          },
                          [](const OhmicExpCutoff& s) {
                              return "ohmic(alpha=" + fmt_double(s.alpha) + ", omega_c="
                                     + fmt_double(s.omega_c) + ")";
                          },
                          [](const StrictOhmic& s) {
                              return "strict_ohmic(kappa=" + fmt_double(s.kappa) + ")";
                          },
                      },
                      spec);
}

Thermal::Thermal(double temperature) : temperature_(temperature)
{
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw ParameterError("temperature must be finite and > 0 (zero temperature is not supported), got "
                             + fmt_double(temperature));
}

StructuredEffective effective_bath(const ResonatorParams& res)
{
    res.validate();
    StructuredEffective out;
    out.alpha = 8.0 * res.kappa * res.g * res.g / (res.omega * res.omega);
    out.omega = res.omega;
    out.gamma = kPi * res.kappa * res.omega;
    return out;
}

double spectral_density(const BathSpec& spec, double omega)
{
    if (omega <= 0.0 || coupling_alpha(spec) == 0.0)
        return 0.0;
    return std::visit(overloaded{
                          [omega](const StructuredEffective& s) {
                              const double o2 = s.omega * s.omega;
                              const double d = o2 - omega * omega;
                              const double w = 2.0 * s.gamma * omega;
                              return 2.0 * s.alpha * omega * o2 * o2 / (d * d + w * w);
                          },
                          [omega](const OhmicExpCutoff& s) {
                              return 2.0 * s.alpha * omega * std::exp(-omega / s.omega_c);
                          },
                          [omega](const StrictOhmic& s) { return s.kappa * omega; },
                      },
                      spec);
}

double van_vleck_shift(double delta, double omega, double g)
{
    return g * g / (delta + omega);
}

double van_vleck_shift_unsimplified(double delta, double omega, double g)
{
    return g * g * delta * delta / (delta * delta * (delta + omega));
}

RabiSpectrum rabi_spectrum(double delta, double omega, double g)
{
    const double f = van_vleck_shift(delta, omega, g);
    const double detune = delta - omega + 2.0 * f;
    const double root = std::sqrt(detune * detune + 4.0 * g * g);

    RabiSpectrum s;
    s.w0 = -0.5 * delta - f;
    s.w1 = 0.5 * omega - f - 0.5 * root;
    s.w2 = 0.5 * omega - f + 0.5 * root;
    s.w10 = s.w1 - s.w0;
    s.w20 = s.w2 - s.w0;
    s.perturbative = g <= 0.5 * std::min(delta, omega);
    return s;
}

double renormalized_splitting(double delta, double alpha, double omega_c)
{
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw ParameterError("renormalized splitting requires 0 <= alpha < 1, got " + fmt_double(alpha));
    return delta * std::pow(delta / omega_c, alpha / (1.0 - alpha));
}

double delta_T(double delta, double alpha, double omega_c, const Thermal& thermal)
{
    const double dr = renormalized_splitting(delta, alpha, omega_c);
    return dr * std::pow(thermal.nu1() / dr, alpha);
}

} // namespace qtrans
