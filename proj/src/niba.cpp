#include "qtrans/niba.hpp"

#include "qtrans/error.hpp"
#include "qtrans/quadrature.hpp"

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

// Fastest oscillation of h+-(t) itself.
double kernel_frequency(const CorrTable& corr)
{
    if (const auto* s = std::get_if<StructuredEffective>(&corr.spec()))
        return std::sqrt(std::max(0.0, s->omega * s->omega - s->gamma * s->gamma));
    return 0.0;
}

void require_decaying(const KernelFunctions& kf, const char* what)
{
    if (kf.decoupled())
        throw NumericError(std::string(what)
                           + ": kernel envelope does not decay for alpha = 0 (divergent integral); "
                             "treat the decoupled case analytically");
}

} // namespace

HValue h_pm(const CorrTable& corr, double delta, double t)
{
    const double d2 = delta * delta;
    if (corr.identically_zero())
        return {d2, 0.0, false};
    if (t > corr.t_max())
        return {0.0, 0.0, true};
    const QValue q = corr(t);
    const double env = d2 * std::exp(-q.real);
    return {env * std::cos(q.imag), env * std::sin(q.imag), false};
}

KernelFunctions::KernelFunctions(std::shared_ptr<const CorrTable> corr, double delta)
    : corr_(std::move(corr)), delta_(delta)
{
    if (!corr_)
        throw ParameterError("KernelFunctions needs a correlation table");
    if (!(delta_ > 0.0))
        throw ParameterError("delta must be > 0");
}

StaticKernels static_kernels(const KernelFunctions& kf, double eps0, const KernelOptions& opt)
{
    require_decaying(kf, "static_kernels");
    const double w = std::max(std::abs(eps0), kernel_frequency(kf.table()));
    const double panel = w > 0.0 ? kPi / w : kf.t_max();
    const auto br = quad::uniform_breaks(0.0, kf.t_max(), panel);

    auto f = [&](double t) -> quad::Vec<2> {
        const HValue h = kf(t);
        return {h.plus * std::cos(eps0 * t), h.minus * std::sin(eps0 * t)};
    };
    quad::Options qo;
    qo.abs_tol = opt.abs_tol * kf.delta() * kf.delta();
    const auto r = quad::integrate_panels<2>(f, br, qo);
    if (!r.converged)
        throw NumericError("static kernel quadrature did not converge (error " + num(r.max_error()) + ")");
    return {r.value[0], r.value[1]};
}

ResponseKernels response_kernels(const KernelFunctions& kf, double eps0, double eps_p, double omega_p,
                                 const KernelOptions& opt)
{
    if (!(omega_p > 0.0))
        throw ParameterError("probe frequency must be > 0, got " + num(omega_p));
    require_decaying(kf, "response_kernels");

    const double w = std::max({omega_p, std::abs(eps0), kernel_frequency(kf.table())});
    const auto br = quad::uniform_breaks(0.0, kf.t_max(), kPi / w);

    // e^{-i w t/2} sin(w t/2) = [sin(w t) - 2i sin^2(w t/2)] / 2
    auto f = [&](double t) -> quad::Vec<8> {
        const HValue h = kf(t);
        const double c0 = std::cos(eps0 * t);
        const double s0 = std::sin(eps0 * t);
        const double sw = std::sin(omega_p * t);
        const double cw = std::cos(omega_p * t);
        const double sh = std::sin(0.5 * omega_p * t);
        const double one_minus_cos = 2.0 * sh * sh;
        const double hp_c = h.plus * c0;
        const double hp_s = h.plus * s0;
        const double hm_c = h.minus * c0;
        return {
            hp_c,                    // k0+
            h.minus * s0,            // k0-
            hm_c * sw,               // 2 omega_p k1-/eps_p, real
            -hm_c * one_minus_cos,   // 2 omega_p k1-/eps_p, imag
            -hp_s * sw,              // 2 omega_p k1+/eps_p, real
            hp_s * one_minus_cos,    // 2 omega_p k1+/eps_p, imag
            hp_c * cw,               // v+, real
            -hp_c * sw,              // v+, imag
        };
    };
    quad::Options qo;
    qo.abs_tol = opt.abs_tol * kf.delta() * kf.delta();
    const auto r = quad::integrate_panels<8>(f, br, qo);
    if (!r.converged)
        throw NumericError("response kernel quadrature did not converge at omega_p = " + num(omega_p)
                           + " (error " + num(r.max_error()) + ")");

    ResponseKernels rk;
    rk.eps0 = eps0;
    rk.eps_p = eps_p;
    rk.omega_p = omega_p;
    rk.k0_plus = r.value[0];
    rk.k0_minus = r.value[1];
    const double scale = 0.5 / omega_p;
    rk.k1_minus_unit = scale * cplx(r.value[2], r.value[3]);
    rk.k1_plus_unit = scale * cplx(r.value[4], r.value[5]);
    rk.v_plus = cplx(r.value[6], r.value[7]);
    return rk;
}

cplx susceptibility(const ResponseKernels& rk)
{
    const cplx denom = cplx(0.0, rk.omega_p) + rk.v_plus;
    if (std::abs(denom) < kDenominatorFloor)
        throw NumericError("response denominator i omega_p + v+ vanishes at omega_p = " + num(rk.omega_p));
    cplx numer = rk.k1_minus_unit;
    if (rk.eps0 != 0.0) {
        if (rk.k0_plus == 0.0)
            throw NumericError("k0+ vanishes: singular ratio k0- / k0+ in the biased response");
        numer -= rk.k1_plus_unit * (rk.k0_minus / rk.k0_plus);
    }
    return numer / denom;
}

ComplexResponse transmission(cplx chi, double omega_p, double n_factor)
{
    ComplexResponse out;
    out.chi = chi;
    out.transmission = 1.0 - cplx(0.0, n_factor * omega_p) * chi;
    out.t_abs2 = std::norm(out.transmission);
    return out;
}

ComplexResponse probe_response(const KernelFunctions& kf, const SystemParams& sys, double omega_p,
                               const KernelOptions& opt)
{
    sys.validate();
    if (!(omega_p > 0.0))
        throw ParameterError("probe frequency must be > 0, got " + num(omega_p));
    if (kf.decoupled())
        return transmission(cplx{}, omega_p, sys.n_factor);
    const ResponseKernels rk = response_kernels(kf, sys.eps0, sys.eps_p, omega_p, opt);
    return transmission(susceptibility(rk), omega_p, sys.n_factor);
}

} // namespace qtrans
