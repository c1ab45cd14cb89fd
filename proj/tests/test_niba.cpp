#include <doctest.h>

#include "qtrans/error.hpp"
#include "qtrans/niba.hpp"
#include "qtrans/oracle.hpp"

#include <cmath>
#include <memory>

using namespace qtrans;

namespace {

std::shared_ptr<const CorrTable> table_for(double omega, double g = 0.2, double kappa = 0.05)
{
    return std::make_shared<const CorrTable>(tabulate(effective_bath({omega, g, kappa}), Thermal(1.0)));
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("kernel functions")
{
    const KernelFunctions zero(table_for(1.0, 0.0), 1.3);
    for (double t : {0.0, 3.0, 400.0}) {
        CHECK(zero(t).plus == doctest::Approx(1.69));
        CHECK(zero(t).minus == 0.0);
    }
    CHECK(zero.decoupled());

    const auto tab = table_for(1.0);
    const KernelFunctions kf(tab, 1.0);
    CHECK(kf(0.0).plus == 1.0);
    CHECK(kf(0.0).minus == 0.0);
    const HValue past = kf(tab->t_max() + 1.0);
    CHECK(past.tail);
    CHECK(past.plus == 0.0);
    CHECK(past.minus == 0.0);

    // composition with Q from the quadrature oracle
    const QValue q = q_quadrature(effective_bath({1.0, 0.2, 0.05}), Thermal(1.0), 2.0, 1e-12);
    const HValue h = kf(2.0);
    CHECK(h.plus == doctest::Approx(std::exp(-q.real) * std::cos(q.imag)).epsilon(1e-6));
    CHECK(h.minus == doctest::Approx(std::exp(-q.real) * std::sin(q.imag)).epsilon(1e-6));
    for (double t = 0.0; t < tab->t_max(); t += 0.37) {
        const HValue v = kf(t);
        CHECK(std::hypot(v.plus, v.minus) <= std::exp(-(*tab)(t).real) * (1.0 + 1e-15));
    }
    CHECK_THROWS_AS(KernelFunctions(tab, 0.0), ParameterError);
}

TEST_CASE("static kernels")
{
    const KernelFunctions kf(table_for(1.0), 1.0);
    const auto s = static_kernels(kf, 0.0);
    CHECK(s.k0_minus == 0.0);
    const auto b = brute_force_kernels(kf, 0.0, 1e-3, 1.0, 2.0 * kPi / 512.0);
    CHECK(s.k0_plus == doctest::Approx(b.k0_plus).epsilon(1e-6));

    const auto sp = static_kernels(kf, 0.3);
    const auto sm = static_kernels(kf, -0.3);
    CHECK(sp.k0_minus == doctest::Approx(-sm.k0_minus).epsilon(1e-12));
    CHECK(sp.k0_plus == doctest::Approx(sm.k0_plus).epsilon(1e-12));

    const KernelFunctions zero(table_for(1.0, 0.0), 1.0);
    CHECK_THROWS_AS(static_kernels(zero, 0.0), NumericError);
    CHECK_THROWS_AS(response_kernels(zero, 0.0, 1e-3, 1.0), NumericError);
}

TEST_CASE("response kernels")
{
    const KernelFunctions kf(table_for(1.0), 1.0);
    const auto a = response_kernels(kf, 0.0, 1e-3, 1.0);
    CHECK(a.k0_minus == 0.0);
    CHECK(a.k1_plus() == cplx(0.0, 0.0));

    const auto b = response_kernels(kf, 0.0, 2e-3, 1.0);
    CHECK(b.k1_minus() == 2.0 * a.k1_minus());
    CHECK(b.v_plus == a.v_plus);

    // dense-grid oracle, relative per kernel
    for (double wp : {1.0, 0.7, 1.45}) {
        const auto r = response_kernels(kf, 0.0, 1e-3, wp);
        const auto o = brute_force_kernels(kf, 0.0, 1e-3, wp, 2.0 * kPi / std::max(wp, 1.0) / 512.0);
        CHECK(r.k0_plus == doctest::Approx(o.k0_plus).epsilon(1e-6));
        CHECK(rel(r.k1_minus_unit, o.k1_minus_unit) <= 1e-6);
        CHECK(rel(r.v_plus, o.v_plus) <= 1e-6);
    }
    // biased
    const auto rb = response_kernels(kf, 0.4, 1e-3, 1.1);
    const auto ob = brute_force_kernels(kf, 0.4, 1e-3, 1.1, 2.0 * kPi / 1.1 / 512.0);
    CHECK(rel(rb.k1_plus_unit, ob.k1_plus_unit) <= 1e-6);
    CHECK(rel(rb.k1_minus_unit, ob.k1_minus_unit) <= 1e-6);
    CHECK(rb.k0_minus == doctest::Approx(ob.k0_minus).epsilon(1e-6));

    // v+ -> k0+ as omega_p -> 0
    const auto lo = response_kernels(kf, 0.0, 1e-3, 1e-4);
    CHECK(lo.v_plus.real() == doctest::Approx(lo.k0_plus).epsilon(1e-6));
    CHECK(std::abs(lo.v_plus.imag()) <= 1e-4 * lo.k0_plus * 100.0);

    CHECK_THROWS_AS(response_kernels(kf, 0.0, 1e-3, 0.0), ParameterError);
    CHECK_THROWS_AS(response_kernels(kf, 0.0, 1e-3, -1.0), ParameterError);
}

TEST_CASE("susceptibility and transmission")
{
    const KernelFunctions kf(table_for(1.5), 1.0);
    SystemParams sys;
    const auto r1 = probe_response(kf, sys, 0.935);
    sys.eps_p *= 2.0;
    const auto r2 = probe_response(kf, sys, 0.935);
    CHECK(r1.chi == r2.chi);
    CHECK(r1.t_abs2 == r2.t_abs2);
    CHECK(r1.t_abs2 == std::norm(r1.transmission));
    // absorption near the single dip
    CHECK(r1.chi.imag() < 0.0);
    CHECK(r1.t_abs2 < 0.8);

    const KernelFunctions zero(table_for(1.0, 0.0), 1.0);
    const auto z = probe_response(zero, SystemParams{}, 1.0);
    CHECK(z.chi == cplx(0.0, 0.0));
    CHECK(z.t_abs2 == 1.0);
    const KernelFunctions zk(table_for(1.0, 0.2, 0.0), 1.0);
    CHECK(probe_response(zk, SystemParams{}, 1.0).t_abs2 == 1.0);

    CHECK(transmission(cplx(0.0, 0.0), 1.0, 0.1).t_abs2 == 1.0);
    CHECK(transmission(cplx(0.3, -2.0), 1.0, 0.0).transmission == cplx(1.0, 0.0));
    const double c = 0.5;
    CHECK(transmission(cplx(0.0, -c), 1.2, 0.1).t_abs2 == doctest::Approx((1.0 - 0.1 * 1.2 * c) * (1.0 - 0.1 * 1.2 * c)));
}

TEST_CASE("susceptibility edge cases")
{
    ResponseKernels rk;
    rk.omega_p = 1.0;
    rk.eps_p = 1e-3;
    rk.v_plus = cplx(0.0, -1.0); // cancels i omega_p
    CHECK_THROWS_AS(susceptibility(rk), NumericError);

    rk.v_plus = cplx(1.0, 0.0);
    rk.eps0 = 0.2;
    rk.k0_plus = 0.0;
    CHECK_THROWS_AS(susceptibility(rk), NumericError);

    rk.k0_plus = 2.0;
    rk.k0_minus = 0.5;
    rk.k1_minus_unit = cplx(0.3, 0.1);
    rk.k1_plus_unit = cplx(-0.2, 0.4);
    const cplx expect = (rk.k1_minus_unit - rk.k1_plus_unit * 0.25) / cplx(1.0, 1.0);
    CHECK(std::abs(susceptibility(rk) - expect) <= 1e-15);
}

TEST_CASE("non-Markovian denominator matters")
{
    const KernelFunctions kf(table_for(1.2), 1.0);
    const auto rk = response_kernels(kf, 0.0, 1e-3, 1.0);
    const cplx chi = susceptibility(rk);
    ResponseKernels markov = rk;
    markov.v_plus = cplx(rk.k0_plus, 0.0); // v+(0)
    const cplx chi_m = susceptibility(markov);
    CHECK(std::abs(chi - chi_m) / std::abs(chi) > 0.05);
}
