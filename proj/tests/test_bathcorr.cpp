#include <doctest.h>

#include "qtrans/bathcorr.hpp"
#include "qtrans/error.hpp"
#include "qtrans/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace qtrans;

namespace {

const StructuredEffective fig2{0.016, 1.0, kPi * 0.05}; // omega = 1, g = 0.2, kappa = 0.05
const Thermal T1(1.0);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_CASE("closed-form coefficients")
{
    const auto p = corr_params(fig2, T1);
    CHECK(p.x_rate == doctest::Approx(0.100530964914873).epsilon(1e-13));
    CHECK(p.omega_bar == doctest::Approx(0.987585940056498).epsilon(1e-13));
    CHECK(p.n_coef == doctest::Approx(3.06405661160517).epsilon(1e-12));

    // N ~ omega / (2 gamma) as gamma -> 0
    const auto q = corr_params(StructuredEffective{0.016, 1.0, 1e-4}, T1);
    CHECK(q.n_coef * 2e-4 == doctest::Approx(1.0).epsilon(1e-6));

    // beta omega_bar = 50: hyperbolic ratio -> 1, L / (pi alpha) -> N up to the bounded sin term
    const Thermal cold(p.omega_bar / 50.0);
    const auto c = corr_params(fig2, cold);
    const double sin_term = std::sin(fig2.gamma / cold.temperature()) * 2.0 * std::exp(-50.0);
    CHECK(std::abs(c.l_coef / (kPi * fig2.alpha) - c.n_coef) <= std::abs(sin_term) + 1e-12);

    CHECK_THROWS_AS(corr_params(StructuredEffective{0.016, 1.0, 1.0}, T1), ParameterError);
}

TEST_CASE("Matsubara series")
{
    CHECK(q_matsubara(fig2, T1, 0.0) == 0.0);
    // 10^6 terms, summed smallest first
    const double brute = q_matsubara_partial(fig2, T1, 1.0, 1000000);
    CHECK(std::abs(q_matsubara(fig2, T1, 1.0) - brute) <= 1e-10);
    CHECK(brute == doctest::Approx(2.029003549414345e-05).epsilon(1e-9));
    double prev = 0.0;
    for (std::size_t n = 1; n <= 40; ++n) {
        const double s = q_matsubara_partial(fig2, T1, 3.0, n);
        CHECK(s >= prev);
        prev = s;
    }
}

TEST_CASE("closed form against independent references")
{
    const auto p = corr_params(fig2, T1);
    const QValue q0 = q_structured(p, T1, 0.0);
    CHECK(std::abs(q0.real) <= 1e-15);
    CHECK(std::abs(q0.imag) <= 1e-15);

    // arbitrary-precision quadrature of the defining integral
    QValue q = q_structured(p, T1, 1.0);
    CHECK(rel(q.real, 0.158695283971892) <= 1e-9);
    CHECK(rel(q.imag, 0.136477493371085) <= 1e-9);
    q = q_structured(p, T1, 5.0);
    CHECK(rel(q.real, 0.852778196623267) <= 1e-9);
    CHECK(rel(q.imag, -0.0233031461480155) <= 1e-8);

    for (double t : {0.5, 2.0, 5.0, 10.0}) {
        const QValue a = q_structured(p, T1, t);
        const QValue b = q_quadrature(fig2, T1, t);
        CHECK(rel(a.real, b.real) <= 1e-6);
        CHECK(rel(a.imag, b.imag) <= 1e-6);
    }
}

TEST_CASE("asymptotic imaginary part")
{
    for (double om : {0.5, 1.0, 1.5}) {
        const auto b = effective_bath({om, 0.2, 0.05});
        const auto p = corr_params(b, T1);
        const double pa = kPi * b.alpha;
        const double t = 10.0 / b.gamma;
        const double err = std::abs(q_structured(p, T1, t).imag - pa);
        CHECK(err <= (1.0 + p.n_coef) * pa * std::exp(-b.gamma * t));
        CHECK(err <= 1e-4 * pa);
    }
}

TEST_CASE("linearity in alpha")
{
    const StructuredEffective twice{2.0 * fig2.alpha, fig2.omega, fig2.gamma};
    const auto p1 = corr_params(fig2, T1);
    const auto p2 = corr_params(twice, T1);
    for (double t : {0.3, 4.0, 40.0}) {
        CHECK(q_structured(p2, T1, t).real == doctest::Approx(2.0 * q_structured(p1, T1, t).real).epsilon(1e-14));
        CHECK(q_structured(p2, T1, t).imag == doctest::Approx(2.0 * q_structured(p1, T1, t).imag).epsilon(1e-14));
        CHECK(q_matsubara(twice, T1, t) == doctest::Approx(2.0 * q_matsubara(fig2, T1, t)).epsilon(1e-14));
    }
}

TEST_CASE("Ohmic bath quadrature")
{
    const OhmicExpCutoff o{0.1, 10.0};
    // Gamma-function form, checked against arbitrary precision
    CHECK(rel(q_ohmic_exact(o, T1, 0.5).real, 0.393296547861901) <= 1e-11);
    CHECK(rel(q_ohmic_exact(o, T1, 3.0).real, 1.91362201503707) <= 1e-11);
    CHECK(rel(q_ohmic_exact(o, T1, 20.0).real, 12.5195254503539) <= 1e-11);
    for (double t : {0.5, 3.0, 20.0}) {
        const QValue a = q_quadrature(o, T1, t);
        const QValue b = q_ohmic_exact(o, T1, t);
        CHECK(rel(a.real, b.real) <= 1e-8);
        CHECK(rel(a.imag, b.imag) <= 1e-8);
    }
    // beta omega_c = 10^4
    const Thermal cold(1e-3);
    for (double t : {0.1, 1.0, 7.0})
        CHECK(std::abs(q_quadrature(o, cold, t).imag - 0.2 * std::atan(10.0 * t)) <= 1e-8);

    const QValue z = q_quadrature(o, T1, 0.0);
    CHECK(z.real == 0.0);
    CHECK(z.imag == 0.0);
    CHECK_THROWS_AS(q_quadrature(StrictOhmic{0.05}, T1, 1.0), ParameterError);
    CHECK_THROWS_AS(tabulate(StrictOhmic{0.05}, T1), ParameterError);
}

TEST_CASE("tabulation")
{
    const CorrTable tab = tabulate(fig2, T1);
    CHECK(tab.source() == CorrSource::ClosedForm);
    CHECK(tab.interp_error() <= 1e-8);
    // tail bound dominated by the linear term: -ln(1e-10) / X ~ 229
    CHECK(tab.t_max() > 200.0);
    CHECK(tab.t_max() < 240.0);
    const auto p = corr_params(fig2, T1);
    CHECK(q_structured(p, T1, tab.t_max()).real >= -std::log(1e-10) - 1e-6);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, tab.t_max());
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double t = u(rng);
        const QValue a = tab(t);
        const QValue b = q_structured(p, T1, t);
        worst = std::max({worst, std::abs(a.real - b.real), std::abs(a.imag - b.imag)});
    }
    CHECK(worst <= 1e-8);

    const auto s = tab.samples();
    REQUIRE(s.size() > 100);
    CHECK(s.front().t == 0.0);
    CHECK(s.front().q_real == 0.0);
    const double bound = kPi * fig2.alpha * (2.0 + p.n_coef);
    for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(s[i].t > s[i - 1].t);
        CHECK(s[i].q_real >= 0.0);
        CHECK(std::abs(s[i].q_imag) <= bound);
        // linear growth at slope X with a bounded oscillating offset
        CHECK(std::abs(s[i].q_real - p.x_rate * s[i].t) <= std::abs(p.l_coef) + std::abs(p.z_coef) + 0.1);
    }
    // The resonance makes Q' dip locally; arbitrary precision gives
    // Q'(5.5) = 0.828392705250547, Q'(6) = 0.823739827637401.
    CHECK(rel(tab(5.5).real, 0.828392705250547) <= 1e-8);
    CHECK(rel(tab(6.0).real, 0.823739827637401) <= 1e-8);

    std::ostringstream os;
    tab.write_csv(os);
    CHECK(os.str().rfind("t,q_real,q_imag\n", 0) == 0);
}

TEST_CASE("decoupled and near-critical tables")
{
    const CorrTable zero = tabulate(effective_bath({1.0, 0.0, 0.05}), T1);
    CHECK(zero.identically_zero());
    CHECK(zero.t_max() == 50.0);
    CHECK(zero(17.0).real == 0.0);

    // kappa = 0.3: gamma / omega ~ 0.94, closed form is ill-conditioned
    const auto b = effective_bath({1.0, 0.2, 0.3});
    const CorrTable tab = tabulate(b, T1);
    CHECK(tab.source() == CorrSource::Quadrature);
    for (double t : {1.3, 7.7, 21.1}) {
        const QValue a = tab(t);
        const QValue r = q_quadrature(b, T1, t, 1e-12);
        CHECK(rel(a.real, r.real) <= 1e-6);
        CHECK(rel(a.imag, r.imag) <= 1e-6);
    }
}
