#include <doctest.h>

#include "qtrans/error.hpp"
#include "qtrans/model.hpp"

#include <cmath>

using namespace qtrans;

TEST_CASE("effective bath couplings")
{
    auto b = effective_bath({1.0, 0.2, 0.05});
    CHECK(b.alpha == doctest::Approx(0.016).epsilon(1e-14));
    CHECK(b.gamma == doctest::Approx(0.15707963267948966).epsilon(1e-14));
    CHECK(b.omega == 1.0);

    b = effective_bath({0.5, 0.2, 0.05});
    CHECK(b.alpha == doctest::Approx(0.064).epsilon(1e-14));
    CHECK(b.gamma == doctest::Approx(0.07853981633974483).epsilon(1e-14));

    CHECK(effective_bath({1.0, 0.0, 0.05}).alpha == 0.0);

    // quadratic in g
    const double a1 = effective_bath({1.3, 0.11, 0.07}).alpha;
    const double a2 = effective_bath({1.3, 0.22, 0.07}).alpha;
    CHECK(a2 == doctest::Approx(4.0 * a1).epsilon(1e-15));
}

TEST_CASE("resonator invariants")
{
    CHECK_THROWS_AS(effective_bath({1.0, 0.2, 0.4}), ParameterError);
    CHECK_THROWS_AS(effective_bath({1.0, 0.2, kKappaBound}), ParameterError);
    CHECK_NOTHROW(effective_bath({1.0, 0.2, 0.318}));
    CHECK_THROWS_AS(effective_bath({0.0, 0.2, 0.05}), ParameterError);
    CHECK_THROWS_AS(effective_bath({1.0, -0.1, 0.05}), ParameterError);
    // kappa = 0 decouples the resonator
    CHECK_NOTHROW(validate(BathSpec{effective_bath({1.0, 0.2, 0.0})}));
    CHECK_THROWS_AS(validate(BathSpec{StructuredEffective{0.1, 1.0, 0.0}}), ParameterError);
    CHECK_THROWS_AS(validate(BathSpec{StructuredEffective{0.1, 1.0, 1.2}}), ParameterError);
    CHECK_THROWS_AS(Thermal(0.0), ParameterError);
    CHECK_THROWS_AS(Thermal(-1.0), ParameterError);
    CHECK_THROWS_AS((SystemParams{0.0, 0.0, 1e-3, 0.1}.validate()), ParameterError);
    CHECK_THROWS_AS((SystemParams{1.0, 0.0, -1e-3, 0.1}.validate()), ParameterError);
}

TEST_CASE("weak probe flag")
{
    CHECK(probe_is_weak(0.01, 1.0));
    CHECK(probe_is_weak(0.1, 1.0));
    CHECK_FALSE(probe_is_weak(0.2, 1.0));
}

TEST_CASE("spectral densities")
{
    const BathSpec s = StructuredEffective{0.016, 1.0, 0.15707963267948966};
    const double a = 0.016, g = 0.15707963267948966;
    CHECK(spectral_density(s, 1.0) == doctest::Approx(a / (2.0 * g * g)).epsilon(1e-14));
    CHECK(spectral_density(s, 1.0) == doctest::Approx(0.32423).epsilon(1e-5));
    CHECK(spectral_density(s, 0.0) == 0.0);
    CHECK(spectral_density(OhmicExpCutoff{0.1, 10.0}, 0.0) == 0.0);
    CHECK(spectral_density(OhmicExpCutoff{0.1, 10.0}, 1.0) == doctest::Approx(0.2 * std::exp(-0.1)).epsilon(1e-14));
    CHECK(spectral_density(OhmicExpCutoff{0.1, 10.0}, 1.0) == doctest::Approx(0.180967).epsilon(1e-6));
    CHECK(spectral_density(StrictOhmic{0.05}, 2.0) == doctest::Approx(0.1));
    CHECK(coupling_alpha(StrictOhmic{0.05}) == 0.025);

    // Ohmic at low frequency
    const double w = 1e-4;
    CHECK(spectral_density(s, w) / (2.0 * a * w) == doctest::Approx(1.0).epsilon(0.01));

    // The peak sits at omega - gamma^2 / (2 omega) to leading order.
    const double step = 1e-4;
    for (double gr : {0.05, 0.1, 0.15707963267948966, 0.2}) {
        const BathSpec b = StructuredEffective{0.016, 1.0, gr};
        double best = 0.0, at = 0.0;
        for (int i = 1; i < 30000; ++i) {
            const double v = spectral_density(b, i * step);
            if (v > best) {
                best = v;
                at = i * step;
            }
        }
        CHECK(std::abs(at - (1.0 - 0.5 * gr * gr)) <= step);
        CHECK(std::abs(at - 1.0) <= gr * gr);
    }
}

TEST_CASE("Van Vleck spectrum")
{
    SUBCASE("zero coupling, positive detuning")
    {
        const auto r = rabi_spectrum(1.0, 1.2, 0.0);
        CHECK(r.w10 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.w20 == doctest::Approx(1.2).epsilon(1e-15));
    }
    SUBCASE("degenerate crossing")
    {
        const auto r = rabi_spectrum(1.0, 1.0, 0.0);
        CHECK(r.w1 == doctest::Approx(0.5));
        CHECK(r.w2 == doctest::Approx(0.5));
    }
    SUBCASE("vacuum Rabi splitting")
    {
        const auto r = rabi_spectrum(1.0, 1.0, 0.2);
        const double f = 0.02;
        CHECK(std::abs((r.w2 - r.w1) - 2.0 * std::sqrt(f * f + 0.04)) <= 1e-12);
        CHECK(std::abs((r.w2 - r.w1) - 0.402) <= 5e-6); // 0.401995 to three digits
        CHECK(std::abs((r.w2 - r.w1) - 0.4) <= 0.01);
        CHECK(r.w0 == doctest::Approx(-0.5 - f));
        CHECK(r.perturbative);
    }
    SUBCASE("minimum splitting at resonance")
    {
        double best = 1e9, at = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double om = 0.5 + i * 5e-4;
            const auto r = rabi_spectrum(1.0, om, 0.05);
            if (r.w2 - r.w1 < best) {
                best = r.w2 - r.w1;
                at = om;
            }
        }
        // f shifts the crossing to delta - omega + 2f = 0, within a few grid steps of delta
        CHECK(std::abs(at - 1.0) < 6e-3);
    }
    CHECK_FALSE(rabi_spectrum(1.0, 1.0, 0.6).perturbative);
    CHECK(van_vleck_shift(1.0, 1.2, 0.2) == doctest::Approx(van_vleck_shift_unsimplified(1.0, 1.2, 0.2)).epsilon(1e-15));
    CHECK(van_vleck_shift(2.0, 0.7, 0.3) == doctest::Approx(van_vleck_shift_unsimplified(2.0, 0.7, 0.3)).epsilon(1e-15));
}

TEST_CASE("temperature-renormalized splitting")
{
    const Thermal th(1.0);
    CHECK(delta_T(1.0, 0.0, 10.0, th) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(renormalized_splitting(1.0, 0.1, 10.0) == doctest::Approx(0.774263682681127).epsilon(1e-12));
    CHECK(delta_T(1.0, 0.1, 10.0, th) == doctest::Approx(0.954592431724338).epsilon(1e-12));
    CHECK(delta_T(1.0, 0.3, 10.0, th) == doctest::Approx(0.869869213473056).epsilon(1e-12));
    double prev = 2.0;
    for (int i = 0; i <= 50; ++i) {
        const double v = delta_T(1.0, 0.01 * i, 10.0, th);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(delta_T(1.0, 1.0, 10.0, th), ParameterError);
    CHECK_THROWS_AS(renormalized_splitting(1.0, -0.1, 10.0), ParameterError);
}
