#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nqlab/errors.hpp"
#include "nqlab/semiclassics.hpp"

using namespace nqlab;

TEST_CASE("logarithmic orbit conserves energy and has the closed-form period") {
    ClassicalOrbit o;
    o.E = std::log(60.0);
    CHECK(o.period() == doctest::Approx(2.0 * std::numbers::pi * 60.0));
    CHECK(o.amplitude() == doctest::Approx(std::sqrt(std::numbers::pi / 2.0) * 60.0));
    CHECK(classical_x_of_t(o, 0.0) == doctest::Approx(o.amplitude()));
    CHECK(classical_x_of_t(o, 0.5 * o.period()) == doctest::Approx(-o.amplitude()));
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        // Sample times avoid t = T/4 exactly, where x = 0 and U diverges.
        const double t = (k + 0.37) * o.period() / 100.0, h = 1e-5;
        const double v = (classical_x_of_t(o, t + h) - classical_x_of_t(o, t - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(0.5 * v * v + o.potential(classical_x_of_t(o, t)) - o.E));
        CHECK(std::abs(classical_v_of_t(o, t)) == doctest::Approx(std::abs(v)).epsilon(1e-4));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("Fourier matrix elements of a harmonic orbit") {
    const double w = 1.3, b = 2.0;
    auto x = [&](double t) { return b * std::cos(w * t); };
    const double T = 2.0 * std::numbers::pi / w;
    auto id = [](double v) { return v; };
    CHECK(std::abs(fourier_matrix_element(x, T, id, 0)) < 1e-10);
    CHECK(std::abs(fourier_matrix_element(x, T, id, 1)) == doctest::Approx(b / 2.0).epsilon(1e-9));
    CHECK(std::abs(fourier_matrix_element(x, T, id, 2)) < 1e-10);
    auto sq = [](double v) { return v * v; };
    CHECK(fourier_matrix_element(x, T, sq, 0) == doctest::Approx(b * b / 2.0).epsilon(1e-9));
    CHECK(std::abs(fourier_matrix_element(x, T, sq, 2)) == doctest::Approx(b * b / 4.0).epsilon(1e-9));
}

TEST_CASE("log-potential Fourier elements follow the 1/dn law with alternating signs") {
    for (int dn : {2, 4, 6, 10, 20}) {
        const auto o = orbit_for_levels(60, 60 + dn);
        const double v = fourier_matrix_element(o, [&](double x) { return o.potential(x); }, dn);
        const double est = offdiag_estimate(60, 60 + dn);
        CAPTURE(dn);
        CHECK(v * est > 0);
        CHECK(std::abs(v) == doctest::Approx(std::abs(est)).epsilon(0.30));
    }
    const auto o = orbit_for_levels(60, 60);
    CHECK(fourier_matrix_element(o, [&](double x) { return o.potential(x); }, 0) ==
          doctest::Approx(diag_virial(60)).epsilon(1e-6));
    CHECK(diag_virial(60) == doctest::Approx(std::log(60.0) - 0.5));
    CHECK(std::abs(fourier_matrix_element(o, [](double) { return 1.0; }, 4)) < 1e-10);
    CHECK(std::abs(offdiag_estimate(60, 64)) == doctest::Approx(0.25));
}

TEST_CASE("quadrature refinement limit") {
    const auto o = orbit_for_levels(60, 80);
    CHECK_THROWS_AS(fourier_matrix_element(o, [&](double x) { return o.potential(x); }, 20, 1e-14, 4), RefinementError);
}

TEST_CASE("amplitude fit from data") {
    std::vector<int> dn{-6, -4, 4, 6, 8};
    std::vector<double> v;
    for (int d : dn) v.push_back(0.8 * offdiag_estimate(60, 60 + d));
    CHECK(fit_amplitude_A(dn, v) == doctest::Approx(0.8));
    CHECK_THROWS_AS(fit_amplitude_A(std::vector<int>{4}, std::vector<double>{0.2}), DomainError);
}

TEST_CASE("energy conventions") {
    const auto mid = orbit_for_levels(10, 20, 1.0, EnergyConvention::Midpoint);
    const auto row = orbit_for_levels(10, 20, 1.0, EnergyConvention::Row);
    CHECK(row.E == doctest::Approx(std::log(10.0)));
    CHECK(mid.E > row.E);
    CHECK(mid.E < std::log(20.0));
}
