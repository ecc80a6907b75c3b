#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "nqlab/dynamics.hpp"
#include "nqlab/errors.hpp"
#include "oracles.hpp"

using namespace nqlab;

TEST_CASE("drive phase freezes inside silence windows") {
    Drive d;
    d.beta = 0.5;
    d.omega = 2.0;
    d.windows = {{10.0, 2.0}, {20.0, 1.0}};
    CHECK(d.phase(5.0) == doctest::Approx(10.0));
    CHECK(d.phase(11.0) == doctest::Approx(20.0));
    CHECK(d.phase(15.0) == doctest::Approx(26.0));
    CHECK(d.phase(30.0) == doctest::Approx(54.0));
    CHECK(d.amplitude(11.0) == 0.0);
    CHECK(d.amplitude(12.0) == doctest::Approx(0.5 * std::cos(20.0)));
    const auto b = d.breakpoints(25.0);
    CHECK(b == std::vector<double>{0.0, 10.0, 12.0, 20.0, 21.0, 25.0});
    Drive bad = d;
    bad.windows = {{10.0, 5.0}, {12.0, 1.0}};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    Drive env;
    env.beta = 2.0;
    env.envelope = {0.5, -1.0};
    env.envelope_dt = 1.0;
    CHECK(env.amplitude(0.3) == doctest::Approx(1.0));
    CHECK(env.amplitude(1.7) == doctest::Approx(-2.0));
    CHECK(env.amplitude(2.5) == 0.0);
    env.envelope = {1.5};
    CHECK_THROWS_AS(env.validate(), DomainError);
    CHECK(drive_form_from_string("parametric") == DriveForm::Parametric);
    CHECK_THROWS_AS(drive_form_from_string("cubic"), DomainError);
}

TEST_CASE("undriven evolution keeps eigenstate populations in both modes") {
    const auto& w = PrimeWell::get();
    Drive d;
    d.beta = 0.0;
    d.omega = 1.0;
    PropagationOptions o;
    o.tracked = {0, 1, 2};
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(60);
    psi0[0] = std::sqrt(0.5);
    psi0[2] = std::sqrt(0.5);
    // Strang splitting is O(dt^2) on the stiff grid kinetic term, so GRID needs a finer step.
    for (auto [mode, dt, tol] : {std::tuple{PropagationMode::Eigenbasis, 0.01, 1e-10}, {PropagationMode::Grid, 0.001, 2e-4}}) {
        const auto tr = propagate(w.potential, w.basis, d, psi0, 5.0, dt, mode, o);
        const auto last = tr.populations.rows() - 1;
        CHECK(std::abs(tr.populations(last, 0) - 0.5) < tol);
        CHECK(std::abs(tr.populations(last, 2) - 0.5) < tol);
        CHECK(std::abs(tr.energy.back() - 3.5) < 10 * tol);
        CHECK(tr.norm.back() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("grid and eigenbasis propagation agree for a driven transition") {
    const auto& w = PrimeWell::get();
    Drive d;
    d.form = DriveForm::Linear;
    d.beta = 0.25;
    d.omega = 1.0;
    PropagationOptions o;
    o.tracked = {0, 1, 2};
    o.sample_stride = 1.0;
    const auto a = propagate(w.potential, w.basis, d, basis_state(60, 0), 15.0, 0.005, PropagationMode::Eigenbasis, o);
    const auto b = propagate(w.potential, w.basis, d, basis_state(60, 0), 15.0, 0.005, PropagationMode::Grid, o);
    CHECK(a.times == b.times);
    CHECK((a.populations - b.populations).cwiseAbs().maxCoeff() < 2e-3);
    CHECK(a.final_state.size() == 60);
    CHECK(b.final_state.size() == w.potential.grid.M);
}

TEST_CASE("weak resonant drive matches a lab-frame two-level integration") {
    const auto& w = PrimeWell::get();
    auto cfg = default_rabi_config(1, 0.02);
    cfg.sample_stride = 0.5;
    const auto r = rabi_experiment(w.potential, w.basis, cfg);
    const double w0 = w.basis.energies[1] - w.basis.energies[0];
    const double ref = oracle::two_level_peak(w0, r.matrix_element, 0.02, w0, 2.0 * std::numbers::pi / r.rabi_frequency, 0.01);
    CHECK(r.trajectory.peak_population[1] == doctest::Approx(ref).epsilon(2e-3));
    CHECK(r.t_peak == doctest::Approx(std::numbers::pi / r.rabi_frequency).epsilon(0.02));
    CHECK(r.leakage < 1e-3);
}

TEST_CASE("rabi preconditions") {
    const auto& w = PrimeWell::get();
    auto cfg = default_rabi_config(1, 0.25);
    cfg.form = DriveForm::Quadratic;
    CHECK_THROWS_AS(rabi_experiment(w.potential, w.basis, cfg), DomainError);
    auto cfg2 = default_rabi_config(2, 0.25);
    cfg2.form = DriveForm::Linear;
    CHECK_THROWS_AS(rabi_experiment(w.potential, w.basis, cfg2), DomainError);
    CHECK_THROWS_AS(rabi_experiment(w.potential, w.basis, default_rabi_config(40, 0.25)), DomainError);
}

TEST_CASE("stability guards") {
    const auto& w = PrimeWell::get();
    Drive d;
    d.form = DriveForm::Linear;
    d.beta = 0.1;
    d.omega = 1.0;
    CHECK_THROWS_AS(propagate(w.potential, w.basis, d, basis_state(60, 0), 5.0, 0.5, PropagationMode::Eigenbasis),
                    StabilityError);
    PropagationOptions o;
    o.norm_tolerance = 1e-20;
    o.tracked = {0};
    CHECK_THROWS_AS(propagate(w.potential, w.basis, d, basis_state(60, 0), 1.0, 0.01, PropagationMode::Grid, o),
                    StabilityError);
    Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(60);
    bad[0] = 2.0;
    CHECK_THROWS_AS(propagate(w.potential, w.basis, d, bad, 1.0, 0.01, PropagationMode::Eigenbasis), DomainError);
}

TEST_CASE("absorber removes continuum population") {
    const auto& w = PrimeWell::get();
    Drive d;
    d.beta = 0.0;
    PropagationOptions o;
    o.absorber = true;
    o.tracked = {0};
    o.sample_stride = 5.0;
    const int top = w.basis.size() - 1;
    const auto tr = propagate(w.potential, w.basis, d, basis_state(60, top), 20.0, 0.005, PropagationMode::Grid, o);
    CHECK(tr.norm.back() < 0.9);
    const auto bound = propagate(w.potential, w.basis, d, basis_state(60, 0), 20.0, 0.005, PropagationMode::Grid, o);
    CHECK(bound.norm.back() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("lorentzian fit recovers known parameters") {
    std::vector<double> x, y;
    for (int i = -20; i <= 20; ++i) {
        const double d = 0.1 * i - 0.05;
        x.push_back(0.1 * i);
        y.push_back(0.9 * 0.09 / (0.09 + d * d));
    }
    const auto p = fit_lorentzian(x, y);
    CHECK(p.amplitude == doctest::Approx(0.9).epsilon(1e-8));
    CHECK(p.center == doctest::Approx(0.05).epsilon(1e-8));
    CHECK(p.width == doctest::Approx(0.3).epsilon(1e-8));
    CHECK_THROWS_AS(fit_lorentzian({1, 2}, {1, 2}), DomainError);
}

TEST_CASE("lineshape scan guards and concurrency") {
    const auto& w = PrimeWell::get();
    const auto cfg = default_rabi_config(1, 0.25);
    CHECK_THROWS_AS(lineshape_scan(w.potential, w.basis, cfg, 0.1, 11), DomainError);
    const auto a = lineshape_scan(w.potential, w.basis, cfg, 0.6, 9, 1.5, 1);
    const auto b = lineshape_scan(w.potential, w.basis, cfg, 0.6, 9, 1.5, 3);
    CHECK(a.window_too_short);
    CHECK(a.peak_populations == b.peak_populations);
    CHECK(a.peak_populations[4] > a.peak_populations[0]);
}

TEST_CASE("cascade verdict rule") {
    const std::vector<long> labels{1, 3, 9, 27, 81};
    CHECK(cascade_verdict(labels, labels, {0.2, 0.3, 0.5, 1.0, 0.1}, 27) == CascadeVerdict::DescendedToGround);
    CHECK(cascade_verdict(labels, labels, {0.05, 0.3, 0.5, 1.0, 0.1}, 27) == CascadeVerdict::Localized);
    const std::vector<long> present{1, 3, 27, 81};
    CHECK(cascade_verdict(labels, present, {0.0, 0.0, 1.0, 0.2}, 27) == CascadeVerdict::StalledAtHole);
    CHECK(cascade_verdict(labels, present, {0.3, 0.3, 1.0, 0.2}, 27) == CascadeVerdict::DescendedToGround);
    CHECK(to_string(CascadeVerdict::StalledAtHole) == "STALLED_AT_HOLE");
}

TEST_CASE("cascade configuration errors") {
    CHECK_THROWS_AS(cascade_preset("fig9"), ConfigError);
    auto c = cascade_preset("fig3a");
    c.spec = {SequenceKind::LnNaturalsWithHoles, 120, {26, 27}};
    CHECK_THROWS_AS(cascade_experiment(c), ConfigError);
    auto d = cascade_preset("fig3a");
    d.spec.count = 60;
    CHECK_THROWS_AS(cascade_experiment(d), ConfigError);
    const auto b = cascade_preset("fig3b");
    CHECK(b.window_starts == std::vector<double>{298.83, 380.31});
    CHECK(cascade_preset("fig3c").spec.holes == std::vector<int>{9, 10});
}
