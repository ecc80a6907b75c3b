#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "nqlab/errors.hpp"
#include "nqlab/io.hpp"

using namespace nqlab;

TEST_CASE("number and CSV formatting") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0})
        CHECK(std::stod(io::format_double(v)) == v);
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::csv_row({"a", "b,c"}) == "a,\"b,c\"\r\n");
}

TEST_CASE("spectrum JSON round trip") {
    const auto s = target_spectrum({SequenceKind::LnNaturalsWithHoles, 20, {9, 10}});
    const auto t = io::spectrum_from_json(io::spectrum_json(s));
    CHECK(t.kind == s.kind);
    CHECK(t.energies == s.energies);
    CHECK(t.labels == s.labels);
    CHECK(t.holes == s.holes);
    CHECK_THROWS_AS(io::spectrum_from_json("{\"kind\": \"primes\"}"), ConfigError);
    CHECK_THROWS_AS(io::spectrum_from_json("not json"), ConfigError);
    CHECK_THROWS_AS(io::spectrum_from_json(R"({"kind":"custom","U0":1,"energies":[2,1]})"), ConfigError);
}

TEST_CASE("potential and basis round trips") {
    const auto& w = PrimeWell::get();
    const auto p = io::potential_from_json(io::potential_json(w.potential));
    CHECK(p.grid.L == w.potential.grid.L);
    CHECK(p.grid.M == w.potential.grid.M);
    CHECK(p.values == w.potential.values);
    CHECK(p.threshold == w.potential.threshold);
    const auto csv = io::potential_csv(w.potential);
    CHECK(csv.rfind("x,U\r\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == w.potential.grid.M + 1);

    EigenBasis small = w.basis;
    small.wavefunctions = w.basis.wavefunctions.leftCols(3);
    small.energies.resize(3);
    small.count = 3;
    const auto b = io::basis_from_json(io::basis_json(small));
    CHECK(b.energies == small.energies);
    CHECK((b.wavefunctions - small.wavefunctions).norm() == 0.0);
}

TEST_CASE("key-value configs") {
    const auto c = io::KeyValueConfig::parse("# comment\n tolerance = 1e-4 \n\nmax_iters=12 # trailing\nwindows = 1, 2 3\n");
    CHECK(c.get_double("tolerance", 0) == 1e-4);
    CHECK(c.get_int("max_iters", 0) == 12);
    CHECK(c.get_doubles("windows") == std::vector<double>{1, 2, 3});
    CHECK(c.get_string("missing", "x") == "x");
    CHECK_THROWS_AS(c.require_known({"tolerance"}), ConfigError);
    CHECK_NOTHROW(c.require_known({"tolerance", "max_iters", "windows"}));
    CHECK_THROWS_AS(io::KeyValueConfig::parse("novalue\n"), ConfigError);
    CHECK_THROWS_AS(io::KeyValueConfig::parse("a=1\na=2\n"), ConfigError);
    CHECK_THROWS_AS(io::KeyValueConfig::parse("a=x\n").get_double("a", 0), ConfigError);
    CHECK_THROWS_AS(io::synthesis_options_from(c), ConfigError);
    const auto o = io::synthesis_options_from(io::KeyValueConfig::parse("tolerance = 1e-4\nmax_iters = 12\n"));
    CHECK(o.tolerance == 1e-4);
    CHECK(o.max_iters == 12);
    CHECK_THROWS_AS(io::synthesis_options_from(io::KeyValueConfig::parse("init = magic\n")), ConfigError);
    CHECK_THROWS_AS(io::KeyValueConfig::load("/nonexistent/file"), ConfigError);
}

TEST_CASE("pulse CSV round trip") {
    const ControlPulse p{4, 0.05, {0.1, -0.2, 1.0, -1.0}, DriveForm::Linear, 2.0};
    const auto q = io::pulse_from_csv(io::pulse_csv(p), DriveForm::Linear, 2.0);
    CHECK(q.values == p.values);
    CHECK(q.dt == doctest::Approx(p.dt));
    CHECK_THROWS_AS(io::pulse_from_csv("t,b\n0,2\n0.1,0\n", DriveForm::Linear, 1.0), DomainError);
    CHECK_THROWS_AS(io::pulse_from_csv("t,b\n0,0\n0.1,0\n0.3,0\n", DriveForm::Linear, 1.0), ConfigError);
}

TEST_CASE("trajectory CSV layout") {
    Trajectory tr;
    tr.tracked = {0, 1};
    tr.times = {0.0, 0.5};
    tr.energy = {1, 1};
    tr.norm = {1, 1};
    tr.cascade_fraction = {1, 1};
    tr.bound_population = {1, 1};
    tr.populations.resize(2, 2);
    tr.populations << 1, 0, 0.5, 0.5;
    const auto csv = io::trajectory_csv(tr, {"0", "1"});
    CHECK(csv == "t,E,norm,cascade_fraction,bound_population,P_0,P_1\r\n0,1,1,1,1,1,0\r\n0.5,1,1,1,1,0.5,0.5\r\n");
    CHECK_THROWS_AS(io::trajectory_csv(tr, {"0"}), DomainError);
}
