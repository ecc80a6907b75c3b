#include <doctest.h>

#include "nqlab/errors.hpp"
#include "nqlab/goldbach_cascade.hpp"
#include "oracles.hpp"

using namespace nqlab;

TEST_CASE("one-body selection rule") {
    CHECK(one_body_allowed({3, 5}, {5, 5}));
    CHECK(one_body_allowed({3, 5}, {3, 7}));
    CHECK_FALSE(one_body_allowed({5, 7}, {3, 11}));
    CHECK_THROWS_AS(one_body_allowed({3, 5}, {3, 11}), DomainError);
    // Invariant under swapping the particles within either state.
    const auto g = build_graph(200);
    for (std::uint64_t w = 6; w + 2 <= 200; w += 2)
        for (const auto& s : g.level(w))
            for (const auto& t : g.level(w + 2)) {
                const bool a = one_body_allowed(s, t);
                CHECK(a == one_body_allowed({s.p2, s.p1}, t));
                CHECK(a == one_body_allowed(s, {t.p2, t.p1}));
            }
}

TEST_CASE("graph levels are the Goldbach partitions") {
    const auto g = build_graph(40);
    CHECK(g.level(10) == std::vector<TwoBodyState>{{3, 7}, {5, 5}});
    CHECK(g.level(6) == std::vector<TwoBodyState>{{3, 3}});
    CHECK(g.level(42).empty());
    CHECK(g.transitions.at(6) == TransitionClass::OneBody);
    CHECK_THROWS_AS(build_graph(7), DomainError);
}

TEST_CASE("assisted transitions coincide with NLT numbers") {
    const std::uint64_t W = 3000;
    const auto isp = oracle::prime_flags(W + 4);
    const auto r = classify_transitions(W);
    CHECK(r.first_assisted == 38);
    CHECK(r.violations.empty());
    CHECK(r.nlt_mismatches.empty());
    CHECK(r.all_levels_reachable);
    std::vector<std::uint64_t> expected;
    for (std::uint64_t w = 6; w + 2 <= W; w += 2) {
        const auto b = oracle::brute_partitions(isp, w);
        if (b.count > 0 && !b.twin) expected.push_back(w);
    }
    CHECK(r.two_body_assisted == expected);
}

TEST_CASE("coupling estimate") {
    CHECK(coupling_estimate(TransitionClass::TwoBodyAssisted, 1e-4, 1e-8) == doctest::Approx(1e-12));
    CHECK(coupling_estimate(TransitionClass::TwoBodyAssisted, 1e-4, 0.0) == 0.0);
    CHECK(coupling_estimate(TransitionClass::OneBody, 1e-4, 1e-8) == doctest::Approx(1e-4));
    CHECK_THROWS_AS(coupling_estimate(TransitionClass::OneBody, -1.0, 0.0), DomainError);
    CHECK(to_string(TransitionClass::GoldbachViolation) == "GOLDBACH_VIOLATION");
}
