#pragma once

#include "nqlab/spectral.hpp"

// Synthesized prime potential (N_b = 20) with 60 solved states, built once.
struct PrimeWell {
    nqlab::Potential potential;
    nqlab::EigenBasis basis;

    static const PrimeWell& get() {
        static const PrimeWell w = [] {
            PrimeWell p;
            const auto s = nqlab::target_spectrum({nqlab::SequenceKind::Primes, 20, {}});
            p.potential = nqlab::synthesize_potential(s, nqlab::recommended_grid(s)).potential;
            p.basis = nqlab::solve_states(p.potential, 60);
            return p;
        }();
        return w;
    }
};
