#pragma once

#include <vector>

namespace nqlab {

// H = -J0 sum_m e^{-gamma m} (|m+1><m| + h.c.) on sites m_left..m_right with
// Dirichlet walls one site outside.
class ExponentialLattice {
public:
    ExponentialLattice(double J0, double gamma, int m_left, int m_right);

    double J0() const { return J0_; }
    double gamma() const { return gamma_; }
    int m_left() const { return m_left_; }
    int m_right() const { return m_right_; }
    int sites() const { return m_right_ - m_left_ + 1; }
    double hopping(int m) const;  // J_m, bond between m and m+1
    int index(int m) const { return m - m_left_; }

private:
    double J0_, gamma_;
    int m_left_, m_right_;
};

struct LatticeEigenstate {
    double energy = 0.0;
    std::vector<double> psi;  // psi[i] is the amplitude at m = m_left + i
    double center = 0.0;      // participation-weighted mean position
    double residual_abs = 0.0;  // max |(H - E) psi| at interior sites (units of J0)
    double residual_rel = 0.0;  // same, componentwise relative to the magnitudes of the terms
};

struct LatticeSpectrum {
    int m_left = 0;
    std::vector<LatticeEigenstate> states;  // ascending energy

    std::vector<double> energies() const;
    std::vector<int> by_magnitude() const;  // indices ordered by |E| descending
    double amplitude(int state, int m) const { return states[state].psi[m - m_left]; }
    int nearest(double E) const;
};

// Eigenvalues from the singular values of the even/odd bidiagonal block (high
// relative accuracy across the whole exponential range), eigenvectors from
// twisted factorizations at those eigenvalues.
LatticeSpectrum diagonalize(const ExponentialLattice& lat);

struct TailComparison {
    std::vector<int> sites;
    std::vector<double> predicted;
    std::vector<double> exact;
    double max_relative_residual = 0.0;
    bool valid = true;  // validity condition of the approximation holds at the anchor
};

// Dark-state tail for m <= m_DS: (-1)^{(m_DS-m)/2} e^{-gamma (m_DS-m)/2} psi_{m_DS} on
// even offsets, zero on odd ones. Residuals are taken over even offsets.
TailComparison dark_state_tail(const ExponentialLattice& lat, const LatticeEigenstate& state, int m_DS);

// Classically forbidden tail for m_CF <= m <= m_end.
TailComparison cf_tail(const ExponentialLattice& lat, const LatticeEigenstate& state, int m_CF, int m_end);

// Outermost sites where the approximations are valid for energy E: the largest
// m_DS (even offset) with J_m >= 10|E|, and the smallest m_CF with
// |E| >= 10 e^{sqrt(gamma)} J_m. Throw DomainError if no site qualifies.
int dark_state_anchor(const ExponentialLattice& lat, double E);
int cf_anchor(const ExponentialLattice& lat, double E);

// Transfer-product (Bremmer) amplitude at m_end from psi_start at m_start.
double bremmer_wkb(const ExponentialLattice& lat, double E, int m_start, int m_end, double psi_start);

struct TranslationCheck {
    int from = 0, to = 0;  // state indices
    double predicted_ratio = 0.0;
    double relative_error = 0.0;
};

// Property 2: for positive-energy states centred at least `edge_margin` sites
// inside both walls, find the partner at E * e^{-gamma dm}.
std::vector<TranslationCheck> translation_checks(const ExponentialLattice& lat, const LatticeSpectrum& spec, int dm,
                                                 int edge_margin);

// Edge distance at which the slow dark-state tail, e^{-gamma d / 2} at the wall,
// perturbs energies by less than `tol` (relative): at least 20 sites.
int bulk_margin(double gamma, double tol);

// Largest mismatch between E and -E partners (Property 1).
double parity_pairing_error(const LatticeSpectrum& spec);

struct CascadeLatticeMap {
    double J0 = 0.0;
    double gamma = 0.0;
};

// Rotating-wave reduction of the parametric cascade on the ladder ntilde^m:
// coupling (beta/2) * A U0 / |n' - n| between neighbours gives J0 = beta U0 A / (2 (ntilde-1)).
CascadeLatticeMap cascade_lattice_map(double A, double ntilde, double beta, double U0 = 1.0);

// Population of `site` under e^{-iHt} starting from `site`, sampled on `times`.
std::vector<double> site_return_probability(const ExponentialLattice& lat, int site, const std::vector<double>& times);

}  // namespace nqlab
