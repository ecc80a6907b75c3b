#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nqlab/spectral.hpp"

namespace nqlab {

// Classical motion in U_cl(x) = U0 ln(sqrt(2/pi) |x| / a) at energy E. The
// right turning point is reached at t = 0, the origin at t = +-T/4.
struct ClassicalOrbit {
    double E = 0.0;
    double U0 = 1.0;
    double log_cutoff = 1.0;  // analysis knob L; unused by default

    double omega() const;      // (U0/hbar) e^{-E/U0}
    double period() const;     // 2 pi / omega
    double amplitude() const;  // b(E) = sqrt(pi/2) a e^{E/U0}
    double potential(double x) const;
};

// Position at time t; t is reduced modulo one period first.
double classical_x_of_t(const ClassicalOrbit& orbit, double t);
// Velocity from the closed form |xdot| = 2 sqrt(U0 ln(b/|x|)) / sqrt(2), signed.
double classical_v_of_t(const ClassicalOrbit& orbit, double t);

// Energy convention for the orbit used between levels n and n'.
enum class EnergyConvention { Midpoint, Row };
ClassicalOrbit orbit_for_levels(int n_row, int n_col, double U0 = 1.0,
                                EnergyConvention convention = EnergyConvention::Midpoint);

double offdiag_estimate(int n_row, int n_col, double U0 = 1.0);
double diag_virial(int n, double U0 = 1.0);

struct AmplitudeFit {
    double A = 0.0;
    std::vector<int> deltas;            // signed n' - n
    std::vector<double> numeric;        // <n'|U|n>
    std::vector<double> semiclassical;  // offdiag_estimate
    double max_relative_deviation = 0.0;  // | |numeric| - 1/|dn| | / (1/|dn|)
    bool sign_pattern_ok = true;
    double max_odd_element = 0.0;
};

// Least-squares A in |<n'|U|n>| = A U0 / |n'-n| over even |n'-n| in [dmin, dmax],
// using states on both sides of n_center. `labels` maps basis index -> n.
AmplitudeFit fit_amplitude_A(const EigenBasis& basis, const Potential& potential, int n_center, int dmin, int dmax,
                             double U0 = 1.0);
double fit_amplitude_A(const std::vector<int>& deltas, const std::vector<double>& values);

// (1/T) int_{-T/2}^{T/2} A(x(t1 + tau)) cos(dn omega tau) dtau, with t1 the left
// turning point. Generic trajectory form: x_of_t has its right turning point at t = 0.
double fourier_matrix_element(const std::function<double(double)>& x_of_t, double period,
                              const std::function<double(double)>& observable, int delta_n,
                              double rel_tol = 1e-9, int max_panels = 1 << 16);
double fourier_matrix_element(const ClassicalOrbit& orbit, const std::function<double(double)>& observable,
                              int delta_n, double rel_tol = 1e-9, int max_panels = 1 << 16);

}  // namespace nqlab
