#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "nqlab/numtheory.hpp"

namespace nqlab {

// Cell-centred symmetric grid: x_i = -L + (i + 1/2) dx, dx = 2L/M. No point sits at x = 0,
// so mirror pairs are (i, M-1-i).
struct Grid {
    double L = 10.0;
    int M = 1024;

    Grid() = default;
    Grid(double half_width, int points);

    double dx() const { return 2.0 * L / M; }
    double x(int i) const { return -L + (i + 0.5) * dx(); }
    std::vector<double> points() const;
};

struct Potential {
    Grid grid;
    std::vector<double> values;
    double threshold = 0.0;  // continuum edge

    std::vector<double> sample(const std::function<double(double)>& f) const;
};

struct EigenBasis {
    Grid grid;
    std::vector<double> energies;   // ascending
    Eigen::MatrixXd wavefunctions;  // M x size(), normalized so that sum psi^2 dx = 1
    int count = 0;                  // states below the threshold; extra columns are box continuum

    int size() const { return static_cast<int>(energies.size()); }
    Eigen::Map<const Eigen::VectorXd> state(int n) const;
};

// FD Hamiltonian H = -1/2 d^2/dx^2 + U with the 3-point stencil and Dirichlet walls.
void hamiltonian_bands(const Potential& potential, std::vector<double>& diag, std::vector<double>& off);

// Bound states (E < threshold). Throws ResolutionError when the grid cannot
// resolve the well (too few points per local wavelength, or fewer states than
// the Weyl estimate).
EigenBasis solve_bound_states(const Potential& potential);

// Lowest `n_states` eigenpairs regardless of threshold; `count` still reports
// how many of them are bound.
EigenBasis solve_states(const Potential& potential, int n_states);

double matrix_element(const EigenBasis& basis, const std::vector<double>& f, int n_row, int n_col);
Eigen::MatrixXd operator_matrix(const EigenBasis& basis, const std::vector<double>& f, int n_states);

// Threshold rule shared by the synthesis and the classical inversion.
double plateau_threshold(const Spectrum& spectrum);

// Classical (Abel) inversion of a spectrum into an even potential x(U).
double classical_turning_point(const Spectrum& spectrum, double U);
Potential classical_inverse(const Spectrum& spectrum, const Grid& grid);

struct SynthesisOptions {
    double tolerance = 1e-3;      // acceptance on max |E_n - target| (U0)
    double newton_target = 1e-10; // refinement stops early below this
    int max_iters = 30;
    double regularization = 1.0;  // weight of the second-difference smoother
    enum class Init { Darboux, Classical } init = Init::Darboux;
};

struct SynthesisReport {
    int iterations = 0;
    double initial_residual = 0.0;
    double final_residual = 0.0;
    bool converged = false;
    int bound_count = 0;
    double threshold = 0.0;
    std::vector<double> residual_history;
    std::string message;
};

struct SynthesisResult {
    Potential potential;
    SynthesisReport report;
};

// Grid sized so that L covers the classical turning point of the top level with
// margin and dx resolves the shortest local wavelength.
Grid recommended_grid(const Spectrum& target);

SynthesisResult synthesize_potential(const Spectrum& target, const Grid& grid, const SynthesisOptions& opts = {});

// Reflectionless seed: a chain of Darboux transforms from a flat background of
// height `threshold`, one per level. Returns U on [0, xmax] with step h.
std::vector<double> darboux_chain(const std::vector<double>& energies, double threshold, double xmax, double h);

}  // namespace nqlab
