#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nqlab/dynamics.hpp"
#include "nqlab/spectral.hpp"

namespace nqlab {

// Piecewise-constant control b_k on steps of dt; the perturbation is
// beta b(t) f(x) with f = x (Linear) or x^2 (Quadratic).
struct ControlPulse {
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> values;
    DriveForm form = DriveForm::Quadratic;
    double beta = 1.0;

    double duration() const { return n_steps * dt; }
    void validate() const;
    Drive drive() const;
};

struct ControlProblem {
    int source = 0;
    int target = 2;
    double T = 5.0;
    int n_steps = 100;
    double beta = 1.0;
    DriveForm form = DriveForm::Quadratic;
    double lambda = 1e-3;    // weight of sum (b_{k+1} - b_k)^2
    int basis_states = 20;   // truncated eigenbasis used by the optimizer

    double dt() const { return T / n_steps; }
    void validate() const;
};

struct GrapeOptions {
    int restarts = 50;
    unsigned jobs = 1;
    int max_iterations = 400;
    double success_fidelity = 0.99;
    bool stop_on_success = false;  // stop after the first batch that reaches success_fidelity
    double init_amplitude = 0.3;
    double init_noise = 0.05;
    double gradient_tolerance = 1e-8;  // on the projected gradient (max norm)
    bool verify_grid = true;
};

struct OptimizationReport {
    double fidelity = 0.0;        // internal propagator
    double infidelity = 1.0;
    double objective = 1.0;
    double propagated_fidelity = -1.0;  // dynamics::propagate, EIGENBASIS
    double grid_fidelity = -1.0;        // dynamics::propagate, GRID (if verified)
    int iterations = 0;
    int restarts_used = 0;
    int best_restart = -1;
    double wall_time = 0.0;
    bool converged = false;  // fidelity >= success_fidelity
};

// Exact piecewise propagation in the lowest states of H0 + beta b f(x), with
// the adjoint gradient of the fidelity.
class ControlSystem {
public:
    ControlSystem(const Potential& potential, const EigenBasis& basis, const ControlProblem& problem);

    int size() const { return static_cast<int>(E_.size()); }
    const ControlProblem& problem() const { return problem_; }
    double transition_frequency() const { return E_[problem_.target] - E_[problem_.source]; }
    // F = |<target|U_N ... U_1|source>|^2; grad, if given, receives dF/db_k.
    double fidelity(const std::vector<double>& b, std::vector<double>* grad = nullptr) const;
    // 1 - F + lambda sum (b_{k+1} - b_k)^2 and its gradient.
    double objective(const std::vector<double>& b, std::vector<double>* grad = nullptr) const;

private:
    ControlProblem problem_;
    Eigen::VectorXd E_;
    Eigen::MatrixXd F_;
};

struct GrapeResult {
    ControlPulse pulse;
    OptimizationReport report;
};

// Fidelity of the pulse evaluated by dynamics::propagate (substeps per pulse
// step, Galerkin size 0 -> all basis columns).
double evaluate_fidelity(const Potential& potential, const EigenBasis& basis, const ControlPulse& pulse, int source,
                         int target, PropagationMode mode = PropagationMode::Eigenbasis, int galerkin_states = 0,
                         int substeps = 10);

// Largest relative difference between adjoint and central finite-difference
// derivatives of the fidelity at `coords` random coordinates.
double gradient_check(const ControlSystem& sys, const std::vector<double>& b, int coords, std::uint64_t seed,
                      double h = 1e-6);

// One local optimization from a given starting pulse (projected spectral gradient).
GrapeResult grape_local(const ControlSystem& sys, std::vector<double> b0, const GrapeOptions& opts);
std::vector<double> initial_guess(const ControlSystem& sys, std::uint64_t seed, const GrapeOptions& opts);
GrapeResult grape_optimize(const Potential& potential, const EigenBasis& basis, const ControlProblem& problem,
                           std::uint64_t seed, const GrapeOptions& opts = {});

struct CurvePoint {
    double T = 0.0;
    double best_infidelity = 1.0;
    ControlPulse pulse;
};

// Best infidelity per T (ascending), with n_steps = round(T/dt). The previous
// best pulse, zero-padded in front, is always a candidate, so the curve is
// non-increasing.
std::vector<CurvePoint> min_time_curve(const Potential& potential, const EigenBasis& basis,
                                       const ControlProblem& problem, const std::vector<double>& T_list,
                                       std::uint64_t seed, const GrapeOptions& opts = {}, double dt = 0.05);
// First T with best_infidelity < threshold, or -1.
double threshold_time(const std::vector<CurvePoint>& curve, double threshold = 0.01);

}  // namespace nqlab
