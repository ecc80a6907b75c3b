#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "nqlab/numtheory.hpp"
#include "nqlab/spectral.hpp"

namespace nqlab {

enum class DriveForm { Linear, Quadratic, Parametric };
std::string to_string(DriveForm f);
DriveForm drive_form_from_string(const std::string& s);

struct SilenceWindow {
    double start = 0.0;
    double duration = 0.0;
};

// Perturbation g(t) f(x). With no envelope g(t) = beta cos(phi(t)), where the
// phase accumulator phi advances at omega only outside silence windows; inside
// a window g = 0. A custom envelope b_k (piecewise constant on steps of
// envelope_dt) replaces the cosine: g = beta b(t).
struct Drive {
    DriveForm form = DriveForm::Linear;
    double beta = 0.0;
    double omega = 0.0;
    std::vector<SilenceWindow> windows;
    std::vector<double> envelope;
    double envelope_dt = 0.0;

    void validate() const;
    bool silent(double t) const;
    double phase(double t) const;
    double amplitude(double t) const;
    // Times in [0, T] where g(t) is not smooth (window and envelope edges).
    std::vector<double> breakpoints(double T) const;
};

// Spatial profile f(x) sampled on the potential's grid.
std::vector<double> drive_profile(const Potential& potential, DriveForm form);

enum class PropagationMode { Grid, Eigenbasis };
std::string to_string(PropagationMode m);
PropagationMode propagation_mode_from_string(const std::string& s);

struct PropagationOptions {
    double sample_stride = 0.5;   // <= 0 records every step
    std::vector<int> tracked;     // basis indices; empty -> every bound state
    std::vector<int> cascade_set; // basis indices summed into cascade_fraction
    int galerkin_states = 0;      // EIGENBASIS size; 0 -> all basis columns
    bool absorber = false;        // complex absorbing layer on the outer 10% (GRID)
    double absorber_strength = 0.5;
    double norm_tolerance = 1e-4;  // GRID drift that triggers StabilityError
    bool enforce_drive_resolution = true;  // dt <= 2 pi / (40 omega)
};

struct Trajectory {
    std::vector<int> tracked;
    std::vector<double> times;
    Eigen::MatrixXd populations;  // samples x tracked
    std::vector<double> energy;   // <psi|H0|psi>
    std::vector<double> norm;
    std::vector<double> cascade_fraction;
    std::vector<double> bound_population;  // sum over all bound states
    // Maxima over every time step (not only samples).
    std::vector<double> peak_population;
    std::vector<double> peak_time;
    Eigen::VectorXcd final_state;  // basis coefficients (EIGENBASIS) or grid values (GRID)
};

// Basis coefficient vector with unit amplitude on state n.
Eigen::VectorXcd basis_state(int size, int n);

// Split-operator stepper on the grid: exp(-i V dt/2) exp(-i T dt) exp(-i V dt/2)
// with V = U + g f and the 3-point-stencil dispersion (1 - cos k dx)/dx^2 for T.
class GridPropagator {
public:
    GridPropagator(const Potential& potential, std::vector<double> profile, bool absorber = false,
                   double absorber_strength = 0.5);
    ~GridPropagator();
    GridPropagator(const GridPropagator&) = delete;
    GridPropagator& operator=(const GridPropagator&) = delete;

    void step(Eigen::VectorXcd& psi, double g, double dt);
    double norm(const Eigen::VectorXcd& psi) const;
    double energy(const Eigen::VectorXcd& psi) const;  // FD H0 expectation
    Eigen::VectorXcd to_grid(const EigenBasis& basis, const Eigen::VectorXcd& coeffs) const;
    std::complex<double> project(const EigenBasis& basis, int n, const Eigen::VectorXcd& psi) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Galerkin stepper on the first K eigenstates: with F = Q diag(l) Q^T,
// exp(-i H0 dt/2) Q exp(-i g l dt) Q^T exp(-i H0 dt/2).
class EigenbasisPropagator {
public:
    EigenbasisPropagator(const std::vector<double>& energies, const Eigen::MatrixXd& F);
    void step(Eigen::VectorXcd& c, double g, double dt);
    int size() const { return static_cast<int>(e_.size()); }

private:
    Eigen::VectorXd e_;
    Eigen::MatrixXd Q_;
    Eigen::VectorXd lambda_;
    Eigen::VectorXcd work_;
};

// psi0 holds basis coefficients (length = basis.size() or the Galerkin size).
Trajectory propagate(const Potential& potential, const EigenBasis& basis, const Drive& drive,
                     const Eigen::VectorXcd& psi0, double T, double dt, PropagationMode mode,
                     const PropagationOptions& opts = {});

struct RabiConfig {
    int target = 1;               // 1 or 2; source is the ground state
    DriveForm form = DriveForm::Linear;
    double beta = 0.25;
    double detuning = 0.0;        // drive at (E_target - E_0) + detuning
    double T = 0.0;               // 0 -> two Rabi periods
    double dt = 0.01;
    int galerkin_states = 60;
    PropagationMode mode = PropagationMode::Eigenbasis;
    double sample_stride = 0.1;
};

RabiConfig default_rabi_config(int target, double beta);

struct RabiResult {
    Trajectory trajectory;
    double peak_population = 0.0;
    double t_peak = 0.0;
    double rabi_frequency = 0.0;    // beta |<0|f|target>|
    double matrix_element = 0.0;
    double omega = 0.0;
    double leakage = 0.0;           // max over time of 1 - P_0 - P_target
    std::vector<double> max_populations;  // per tracked state (first 6 bound)
};

RabiResult rabi_experiment(const Potential& potential, const EigenBasis& basis, const RabiConfig& cfg);

struct LineshapeFit {
    std::vector<double> detunings;
    std::vector<double> peak_populations;
    double fitted_rabi = 0.0;
    double fwhm = 0.0;
    double center = 0.0;
    double amplitude = 0.0;
    double predicted_rabi = 0.0;
    double window = 0.0;
    bool window_too_short = false;
};

// Peak target population per detuning over a window of `window_periods` Rabi
// periods, then a Lorentzian fit A W^2 / (W^2 + (d - d0)^2); fwhm = 2 W.
LineshapeFit lineshape_scan(const Potential& potential, const EigenBasis& basis, const RabiConfig& base,
                            double delta_max, int points, double window_periods = 2.0, unsigned jobs = 1);

struct LorentzianParams {
    double amplitude = 1.0, center = 0.0, width = 1.0;
};
LorentzianParams fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y);

enum class CascadeVerdict { Localized, DescendedToGround, StalledAtHole };
std::string to_string(CascadeVerdict v);

struct CascadeConfig {
    SequenceSpec spec{SequenceKind::LnNaturals, 120, {}};
    double beta = 0.3;
    double ntilde = 3.0;
    std::vector<double> window_starts;
    double window_duration = -1.0;  // < 0 -> pi / (2 Omega)
    double T = 600.0;
    double dt = 0.1;
    PropagationMode mode = PropagationMode::Eigenbasis;
    long initial_label = 27;
    std::vector<long> cascade_labels{1, 3, 9, 27, 81};
    int extra_states = 0;          // box-continuum states added to the Galerkin basis
    double sample_stride = 0.5;
    bool absorber = false;
};

struct CascadeResult {
    Spectrum spectrum;
    SynthesisReport synthesis;
    Trajectory trajectory;
    std::vector<long> tracked_labels;   // labels present in the spectrum, same order as trajectory.tracked
    CascadeVerdict verdict = CascadeVerdict::Localized;
    std::vector<double> max_population; // per tracked label
    double min_cascade_fraction = 0.0;
    double omega = 0.0;
    double window_duration = 0.0;

    // min over samples of the summed population of `labels`.
    double min_fraction(const std::vector<long>& labels) const;
};

CascadeConfig cascade_preset(const std::string& name);  // fig3a, fig3b, fig3c
CascadeResult cascade_experiment(const CascadeConfig& cfg);

// Verdict rule on a finished run (exposed for testing).
CascadeVerdict cascade_verdict(const std::vector<long>& cascade_labels, const std::vector<long>& present_labels,
                               const std::vector<double>& max_population, long initial_label, double threshold = 0.1);

}  // namespace nqlab
