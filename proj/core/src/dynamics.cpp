#include "nqlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <unsupported/Eigen/NonLinearOptimization>

#include "fft.hpp"
#include "nqlab/errors.hpp"

namespace nqlab {

using cd = std::complex<double>;

std::string to_string(DriveForm f) {
    switch (f) {
        case DriveForm::Linear: return "linear";
        case DriveForm::Quadratic: return "quadratic";
        case DriveForm::Parametric: return "parametric";
    }
    return "unknown";
}

DriveForm drive_form_from_string(const std::string& s) {
    for (auto f : {DriveForm::Linear, DriveForm::Quadratic, DriveForm::Parametric})
        if (to_string(f) == s) return f;
    throw DomainError("unknown drive form '" + s + "'");
}

std::string to_string(PropagationMode m) { return m == PropagationMode::Grid ? "grid" : "eigenbasis"; }

PropagationMode propagation_mode_from_string(const std::string& s) {
    if (s == "grid") return PropagationMode::Grid;
    if (s == "eigenbasis") return PropagationMode::Eigenbasis;
    throw DomainError("unknown propagation mode '" + s + "'");
}

void Drive::validate() const {
    if (beta < 0) throw DomainError("Drive: beta must be >= 0");
    if (omega < 0) throw DomainError("Drive: omega must be >= 0");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].duration < 0 || windows[i].start < 0) throw DomainError("Drive: negative window");
        if (i > 0 && windows[i].start < windows[i - 1].start + windows[i - 1].duration)
            throw DomainError("Drive: windows must be time-ordered and non-overlapping");
    }
    if (!envelope.empty()) {
        if (!(envelope_dt > 0)) throw DomainError("Drive: envelope needs a positive step");
        for (double b : envelope)
            if (std::abs(b) > 1.0 + 1e-12) throw DomainError("Drive: envelope values must lie in [-1, 1]");
    }
}

bool Drive::silent(double t) const {
    for (const auto& w : windows)
        if (t >= w.start && t < w.start + w.duration) return true;
    return false;
}

double Drive::phase(double t) const {
    double paused = 0.0;
    for (const auto& w : windows) paused += std::clamp(t - w.start, 0.0, w.duration);
    return omega * (t - paused);
}

double Drive::amplitude(double t) const {
    if (silent(t)) return 0.0;
    if (!envelope.empty()) {
        const auto k = static_cast<std::size_t>(std::floor(t / envelope_dt));
        return k < envelope.size() ? beta * envelope[k] : 0.0;
    }
    return beta * std::cos(phase(t));
}

std::vector<double> Drive::breakpoints(double T) const {
    std::vector<double> b{0.0, T};
    for (const auto& w : windows)
        for (double e : {w.start, w.start + w.duration})
            if (e > 0 && e < T) b.push_back(e);
    if (!envelope.empty())
        for (std::size_t k = 1; k <= envelope.size(); ++k) {
            const double e = static_cast<double>(k) * envelope_dt;
            if (e < T) b.push_back(e);
        }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double a, double c) { return std::abs(a - c) < 1e-12; }), b.end());
    return b;
}

std::vector<double> drive_profile(const Potential& potential, DriveForm form) {
    switch (form) {
        case DriveForm::Linear: return potential.sample([](double x) { return x; });
        case DriveForm::Quadratic: return potential.sample([](double x) { return x * x; });
        case DriveForm::Parametric: return potential.values;
    }
    return {};
}

Eigen::VectorXcd basis_state(int size, int n) {
    if (n < 0 || n >= size) throw DomainError("basis_state: index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
    v[n] = 1.0;
    return v;
}

struct GridPropagator::Impl {
    int M;
    double dx;
    std::vector<double> U, f, eta, kinetic;
    detail::ComplexFft fft;
    double cached_dt = std::numeric_limits<double>::quiet_NaN();
    std::vector<cd> kin_phase;

    Impl(const Potential& p, std::vector<double> profile) : M(p.grid.M), dx(p.grid.dx()), U(p.values), f(std::move(profile)), fft(p.grid.M) {}
};

GridPropagator::GridPropagator(const Potential& potential, std::vector<double> profile, bool absorber,
                               double absorber_strength)
    : impl_(std::make_unique<Impl>(potential, std::move(profile))) {
    auto& d = *impl_;
    if (static_cast<int>(d.f.size()) != d.M) throw DomainError("GridPropagator: profile size mismatch");
    d.kinetic.resize(d.M);
    for (int j = 0; j < d.M; ++j) {
        const int jj = j < d.M / 2 ? j : j - d.M;
        const double k = 2.0 * std::numbers::pi * jj / (d.M * d.dx);
        d.kinetic[j] = (1.0 - std::cos(k * d.dx)) / (d.dx * d.dx);
    }
    d.eta.assign(d.M, 0.0);
    if (absorber) {
        const double L = potential.grid.L, x0 = 0.9 * L;
        for (int i = 0; i < d.M; ++i) {
            const double ax = std::abs(potential.grid.x(i));
            if (ax > x0) d.eta[i] = absorber_strength * std::pow((ax - x0) / (L - x0), 2);
        }
    }
}

GridPropagator::~GridPropagator() = default;

void GridPropagator::step(Eigen::VectorXcd& psi, double g, double dt) {
    auto& d = *impl_;
    if (dt != d.cached_dt) {
        d.kin_phase.resize(d.M);
        for (int j = 0; j < d.M; ++j) d.kin_phase[j] = std::polar(1.0 / d.M, -d.kinetic[j] * dt);
        d.cached_dt = dt;
    }
    const double half = 0.5 * dt;
    auto kick = [&](cd* out, const cd* in) {
        for (int i = 0; i < d.M; ++i) {
            const double v = d.U[i] + g * d.f[i];
            const double damp = d.eta[i] > 0 ? std::exp(-d.eta[i] * std::abs(half)) : 1.0;
            out[i] = in[i] * std::polar(damp, -v * half);
        }
    };
    cd* buf = d.fft.data();
    kick(buf, psi.data());
    d.fft.forward();
    for (int j = 0; j < d.M; ++j) buf[j] *= d.kin_phase[j];
    d.fft.backward();
    kick(psi.data(), buf);
}

double GridPropagator::norm(const Eigen::VectorXcd& psi) const { return psi.squaredNorm() * impl_->dx; }

double GridPropagator::energy(const Eigen::VectorXcd& psi) const {
    const auto& d = *impl_;
    const double a = 1.0 / (d.dx * d.dx), b = -0.5 / (d.dx * d.dx);
    cd s = 0.0;
    for (int i = 0; i < d.M; ++i) {
        cd h = (a + d.U[i]) * psi[i];
        if (i > 0) h += b * psi[i - 1];
        if (i + 1 < d.M) h += b * psi[i + 1];
        s += std::conj(psi[i]) * h;
    }
    return s.real() * d.dx;
}

Eigen::VectorXcd GridPropagator::to_grid(const EigenBasis& basis, const Eigen::VectorXcd& coeffs) const {
    if (coeffs.size() > basis.size()) throw DomainError("to_grid: more coefficients than basis states");
    return basis.wavefunctions.leftCols(coeffs.size()).cast<cd>() * coeffs;
}

cd GridPropagator::project(const EigenBasis& basis, int n, const Eigen::VectorXcd& psi) const {
    const auto col = basis.wavefunctions.col(n);
    cd s = 0.0;
    for (int i = 0; i < impl_->M; ++i) s += col[i] * psi[i];
    return s * impl_->dx;
}

EigenbasisPropagator::EigenbasisPropagator(const std::vector<double>& energies, const Eigen::MatrixXd& F) {
    const int K = static_cast<int>(F.rows());
    if (F.cols() != K || static_cast<int>(energies.size()) < K) throw DomainError("EigenbasisPropagator: size mismatch");
    e_ = Eigen::Map<const Eigen::VectorXd>(energies.data(), K);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(F);
    Q_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    work_.resize(K);
}

void EigenbasisPropagator::step(Eigen::VectorXcd& c, double g, double dt) {
    const int K = size();
    for (int n = 0; n < K; ++n) c[n] *= std::polar(1.0, -0.5 * e_[n] * dt);
    work_.noalias() = Q_.transpose() * c;
    for (int n = 0; n < K; ++n) work_[n] *= std::polar(1.0, -g * lambda_[n] * dt);
    c.noalias() = Q_ * work_;
    for (int n = 0; n < K; ++n) c[n] *= std::polar(1.0, -0.5 * e_[n] * dt);
}

namespace {

struct Mesh {
    std::vector<double> t0;  // step start
    std::vector<double> h;   // step length
    std::vector<char> sample_after;
};

Mesh build_mesh(const Drive& drive, double T, double dt, double stride) {
    auto cuts = drive.breakpoints(T);
    std::vector<double> samples;
    if (stride > 0)
        for (long k = 1; k * stride < T - 1e-12; ++k) samples.push_back(static_cast<double>(k) * stride);
    cuts.insert(cuts.end(), samples.begin(), samples.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), cuts.end());
    Mesh m;
    auto is_sample = [&](double t) {
        if (stride <= 0) return true;
        if (std::abs(t - T) < 1e-12) return true;
        const double k = std::round(t / stride);
        return std::abs(t - k * stride) < 1e-9;
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const long n = std::max<long>(1, static_cast<long>(std::ceil((b - a) / dt - 1e-9)));
        const double h = (b - a) / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            m.t0.push_back(a + static_cast<double>(k) * h);
            m.h.push_back(h);
            m.sample_after.push_back(stride <= 0 ? 1 : 0);
        }
        if (stride > 0) m.sample_after.back() = is_sample(b) ? 1 : 0;
    }
    return m;
}

}  // namespace

Trajectory propagate(const Potential& potential, const EigenBasis& basis, const Drive& drive,
                     const Eigen::VectorXcd& psi0, double T, double dt, PropagationMode mode,
                     const PropagationOptions& opts) {
    drive.validate();
    if (!(T > 0) || !(dt > 0)) throw DomainError("propagate: T and dt must be positive");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-8) throw DomainError("propagate: psi0 must be normalized");
    if (opts.enforce_drive_resolution && drive.envelope.empty() && drive.omega > 0 &&
        dt > 2.0 * std::numbers::pi / (40.0 * drive.omega) * (1.0 + 1e-12))
        throw StabilityError("propagate: dt = " + std::to_string(dt) + " does not resolve the drive (need dt <= 2 pi/(40 Omega))");

    const int K = opts.galerkin_states > 0 ? std::min(opts.galerkin_states, basis.size()) : basis.size();
    if (psi0.size() > basis.size()) throw DomainError("propagate: psi0 longer than the basis");

    Trajectory tr;
    tr.tracked = opts.tracked;
    if (tr.tracked.empty())
        for (int n = 0; n < basis.count; ++n) tr.tracked.push_back(n);
    for (int n : tr.tracked)
        if (n < 0 || n >= (mode == PropagationMode::Eigenbasis ? K : basis.size()))
            throw DomainError("propagate: tracked state outside the basis");
    for (int n : opts.cascade_set)
        if (n < 0 || n >= basis.size()) throw DomainError("propagate: cascade state outside the basis");
    const int nt = static_cast<int>(tr.tracked.size());
    tr.peak_population.assign(nt, 0.0);
    tr.peak_time.assign(nt, 0.0);

    const auto f = drive_profile(potential, drive.form);
    const Mesh mesh = build_mesh(drive, T, dt, opts.sample_stride);
    std::vector<std::vector<double>> rows;

    auto record_row = [&](double t, const std::vector<double>& pops, double energy, double norm, double cascade,
                          double bound) {
        tr.times.push_back(t);
        rows.push_back(pops);
        tr.energy.push_back(energy);
        tr.norm.push_back(norm);
        tr.cascade_fraction.push_back(cascade);
        tr.bound_population.push_back(bound);
    };
    auto update_peaks = [&](double t, const std::vector<double>& pops) {
        for (int j = 0; j < nt; ++j)
            if (pops[j] > tr.peak_population[j]) {
                tr.peak_population[j] = pops[j];
                tr.peak_time[j] = t;
            }
    };

    if (mode == PropagationMode::Eigenbasis) {
        const Eigen::MatrixXd F = operator_matrix(basis, f, K);
        EigenbasisPropagator prop(basis.energies, F);
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(K);
        for (int n = 0; n < psi0.size(); ++n) {
            if (n < K) c[n] = psi0[n];
            else if (std::abs(psi0[n]) > 0) throw DomainError("propagate: psi0 has weight outside the Galerkin basis");
        }
        const int nb = std::min(basis.count, K);
        std::vector<double> pops(nt);
        auto observe = [&](double t, bool sample) {
            for (int j = 0; j < nt; ++j) pops[j] = std::norm(c[tr.tracked[j]]);
            update_peaks(t, pops);
            if (!sample) return;
            double e = 0.0, nn = 0.0, cf = 0.0, bp = 0.0;
            for (int n = 0; n < K; ++n) {
                const double p = std::norm(c[n]);
                e += basis.energies[n] * p;
                nn += p;
                if (n < nb) bp += p;
            }
            for (int n : opts.cascade_set)
                if (n < K) cf += std::norm(c[n]);
            record_row(t, pops, e, nn, cf, bp);
        };
        observe(0.0, true);
        for (std::size_t s = 0; s < mesh.h.size(); ++s) {
            const double tm = mesh.t0[s] + 0.5 * mesh.h[s];
            prop.step(c, drive.amplitude(tm), mesh.h[s]);
            observe(mesh.t0[s] + mesh.h[s], mesh.sample_after[s]);
        }
        tr.final_state = c;
    } else {
        GridPropagator prop(potential, f, opts.absorber, opts.absorber_strength);
        Eigen::VectorXcd psi = prop.to_grid(basis, psi0);
        std::vector<double> pops(nt);
        auto observe = [&](double t, bool sample) {
            for (int j = 0; j < nt; ++j) pops[j] = std::norm(prop.project(basis, tr.tracked[j], psi));
            update_peaks(t, pops);
            if (!sample) return;
            const double nn = prop.norm(psi);
            if (!opts.absorber && std::abs(nn - 1.0) > opts.norm_tolerance)
                throw StabilityError("propagate: norm drift " + std::to_string(nn - 1.0) + " at t=" + std::to_string(t));
            double cf = 0.0, bp = 0.0;
            for (int n : opts.cascade_set) cf += std::norm(prop.project(basis, n, psi));
            for (int n = 0; n < basis.count; ++n) bp += std::norm(prop.project(basis, n, psi));
            record_row(t, pops, prop.energy(psi), nn, cf, bp);
        };
        observe(0.0, true);
        for (std::size_t s = 0; s < mesh.h.size(); ++s) {
            const double tm = mesh.t0[s] + 0.5 * mesh.h[s];
            prop.step(psi, drive.amplitude(tm), mesh.h[s]);
            observe(mesh.t0[s] + mesh.h[s], mesh.sample_after[s]);
        }
        tr.final_state = psi;
    }
    tr.populations.resize(static_cast<Eigen::Index>(rows.size()), nt);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int j = 0; j < nt; ++j) tr.populations(static_cast<Eigen::Index>(r), j) = rows[r][j];
    return tr;
}

RabiConfig default_rabi_config(int target, double beta) {
    RabiConfig c;
    c.target = target;
    c.beta = beta;
    c.form = target % 2 == 1 ? DriveForm::Linear : DriveForm::Quadratic;
    return c;
}

RabiResult rabi_experiment(const Potential& potential, const EigenBasis& basis, const RabiConfig& cfg) {
    if (cfg.target < 1 || cfg.target >= basis.count) throw DomainError("rabi_experiment: target outside the bound spectrum");
    if (cfg.form == DriveForm::Parametric) throw DomainError("rabi_experiment: use a linear or quadratic drive");
    const bool odd_drive = cfg.form == DriveForm::Linear;
    if (odd_drive != (cfg.target % 2 == 1))
        throw DomainError("rabi_experiment: drive parity does not connect |0> and |" + std::to_string(cfg.target) + ">");
    RabiResult r;
    const auto f = drive_profile(potential, cfg.form);
    r.matrix_element = matrix_element(basis, f, 0, cfg.target);
    r.rabi_frequency = cfg.beta * std::abs(r.matrix_element);
    r.omega = basis.energies[cfg.target] - basis.energies[0] + cfg.detuning;
    if (!(r.rabi_frequency > 0)) throw DomainError("rabi_experiment: vanishing coupling");
    const double period = 2.0 * std::numbers::pi / r.rabi_frequency;
    const double T = cfg.T > 0 ? cfg.T : 2.0 * period;

    Drive d;
    d.form = cfg.form;
    d.beta = cfg.beta;
    d.omega = r.omega;
    PropagationOptions o;
    o.sample_stride = cfg.sample_stride;
    o.galerkin_states = std::min(cfg.galerkin_states, basis.size());
    const int ntrack = std::min(basis.count, std::max(6, cfg.target + 1));
    for (int n = 0; n < ntrack; ++n) o.tracked.push_back(n);
    o.cascade_set = {0, cfg.target};
    r.trajectory = propagate(potential, basis, d, basis_state(basis.size(), 0), T, cfg.dt, cfg.mode, o);

    const auto& tr = r.trajectory;
    const double first = std::min(T, period);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double p = tr.populations(static_cast<Eigen::Index>(k), cfg.target);
        if (tr.times[k] <= first + 1e-12 && p > r.peak_population) {
            r.peak_population = p;
            r.t_peak = tr.times[k];
        }
        r.leakage = std::max(r.leakage, tr.norm[k] - tr.cascade_fraction[k]);
    }
    r.max_populations = tr.peak_population;
    return r;
}

namespace {

struct LorentzFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    const std::vector<double>& x;
    const std::vector<double>& y;
    int inputs() const { return 3; }
    int values() const { return static_cast<int>(x.size()); }
    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& fv) const {
        const double w2 = p[2] * p[2];
        for (int i = 0; i < values(); ++i) {
            const double d = x[i] - p[1];
            fv[i] = p[0] * w2 / (w2 + d * d) - y[i];
        }
        return 0;
    }
    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
        const double w = p[2], w2 = w * w;
        for (int i = 0; i < values(); ++i) {
            const double d = x[i] - p[1], den = w2 + d * d;
            J(i, 0) = w2 / den;
            J(i, 1) = p[0] * w2 * 2.0 * d / (den * den);
            J(i, 2) = p[0] * 2.0 * w * d * d / (den * den);
        }
        return 0;
    }
};

}  // namespace

LorentzianParams fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw DomainError("fit_lorentzian: need at least four points");
    const auto imax = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
    Eigen::VectorXd p(3);
    p[0] = y[imax];
    p[1] = x[imax];
    double hw = 0.0;  // half width from the samples above half maximum
    for (std::size_t i = 0; i < x.size(); ++i)
        if (y[i] >= 0.5 * y[imax]) hw = std::max(hw, std::abs(x[i] - x[imax]));
    p[2] = hw > 0 ? hw : (x.back() - x.front()) / 10.0;
    LorentzFunctor fn{x, y};
    Eigen::LevenbergMarquardt<LorentzFunctor> lm(fn);
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-12;
    lm.minimize(p);
    return {p[0], p[1], std::abs(p[2])};
}

LineshapeFit lineshape_scan(const Potential& potential, const EigenBasis& basis, const RabiConfig& base,
                            double delta_max, int points, double window_periods, unsigned jobs) {
    if (points < 5) throw DomainError("lineshape_scan: need at least five detunings");
    const auto f = drive_profile(potential, base.form);
    LineshapeFit fit;
    fit.predicted_rabi = base.beta * std::abs(matrix_element(basis, f, 0, base.target));
    if (delta_max < 3.0 * fit.predicted_rabi)
        throw DomainError("lineshape_scan: detuning range must span at least +-3 Omega_R");
    fit.window = window_periods * 2.0 * std::numbers::pi / fit.predicted_rabi;
    fit.window_too_short = window_periods < 2.0;
    for (int i = 0; i < points; ++i) fit.detunings.push_back(-delta_max + 2.0 * delta_max * i / (points - 1));
    fit.peak_populations.assign(points, 0.0);

    auto run = [&](int i) {
        RabiConfig c = base;
        c.detuning = fit.detunings[i];
        c.T = fit.window;
        c.sample_stride = 1.0;
        return rabi_experiment(potential, basis, c).trajectory.peak_population[c.target];
    };
    jobs = std::max(1u, jobs);
    for (int start = 0; start < points; start += static_cast<int>(jobs)) {
        std::vector<std::future<double>> batch;
        for (int i = start; i < std::min(points, start + static_cast<int>(jobs)); ++i)
            batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, run, i));
        for (std::size_t k = 0; k < batch.size(); ++k) fit.peak_populations[start + k] = batch[k].get();
    }
    const auto p = fit_lorentzian(fit.detunings, fit.peak_populations);
    fit.amplitude = p.amplitude;
    fit.center = p.center;
    fit.fitted_rabi = p.width;
    fit.fwhm = 2.0 * p.width;
    return fit;
}

std::string to_string(CascadeVerdict v) {
    switch (v) {
        case CascadeVerdict::Localized: return "LOCALIZED";
        case CascadeVerdict::DescendedToGround: return "DESCENDED_TO_GROUND";
        case CascadeVerdict::StalledAtHole: return "STALLED_AT_HOLE";
    }
    return "UNKNOWN";
}

CascadeVerdict cascade_verdict(const std::vector<long>& cascade_labels, const std::vector<long>& present_labels,
                               const std::vector<double>& max_population, long initial_label, double threshold) {
    auto pop_of = [&](long label) {
        for (std::size_t i = 0; i < present_labels.size(); ++i)
            if (present_labels[i] == label) return max_population[i];
        return -1.0;  // absent
    };
    std::vector<long> below;
    for (long l : cascade_labels)
        if (l < initial_label) below.push_back(l);
    std::sort(below.begin(), below.end(), std::greater<>());
    long highest_hole = 0;
    for (long l : below)
        if (pop_of(l) < 0) {
            highest_hole = l;
            break;
        }
    if (highest_hole != 0) {
        bool passed = false;
        for (long l : below)
            if (l < highest_hole && pop_of(l) >= threshold) passed = true;
        if (!passed) return CascadeVerdict::StalledAtHole;
    }
    for (long l : below) {
        const double p = pop_of(l);
        if (p >= 0 && p < threshold) return CascadeVerdict::Localized;
    }
    return CascadeVerdict::DescendedToGround;
}

double CascadeResult::min_fraction(const std::vector<long>& labels) const {
    std::vector<int> cols;
    for (long l : labels)
        for (std::size_t i = 0; i < tracked_labels.size(); ++i)
            if (tracked_labels[i] == l) cols.push_back(static_cast<int>(i));
    double worst = 1e300;
    for (Eigen::Index k = 0; k < trajectory.populations.rows(); ++k) {
        double s = 0.0;
        for (int c : cols) s += trajectory.populations(k, c);
        worst = std::min(worst, s);
    }
    return trajectory.populations.rows() ? worst : 0.0;
}

CascadeConfig cascade_preset(const std::string& name) {
    CascadeConfig c;
    if (name == "fig3a") return c;
    if (name == "fig3b") {
        c.window_starts = {298.83, 380.31};
        return c;
    }
    if (name == "fig3c") {
        c.spec = {SequenceKind::LnNaturalsWithHoles, 120, {9, 10}};
        c.window_starts = {298.83, 380.31};
        return c;
    }
    throw ConfigError("unknown cascade preset '" + name + "'");
}

CascadeResult cascade_experiment(const CascadeConfig& cfg) {
    CascadeResult r;
    r.spectrum = target_spectrum(cfg.spec);
    for (long l : cfg.cascade_labels)
        if (l > r.spectrum.labels.back())
            throw ConfigError("cascade_experiment: cascade label " + std::to_string(l) + " above the top level");
    if (r.spectrum.index_of_label(cfg.initial_label) < 0)
        throw ConfigError("cascade_experiment: initial state missing from the spectrum");

    const Grid grid = recommended_grid(r.spectrum);
    auto syn = synthesize_potential(r.spectrum, grid);
    r.synthesis = syn.report;
    if (!syn.report.converged) throw ConfigError("cascade_experiment: synthesis failed: " + syn.report.message);
    const Potential& pot = syn.potential;
    const int n_levels = static_cast<int>(r.spectrum.size());
    const EigenBasis basis = solve_states(pot, n_levels + cfg.extra_states);
    if (basis.count != n_levels) throw ConfigError("cascade_experiment: bound-state count differs from the target");

    r.omega = r.spectrum.U0 * std::log(cfg.ntilde);
    r.window_duration = cfg.window_duration >= 0 ? cfg.window_duration : std::numbers::pi / (2.0 * r.omega);
    Drive d;
    d.form = DriveForm::Parametric;
    d.beta = cfg.beta;
    d.omega = r.omega;
    for (double s : cfg.window_starts) d.windows.push_back({s, r.window_duration});

    PropagationOptions o;
    o.sample_stride = cfg.sample_stride;
    o.absorber = cfg.absorber;
    for (long l : cfg.cascade_labels) {
        const long idx = r.spectrum.index_of_label(l);
        if (idx < 0) continue;
        r.tracked_labels.push_back(l);
        o.tracked.push_back(static_cast<int>(idx));
        o.cascade_set.push_back(static_cast<int>(idx));
    }
    const int start = static_cast<int>(r.spectrum.index_of_label(cfg.initial_label));
    r.trajectory = propagate(pot, basis, d, basis_state(basis.size(), start), cfg.T, cfg.dt, cfg.mode, o);
    r.max_population = r.trajectory.peak_population;
    r.min_cascade_fraction = *std::min_element(r.trajectory.cascade_fraction.begin(), r.trajectory.cascade_fraction.end());
    r.verdict = cascade_verdict(cfg.cascade_labels, r.tracked_labels, r.max_population, cfg.initial_label);
    return r;
}

}  // namespace nqlab
