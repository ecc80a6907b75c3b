#include "nqlab/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <random>

#include "nqlab/errors.hpp"

namespace nqlab {

using cd = std::complex<double>;

void ControlPulse::validate() const {
    if (n_steps <= 0 || !(dt > 0)) throw DomainError("ControlPulse: need n_steps > 0 and dt > 0");
    if (static_cast<int>(values.size()) != n_steps) throw DomainError("ControlPulse: values size differs from n_steps");
    if (form == DriveForm::Parametric) throw DomainError("ControlPulse: modulation must be linear or quadratic");
    for (double b : values)
        if (!(std::abs(b) <= 1.0)) throw DomainError("ControlPulse: |b_k| must not exceed 1");
}

Drive ControlPulse::drive() const {
    Drive d;
    d.form = form;
    d.beta = beta;
    d.envelope = values;
    d.envelope_dt = dt;
    return d;
}

void ControlProblem::validate() const {
    if (!(T > 0) || n_steps <= 0) throw DomainError("ControlProblem: need T > 0 and n_steps > 0");
    if (source < 0 || target < 0 || source >= basis_states || target >= basis_states)
        throw DomainError("ControlProblem: source/target outside the optimization basis");
    if (form == DriveForm::Parametric) throw DomainError("ControlProblem: modulation must be linear or quadratic");
    if (lambda < 0) throw DomainError("ControlProblem: lambda must be >= 0");
}

ControlSystem::ControlSystem(const Potential& potential, const EigenBasis& basis, const ControlProblem& problem)
    : problem_(problem) {
    problem_.validate();
    if (problem_.basis_states > basis.size()) throw DomainError("ControlSystem: basis has too few states");
    const int K = problem_.basis_states;
    E_ = Eigen::Map<const Eigen::VectorXd>(basis.energies.data(), K);
    F_ = operator_matrix(basis, drive_profile(potential, problem_.form), K);
}

double ControlSystem::fidelity(const std::vector<double>& b, std::vector<double>* grad) const {
    const int N = problem_.n_steps, K = size();
    if (static_cast<int>(b.size()) != N) throw DomainError("ControlSystem: pulse length differs from n_steps");
    const double dt = problem_.dt();
    std::vector<Eigen::MatrixXd> V(grad ? N : 0);
    std::vector<Eigen::VectorXd> lam(grad ? N : 0);
    std::vector<Eigen::VectorXcd> psi(grad ? N + 1 : 0);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(K), w(K);
    c[problem_.source] = 1.0;
    if (grad) psi[0] = c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    for (int k = 0; k < N; ++k) {
        Eigen::MatrixXd H = problem_.beta * b[k] * F_;
        H.diagonal() += E_;
        es.compute(H);
        const auto& Vk = es.eigenvectors();
        const auto& lk = es.eigenvalues();
        w.noalias() = Vk.transpose() * c;
        for (int j = 0; j < K; ++j) w[j] *= std::polar(1.0, -lk[j] * dt);
        c.noalias() = Vk * w;
        if (grad) {
            V[k] = Vk;
            lam[k] = lk;
            psi[k + 1] = c;
        }
    }
    const cd o = c[problem_.target];
    if (grad) {
        grad->assign(N, 0.0);
        Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(K), vc(K), vp(K);
        chi[problem_.target] = 1.0;
        Eigen::MatrixXcd G(K, K);
        for (int k = N - 1; k >= 0; --k) {
            const auto& Vk = V[k];
            const auto& lk = lam[k];
            vc.noalias() = Vk.transpose() * chi;
            vp.noalias() = Vk.transpose() * psi[k];
            const Eigen::MatrixXd B = problem_.beta * (Vk.transpose() * F_ * Vk);
            // Divided differences of exp(-i lambda dt), written to stay exact near degeneracy.
            cd dO = 0.0;
            for (int j = 0; j < K; ++j)
                for (int l = 0; l < K; ++l) {
                    const double half = 0.5 * (lk[j] - lk[l]) * dt;
                    const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
                    const cd g = cd(0.0, -dt) * std::polar(sinc, -0.5 * (lk[j] + lk[l]) * dt);
                    dO += std::conj(vc[j]) * g * B(j, l) * vp[l];
                }
            (*grad)[k] = 2.0 * (std::conj(o) * dO).real();
            for (int j = 0; j < K; ++j) vc[j] *= std::polar(1.0, lk[j] * dt);
            chi.noalias() = Vk * vc;
        }
    }
    return std::norm(o);
}

double ControlSystem::objective(const std::vector<double>& b, std::vector<double>* grad) const {
    const double F = fidelity(b, grad);
    double J = 1.0 - F;
    if (grad)
        for (double& g : *grad) g = -g;
    const double lambda = problem_.lambda;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const double d = b[k + 1] - b[k];
        J += lambda * d * d;
        if (grad) {
            (*grad)[k + 1] += 2.0 * lambda * d;
            (*grad)[k] -= 2.0 * lambda * d;
        }
    }
    return J;
}

double evaluate_fidelity(const Potential& potential, const EigenBasis& basis, const ControlPulse& pulse, int source,
                         int target, PropagationMode mode, int galerkin_states, int substeps) {
    pulse.validate();
    if (substeps < 1) throw DomainError("evaluate_fidelity: substeps must be >= 1");
    const int K = galerkin_states > 0 ? std::min(galerkin_states, basis.size()) : basis.size();
    if (source < 0 || target < 0 || source >= K || target >= K)
        throw DomainError("evaluate_fidelity: states outside the basis");
    PropagationOptions o;
    o.sample_stride = pulse.duration();
    o.tracked = {target};
    o.galerkin_states = K;
    const auto tr = propagate(potential, basis, pulse.drive(), basis_state(basis.size(), source), pulse.duration(),
                              pulse.dt / substeps, mode, o);
    return tr.populations(tr.populations.rows() - 1, 0);
}

double gradient_check(const ControlSystem& sys, const std::vector<double>& b, int coords, std::uint64_t seed,
                      double h) {
    std::vector<double> g;
    sys.fidelity(b, &g);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(b.size()) - 1);
    double worst = 0.0;
    for (int i = 0; i < coords; ++i) {
        const int k = pick(rng);
        auto bp = b, bm = b;
        bp[k] += h;
        bm[k] -= h;
        const double fd = (sys.fidelity(bp) - sys.fidelity(bm)) / (2.0 * h);
        const double scale = std::max(std::abs(fd), 1e-6);
        worst = std::max(worst, std::abs(fd - g[k]) / scale);
    }
    return worst;
}

namespace {

void project(std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, -1.0, 1.0);
}

std::uint64_t restart_seed(std::uint64_t seed, int i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

std::vector<double> initial_guess(const ControlSystem& sys, std::uint64_t seed, const GrapeOptions& opts) {
    const auto& p = sys.problem();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> noise(0.0, opts.init_noise);
    const double phi = phase(rng);
    std::vector<double> b(p.n_steps);
    const double omega = std::abs(sys.transition_frequency());
    for (int k = 0; k < p.n_steps; ++k)
        b[k] = opts.init_amplitude * std::cos(omega * (k + 0.5) * p.dt() + phi) + noise(rng);
    project(b);
    return b;
}

GrapeResult grape_local(const ControlSystem& sys, std::vector<double> x, const GrapeOptions& opts) {
    const auto& p = sys.problem();
    if (static_cast<int>(x.size()) != p.n_steps) throw DomainError("grape_local: pulse length differs from n_steps");
    project(x);
    const int n = p.n_steps;
    std::vector<double> g, gn, xn(n), d(n);
    double f = sys.objective(x, &g);
    std::vector<double> recent{f};
    double alpha = 1.0;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        double pg = 0.0;
        for (int k = 0; k < n; ++k) pg = std::max(pg, std::abs(std::clamp(x[k] - g[k], -1.0, 1.0) - x[k]));
        if (pg < opts.gradient_tolerance) break;
        double gd = 0.0;
        for (int k = 0; k < n; ++k) {
            d[k] = std::clamp(x[k] - alpha * g[k], -1.0, 1.0) - x[k];
            gd += g[k] * d[k];
        }
        const double fref = *std::max_element(recent.begin(), recent.end());
        double t = 1.0, fn = 0.0;
        bool accepted = false;
        while (t > 1e-12) {
            for (int k = 0; k < n; ++k) xn[k] = x[k] + t * d[k];
            fn = sys.objective(xn, &gn);
            if (fn <= fref + 1e-4 * t * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        double ss = 0.0, sy = 0.0;
        for (int k = 0; k < n; ++k) {
            const double s = xn[k] - x[k], y = gn[k] - g[k];
            ss += s * s;
            sy += s * y;
        }
        alpha = sy > 0 ? std::clamp(ss / sy, 1e-6, 1e6) : 10.0;
        x.swap(xn);
        g.swap(gn);
        f = fn;
        recent.push_back(f);
        if (recent.size() > 10) recent.erase(recent.begin());
        if (ss < 1e-30) break;
    }
    GrapeResult r;
    r.pulse = {n, p.dt(), x, p.form, p.beta};
    r.report.fidelity = sys.fidelity(x);
    r.report.infidelity = 1.0 - r.report.fidelity;
    r.report.objective = f;
    r.report.iterations = it;
    r.report.converged = r.report.fidelity >= opts.success_fidelity;
    return r;
}

GrapeResult grape_optimize(const Potential& potential, const EigenBasis& basis, const ControlProblem& problem,
                           std::uint64_t seed, const GrapeOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (opts.restarts < 1) throw DomainError("grape_optimize: need at least one restart");
    const ControlSystem sys(potential, basis, problem);
    const unsigned jobs = std::max(1u, opts.jobs);
    GrapeResult best;
    int used = 0, total_iterations = 0;
    auto run = [&](int i) { return grape_local(sys, initial_guess(sys, restart_seed(seed, i), opts), opts); };
    for (int start = 0; start < opts.restarts; start += static_cast<int>(jobs)) {
        const int stop = std::min(opts.restarts, start + static_cast<int>(jobs));
        std::vector<std::future<GrapeResult>> batch;
        for (int i = start; i < stop; ++i)
            batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, run, i));
        for (int i = start; i < stop; ++i) {
            auto r = batch[i - start].get();
            total_iterations += r.report.iterations;
            if (best.report.best_restart < 0 || r.report.fidelity > best.report.fidelity) {
                best = std::move(r);
                best.report.best_restart = i;
            }
        }
        used = stop;
        if (opts.stop_on_success && best.report.fidelity >= opts.success_fidelity) break;
    }
    best.report.restarts_used = used;
    best.report.iterations = total_iterations;
    best.report.propagated_fidelity =
        evaluate_fidelity(potential, basis, best.pulse, problem.source, problem.target, PropagationMode::Eigenbasis,
                          problem.basis_states);
    if (opts.verify_grid)
        best.report.grid_fidelity =
            evaluate_fidelity(potential, basis, best.pulse, problem.source, problem.target, PropagationMode::Grid);
    best.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

std::vector<CurvePoint> min_time_curve(const Potential& potential, const EigenBasis& basis,
                                       const ControlProblem& problem, const std::vector<double>& T_list,
                                       std::uint64_t seed, const GrapeOptions& opts, double dt) {
    if (!(dt > 0)) throw DomainError("min_time_curve: dt must be positive");
    for (std::size_t i = 1; i < T_list.size(); ++i)
        if (!(T_list[i] > T_list[i - 1])) throw DomainError("min_time_curve: T_list must be ascending");
    std::vector<CurvePoint> curve;
    GrapeOptions o = opts;
    o.verify_grid = false;
    for (std::size_t i = 0; i < T_list.size(); ++i) {
        ControlProblem p = problem;
        p.n_steps = std::max(1, static_cast<int>(std::lround(T_list[i] / dt)));
        p.T = p.n_steps * dt;
        auto r = grape_optimize(potential, basis, p, seed + 7919 * i, o);
        CurvePoint pt{T_list[i], r.report.infidelity, r.pulse};
        if (!curve.empty()) {
            const auto& prev = curve.back().pulse;
            const int pad = p.n_steps - prev.n_steps;
            if (pad >= 0) {
                std::vector<double> b(pad, 0.0);
                b.insert(b.end(), prev.values.begin(), prev.values.end());
                const double inf = 1.0 - ControlSystem(potential, basis, p).fidelity(b);
                if (inf < pt.best_infidelity) pt = {T_list[i], inf, {p.n_steps, dt, b, p.form, p.beta}};
            }
        }
        curve.push_back(std::move(pt));
    }
    return curve;
}

double threshold_time(const std::vector<CurvePoint>& curve, double threshold) {
    for (const auto& p : curve)
        if (p.best_infidelity < threshold) return p.T;
    return -1.0;
}

}  // namespace nqlab
