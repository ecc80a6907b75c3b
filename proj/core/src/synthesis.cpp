#include <algorithm>
#include <cmath>
#include <numbers>

#include "linalg.hpp"
#include "nqlab/errors.hpp"
#include "nqlab/spectral.hpp"

namespace nqlab {

namespace {

// RK4 for the Riccati form w' = f(x) - w^2 of the ground-state log-derivative,
// with f at half steps from a 4-point cubic midpoint rule.
void integrate_riccati(const std::vector<double>& f, double h, std::vector<double>& w) {
    const std::size_t n = f.size();
    w.assign(n, 0.0);
    auto mid = [&](std::size_t i) {
        if (i >= 1 && i + 2 < n) return (9.0 * (f[i] + f[i + 1]) - (f[i - 1] + f[i + 2])) / 16.0;
        return 0.5 * (f[i] + f[i + 1]);
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double wi = w[i], fm = mid(i);
        const double k1 = f[i] - wi * wi;
        const double a = wi + 0.5 * h * k1;
        const double k2 = fm - a * a;
        const double b = wi + 0.5 * h * k2;
        const double k3 = fm - b * b;
        const double c = wi + h * k3;
        const double k4 = f[i + 1] - c * c;
        w[i + 1] = wi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

double darboux_step(double threshold, double e1) {
    const double k = std::sqrt(4.0 * std::max(threshold - e1, 1e-6));
    return 0.02 / k;
}

std::vector<double> sample_half_line(const std::vector<double>& U, double h, const Grid& grid) {
    std::vector<double> out(grid.M);
    const double last = U.back();
    for (int i = 0; i < grid.M; ++i) {
        const double x = std::abs(grid.x(i));
        const double s = x / h;
        const std::size_t j = static_cast<std::size_t>(s);
        if (j + 1 >= U.size()) {
            out[i] = last;
            continue;
        }
        const double t = s - static_cast<double>(j);
        out[i] = (1.0 - t) * U[j] + t * U[j + 1];
    }
    return out;
}

// Bands of I + lambda * D^T D where D takes second differences of the half-grid
// parameters, with the even mirror u_{-1} = u_0 at the origin and a free outer end.
void smoother_bands(int n, double lambda, std::vector<double>& d0, std::vector<double>& d1, std::vector<double>& d2) {
    d0.assign(n, 1.0);
    d1.assign(std::max(n - 1, 0), 0.0);
    d2.assign(std::max(n - 2, 0), 0.0);
    auto add_row = [&](const std::vector<std::pair<int, double>>& row) {
        for (auto [i, a] : row)
            for (auto [j, b] : row) {
                if (j < i) continue;
                const double v = lambda * a * b;
                if (j == i) d0[i] += v;
                else if (j == i + 1) d1[i] += v;
                else if (j == i + 2) d2[i] += v;
            }
    };
    if (n >= 2) add_row({{0, -1.0}, {1, 1.0}});
    for (int k = 1; k + 1 < n; ++k) add_row({{k - 1, 1.0}, {k, -2.0}, {k + 1, 1.0}});
}

}  // namespace

std::vector<double> darboux_chain(const std::vector<double>& energies, double threshold, double xmax, double h) {
    if (energies.empty()) throw DomainError("darboux_chain: no levels");
    if (!(h > 0) || !(xmax > h)) throw DomainError("darboux_chain: bad mesh");
    const std::size_t n = static_cast<std::size_t>(std::ceil(xmax / h)) + 1;
    std::vector<double> U(n, threshold), f(n), w;
    std::vector<double> levels = energies;
    std::sort(levels.begin(), levels.end(), std::greater<>());
    for (double e : levels) {
        if (!(e < threshold)) throw DomainError("darboux_chain: level at or above threshold");
        for (std::size_t i = 0; i < n; ++i) f[i] = 2.0 * (U[i] - e);
        integrate_riccati(f, h, w);
        for (std::size_t i = 0; i < n; ++i) U[i] = 2.0 * e - U[i] + w[i] * w[i];
    }
    return U;
}

Grid recommended_grid(const Spectrum& target) {
    const double thr = plateau_threshold(target);
    const double emax = target.energies.back();
    const double xt = classical_turning_point(target, emax);
    const double kappa = std::sqrt(2.0 * (thr - emax));
    const double L = std::max(1.5 * xt, xt + 8.0 / kappa);
    const double h = darboux_step(thr, target.energies.front());
    const auto U = darboux_chain(target.energies, thr, L, h);
    const double umin = *std::min_element(U.begin(), U.end());
    const double lambda_min = 2.0 * std::numbers::pi / std::sqrt(2.0 * (thr - umin));
    const double dx_max = lambda_min / 20.0;
    int M = 256;
    while (2.0 * L / M > dx_max) M *= 2;
    return Grid(L, M);
}

SynthesisResult synthesize_potential(const Spectrum& target, const Grid& grid, const SynthesisOptions& opts) {
    if (target.energies.empty()) throw DomainError("synthesize_potential: empty target");
    const int N = static_cast<int>(target.energies.size());
    const double thr = plateau_threshold(target);
    const double dx = grid.dx();
    const int half = grid.M / 2;

    SynthesisResult result;
    auto& rep = result.report;
    rep.threshold = thr;

    std::vector<double> init;
    if (opts.init == SynthesisOptions::Init::Darboux) {
        const double h = std::min(dx / 4.0, darboux_step(thr, target.energies.front()));
        init = sample_half_line(darboux_chain(target.energies, thr, grid.L + dx, h), h, grid);
    } else {
        init = classical_inverse(target, grid).values;
    }

    std::vector<double> u(init.begin() + half, init.end());
    std::vector<char> frozen(half);
    for (int j = 0; j < half; ++j) frozen[j] = std::abs(u[j] - thr) < 1e-12;

    std::vector<double> s0, s1, s2;
    smoother_bands(half, opts.regularization, s0, s1, s2);

    Potential pot;
    pot.grid = grid;
    pot.threshold = thr;
    pot.values.resize(grid.M);
    auto assemble = [&] {
        for (int j = 0; j < half; ++j) {
            pot.values[half + j] = u[j];
            pot.values[half - 1 - j] = u[j];
        }
    };

    std::vector<double> diag, off;
    Eigen::VectorXd r(N);
    double res = 0.0;
    for (int it = 0;; ++it) {
        assemble();
        hamiltonian_bands(pot, diag, off);
        const auto eig = detail::tridiag_lowest(diag, off, N + 1);
        for (int n = 0; n < N; ++n) r[n] = eig.values[n] - target.energies[n];
        res = r.cwiseAbs().maxCoeff();
        rep.residual_history.push_back(res);
        rep.bound_count = static_cast<int>(
            std::count_if(eig.values.begin(), eig.values.end(), [&](double e) { return e < thr; }));
        if (it == 0) rep.initial_residual = res;
        rep.iterations = it;
        if (res < opts.newton_target || it >= opts.max_iters) break;

        // dE_n/du_j = 2 |psi_n(x_j)|^2 dx (both mirror points move together).
        Eigen::MatrixXd SJt(half, N);
        for (int n = 0; n < N; ++n)
            for (int j = 0; j < half; ++j) {
                const double p = eig.vectors(half + j, n);  // unit 2-norm vector: psi^2 dx = p^2
                SJt(j, n) = frozen[j] ? 0.0 : 2.0 * p * p;
            }
        const Eigen::MatrixXd J = SJt.transpose();
        detail::banded_spd_solve(s0, s1, s2, SJt);
        for (int j = 0; j < half; ++j)
            if (frozen[j]) SJt.row(j).setZero();
        const Eigen::MatrixXd G = J * SJt;
        const Eigen::VectorXd c = G.partialPivLu().solve(-r);
        const Eigen::VectorXd du = SJt * c;
        for (int j = 0; j < half; ++j) u[j] += du[j];
    }
    rep.final_residual = res;
    rep.converged = res <= opts.tolerance && rep.bound_count == N;
    if (res > opts.tolerance)
        rep.message = "residual above tolerance after " + std::to_string(rep.iterations) + " iterations";
    else if (rep.bound_count != N)
        rep.message = "forward solve finds " + std::to_string(rep.bound_count) + " bound states, expected " +
                      std::to_string(N);
    else
        rep.message = "ok";
    result.potential = std::move(pot);
    return result;
}

}  // namespace nqlab
