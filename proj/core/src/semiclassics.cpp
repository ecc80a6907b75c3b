#include "nqlab/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nqlab/errors.hpp"

namespace nqlab {

double ClassicalOrbit::omega() const { return U0 * std::exp(-E / U0); }
double ClassicalOrbit::period() const { return 2.0 * std::numbers::pi / omega(); }
double ClassicalOrbit::amplitude() const { return std::sqrt(std::numbers::pi / 2.0 / U0) * std::exp(E / U0); }
double ClassicalOrbit::potential(double x) const {
    return U0 * std::log(std::sqrt(2.0 * U0 / std::numbers::pi) * std::abs(x));
}

namespace {

// Solves erfc(y) = c for y >= 0 (c in (0, 1]) by bisection; erfc keeps the
// digits near the t = T/4 crossing where erf(y) -> 1.
double erfc_root(double c) {
    if (c >= 1.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (std::erfc(hi) > c) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::erfc(mid) > c) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-13 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double reduce(double t, double T) {
    double r = std::fmod(t, T);
    if (r > T / 2) r -= T;
    if (r < -T / 2) r += T;
    return r;
}

}  // namespace

double classical_x_of_t(const ClassicalOrbit& orbit, double t) {
    const double T = orbit.period(), b = orbit.amplitude();
    const double tau = std::abs(reduce(t, T));
    if (tau <= T / 4) {
        const double y = erfc_root(4.0 * (T / 4 - tau) / T);
        return b * std::exp(-y * y);
    }
    const double y = erfc_root(4.0 * (tau - T / 4) / T);
    return -b * std::exp(-y * y);
}

double classical_v_of_t(const ClassicalOrbit& orbit, double t) {
    const double T = orbit.period();
    const double r = reduce(t, T);
    const double x = classical_x_of_t(orbit, t);
    const double ke = std::max(0.0, orbit.E - orbit.potential(x));
    const double speed = std::sqrt(2.0 * ke);
    return r > 0 ? -speed : speed;
}

ClassicalOrbit orbit_for_levels(int n_row, int n_col, double U0, EnergyConvention convention) {
    if (n_row < 1 || n_col < 1) throw DomainError("orbit_for_levels: labels start at 1");
    ClassicalOrbit o;
    o.U0 = U0;
    o.E = convention == EnergyConvention::Midpoint ? 0.5 * U0 * (std::log(n_row) + std::log(n_col)) : U0 * std::log(n_row);
    return o;
}

double offdiag_estimate(int n_row, int n_col, double U0) {
    const int d = std::abs(n_col - n_row);
    if (d == 0) throw DomainError("offdiag_estimate: use diag_virial for diagonal elements");
    if (d % 2 != 0) return 0.0;
    const double sign = ((d / 2 - 1) % 2 == 0) ? 1.0 : -1.0;
    return sign * U0 / d;
}

double diag_virial(int n, double U0) {
    if (n < 1) throw DomainError("diag_virial: n must be >= 1");
    return U0 * (std::log(static_cast<double>(n)) - 0.5);
}

double fit_amplitude_A(const std::vector<int>& deltas, const std::vector<double>& values) {
    if (deltas.size() != values.size()) throw DomainError("fit_amplitude_A: size mismatch");
    if (deltas.size() < 2) throw DomainError("fit_amplitude_A: need at least two data points");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double inv = 1.0 / std::abs(deltas[i]);
        num += std::abs(values[i]) * inv;
        den += inv * inv;
    }
    return num / den;
}

AmplitudeFit fit_amplitude_A(const EigenBasis& basis, const Potential& potential, int n_center, int dmin, int dmax,
                             double U0) {
    if (dmin < 1 || dmax < dmin) throw DomainError("fit_amplitude_A: bad delta range");
    const int N = basis.count;
    if (n_center < 1 || n_center > N) throw DomainError("fit_amplitude_A: n_center outside the bound spectrum");
    AmplitudeFit fit;
    for (int d = dmin; d <= dmax; ++d) {
        for (int s : {-1, 1}) {
            const int m = n_center + s * d;
            if (m < 1 || m > N) continue;
            const double v = matrix_element(basis, potential.values, n_center - 1, m - 1);
            if (d % 2 != 0) {
                fit.max_odd_element = std::max(fit.max_odd_element, std::abs(v));
                continue;
            }
            const double est = offdiag_estimate(n_center, m, U0);
            fit.deltas.push_back(s * d);
            fit.numeric.push_back(v);
            fit.semiclassical.push_back(est);
            fit.max_relative_deviation = std::max(fit.max_relative_deviation, std::abs(std::abs(v) - std::abs(est)) / std::abs(est));
            if ((v > 0) != (est > 0)) fit.sign_pattern_ok = false;
        }
    }
    std::vector<double> mags;
    for (double v : fit.numeric) mags.push_back(v / U0);
    fit.A = fit_amplitude_A(fit.deltas, mags);
    return fit;
}

namespace {

const double kGx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                       0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
const double kGw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                       0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Integral over [0, T/2] on a mesh with `panels` uniform panels per half and
// geometric grading into the crossing at T/4 (where log observables blow up).
std::pair<double, double> graded_integral(const std::function<double(double)>& f, double T, int panels) {
    const double q = T / 4;
    std::vector<double> cuts;
    auto add_half = [&](double a, double b, bool grade_at_b) {
        const double len = b - a;
        const int levels = 40;
        const double edge = grade_at_b ? b : a;
        const double dir = grade_at_b ? -1.0 : 1.0;
        std::vector<double> local;
        for (int i = 0; i <= panels; ++i) local.push_back(a + len * i / panels);
        const double h0 = len / panels;
        for (int k = 1; k <= levels; ++k) local.push_back(edge + dir * h0 * std::pow(0.5, k));
        for (double c : local) cuts.push_back(c);
    };
    add_half(0.0, q, true);
    add_half(q, 2 * q, false);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double s = 0.0, sabs = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1], c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int k = 0; k < 8; ++k) {
            const double v = f(c + h * kGx[k]);
            s += kGw[k] * h * v;
            sabs += kGw[k] * h * std::abs(v);
        }
    }
    return {s, sabs};
}

}  // namespace

double fourier_matrix_element(const std::function<double(double)>& x_of_t, double period,
                              const std::function<double(double)>& observable, int delta_n, double rel_tol,
                              int max_panels) {
    if (!(period > 0)) throw DomainError("fourier_matrix_element: period must be positive");
    const double omega = 2.0 * std::numbers::pi / period;
    auto integrand = [&](double tau) { return observable(x_of_t(tau)) * std::cos(delta_n * omega * tau); };
    auto scale_fn = [&](double tau) { return observable(x_of_t(tau)); };
    const double scale = graded_integral(scale_fn, period, 8).second * 2.0 / period;
    int panels = 4 + 2 * std::abs(delta_n);
    double prev = graded_integral(integrand, period, panels).first;
    for (;;) {
        panels *= 2;
        if (panels > max_panels)
            throw RefinementError("fourier_matrix_element: quadrature did not converge for dn=" + std::to_string(delta_n));
        const double cur = graded_integral(integrand, period, panels).first;
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), scale)) {
            const double I = 2.0 * cur / period;
            return (delta_n % 2 == 0) ? I : -I;  // shift the origin to the left turning point
        }
        prev = cur;
    }
}

double fourier_matrix_element(const ClassicalOrbit& orbit, const std::function<double(double)>& observable,
                              int delta_n, double rel_tol, int max_panels) {
    return fourier_matrix_element([&](double t) { return classical_x_of_t(orbit, t); }, orbit.period(), observable,
                                  delta_n, rel_tol, max_panels);
}

}  // namespace nqlab
