#include "nqlab/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "linalg.hpp"
#include "nqlab/errors.hpp"

namespace nqlab {

ExponentialLattice::ExponentialLattice(double J0, double gamma, int m_left, int m_right)
    : J0_(J0), gamma_(gamma), m_left_(m_left), m_right_(m_right) {
    if (!(J0 > 0)) throw DomainError("ExponentialLattice: J0 must be positive");
    if (!(gamma > 0)) throw DomainError("ExponentialLattice: gamma must be positive");
    if (m_left % 2 != 0) throw DomainError("ExponentialLattice: m_left must be even");
    if (!(m_left < m_right)) throw DomainError("ExponentialLattice: need m_left < m_right");
    if (m_right - m_left + 1 > 10000) throw DomainError("ExponentialLattice: at most 10^4 sites");
}

double ExponentialLattice::hopping(int m) const { return J0_ * std::exp(-gamma_ * m); }

std::vector<double> LatticeSpectrum::energies() const {
    std::vector<double> e;
    e.reserve(states.size());
    for (const auto& s : states) e.push_back(s.energy);
    return e;
}

std::vector<int> LatticeSpectrum::by_magnitude() const {
    std::vector<int> idx(states.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return std::abs(states[a].energy) > std::abs(states[b].energy); });
    return idx;
}

int LatticeSpectrum::nearest(double E) const {
    int best = -1;
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < static_cast<int>(states.size()); ++i) {
        const double g = std::abs(states[i].energy - E);
        if (g < gap) {
            gap = g;
            best = i;
        }
    }
    return best;
}

namespace {

// Off-diagonal t_i = -J_{m_left+i} couples sites i and i+1.
std::vector<double> off_diagonal(const ExponentialLattice& lat) {
    std::vector<double> t(lat.sites() - 1);
    for (int i = 0; i + 1 < lat.sites(); ++i) t[i] = -lat.hopping(lat.m_left() + i);
    return t;
}

std::vector<double> kernel_vector(const std::vector<double>& t, int n) {
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    for (int j = 0; 2 * j + 2 < n; ++j) z[2 * j + 2] = -(t[2 * j] / t[2 * j + 1]) * z[2 * j];
    return z;
}

std::vector<double> twisted_vector(const std::vector<double>& t, int n, double E) {
    const double tiny = std::numeric_limits<double>::min() * 1e10;
    auto guard = [&](double v) { return v == 0.0 ? tiny : v; };
    std::vector<double> d(n), p(n);
    d[0] = guard(-E);
    for (int i = 1; i < n; ++i) d[i] = guard(-E - t[i - 1] * t[i - 1] / d[i - 1]);
    p[n - 1] = guard(-E);
    for (int i = n - 2; i >= 0; --i) p[i] = guard(-E - t[i] * t[i] / p[i + 1]);
    int k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double g = std::abs(d[i] + p[i] + E);
        if (g < best) {
            best = g;
            k = i;
        }
    }
    std::vector<double> z(n, 0.0);
    z[k] = 1.0;
    for (int i = k - 1; i >= 0; --i) z[i] = -(t[i] / d[i]) * z[i + 1];
    for (int i = k + 1; i < n; ++i) z[i] = -(t[i - 1] / p[i]) * z[i - 1];
    return z;
}

void finish_state(LatticeEigenstate& s, const std::vector<double>& t, double J0, int m_left) {
    auto& z = s.psi;
    const int n = static_cast<int>(z.size());
    // Two-pass norm to avoid overflow of z^2 when amplitudes span many decades.
    double big = 0.0;
    for (double v : z) big = std::max(big, std::abs(v));
    double ss = 0.0;
    for (double v : z) ss += (v / big) * (v / big);
    const double scale = 1.0 / (big * std::sqrt(ss));
    for (double& v : z) v *= scale;
    const auto imax = std::max_element(z.begin(), z.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*imax < 0)
        for (double& v : z) v = -v;
    double w2 = 0.0, c = 0.0, w4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = z[i] * z[i];
        w2 += q;
        w4 += q * q;
        c += q * q * (m_left + i);
    }
    s.center = w4 > 0 ? c / w4 : 0.0;
    (void)w2;
    s.residual_abs = 0.0;
    s.residual_rel = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double a = t[i - 1] * z[i - 1], b = t[i] * z[i + 1], e = s.energy * z[i];
        const double r = std::abs(a + b - e);
        const double mag = std::abs(a) + std::abs(b) + std::abs(e);
        s.residual_abs = std::max(s.residual_abs, r / J0);
        // Below ~1e-250 the amplitudes are in the underflow range and carry no digits.
        if (mag > 1e-250) s.residual_rel = std::max(s.residual_rel, r / mag);
    }
}

}  // namespace

LatticeSpectrum diagonalize(const ExponentialLattice& lat) {
    const int n = lat.sites();
    const auto t = off_diagonal(lat);
    // Even sites index rows, odd sites columns: upper bidiagonal B^T with diagonal
    // t_0, t_2, ... and super-diagonal t_1, t_3, ...; odd n is padded with a zero bond.
    const int ne = (n + 1) / 2;
    std::vector<double> d(ne, 0.0), e(std::max(ne - 1, 0), 0.0);
    for (int j = 0; j < ne; ++j) d[j] = 2 * j < n - 1 ? t[2 * j] : 0.0;
    for (int j = 0; j + 1 < ne; ++j) e[j] = 2 * j + 1 < n - 1 ? t[2 * j + 1] : 0.0;
    auto sv = detail::bidiagonal_singular_values(d, e);
    std::sort(sv.begin(), sv.end());
    std::vector<double> evals;
    std::size_t start = 0;
    if (n % 2 == 1) {
        evals.push_back(0.0);  // the padded zero bond adds one spurious zero
        start = 1;
    }
    for (std::size_t i = start; i < sv.size(); ++i) {
        evals.push_back(sv[i]);
        evals.push_back(-sv[i]);
    }
    std::sort(evals.begin(), evals.end());

    LatticeSpectrum out;
    out.m_left = lat.m_left();
    out.states.resize(evals.size());
    for (std::size_t k = 0; k < evals.size(); ++k) {
        auto& s = out.states[k];
        s.energy = evals[k];
        s.psi = (s.energy == 0.0) ? kernel_vector(t, n) : twisted_vector(t, n, s.energy);
        finish_state(s, t, lat.J0(), lat.m_left());
    }
    return out;
}

TailComparison dark_state_tail(const ExponentialLattice& lat, const LatticeEigenstate& state, int m_DS) {
    if (m_DS < lat.m_left() || m_DS > lat.m_right()) throw DomainError("dark_state_tail: m_DS outside lattice");
    if ((m_DS - lat.m_left()) % 2 != 0) throw DomainError("dark_state_tail: m_DS must sit at an even offset from m_left");
    TailComparison out;
    const double anchor = state.psi[lat.index(m_DS)];
    out.valid = lat.hopping(m_DS) >= 10.0 * std::abs(state.energy);
    for (int m = m_DS; m >= lat.m_left(); --m) {
        const int k = m_DS - m;
        const double pred = (k % 2 == 0) ? ((k / 2) % 2 == 0 ? 1.0 : -1.0) * std::exp(-lat.gamma() * k / 2.0) * anchor : 0.0;
        const double ex = state.psi[lat.index(m)];
        out.sites.push_back(m);
        out.predicted.push_back(pred);
        out.exact.push_back(ex);
        if (k % 2 == 0 && ex != 0.0) out.max_relative_residual = std::max(out.max_relative_residual, std::abs(pred - ex) / std::abs(ex));
    }
    return out;
}

TailComparison cf_tail(const ExponentialLattice& lat, const LatticeEigenstate& state, int m_CF, int m_end) {
    if (m_CF < lat.m_left() || m_end > lat.m_right() || m_end < m_CF) throw DomainError("cf_tail: bad site range");
    const double E = state.energy;
    if (E == 0.0) throw DomainError("cf_tail: zero-energy state has no forbidden region");
    TailComparison out;
    out.valid = std::abs(E) >= 10.0 * std::exp(std::sqrt(lat.gamma())) * lat.hopping(m_CF);
    const double anchor = state.psi[lat.index(m_CF)];
    const double sign = E > 0 ? -1.0 : 1.0;
    // Work in logs: the ratio spans hundreds of decades.
    for (int m = m_CF; m <= m_end; ++m) {
        const int k = m - m_CF;
        double pred = anchor;
        if (k > 0) {
            const double log_base = 0.5 * (std::log(lat.hopping(m_CF)) + std::log(lat.hopping(m - 1))) - std::log(std::abs(E));
            pred *= std::exp(k * log_base) * ((k % 2 == 1) ? sign : 1.0);
        }
        const double ex = state.psi[lat.index(m)];
        out.sites.push_back(m);
        out.predicted.push_back(pred);
        out.exact.push_back(ex);
        if (std::abs(ex) > 1e-280) out.max_relative_residual = std::max(out.max_relative_residual, std::abs(pred - ex) / std::abs(ex));
    }
    return out;
}

int dark_state_anchor(const ExponentialLattice& lat, double E) {
    for (int m = lat.m_right(); m >= lat.m_left(); --m)
        if ((m - lat.m_left()) % 2 == 0 && lat.hopping(m) >= 10.0 * std::abs(E)) return m;
    throw DomainError("dark_state_anchor: no site with J_m >= 10|E|");
}

int cf_anchor(const ExponentialLattice& lat, double E) {
    const double bound = std::abs(E) / (10.0 * std::exp(std::sqrt(lat.gamma())));
    for (int m = lat.m_left(); m <= lat.m_right(); ++m)
        if (lat.hopping(m) <= bound) return m;
    throw DomainError("cf_anchor: no site with |E| >= 10 e^{sqrt(gamma)} J_m");
}

double bremmer_wkb(const ExponentialLattice& lat, double E, int m_start, int m_end, double psi_start) {
    if (m_start == m_end) return psi_start;
    if (E == 0.0) throw DomainError("bremmer_wkb: zero energy");
    const int lo = std::min(m_start, m_end), hi = std::max(m_start, m_end);
    auto kappa = [&](int m) {
        const double ratio = std::abs(E) / (2.0 * lat.hopping(m));
        if (ratio < 1.0) throw DomainError("bremmer_wkb: |E| < 2 J_m at m=" + std::to_string(m) + ", kappa undefined");
        return std::acosh(ratio);
    };
    double log_amp = 0.0;
    for (int j = lo; j < hi; ++j) log_amp -= kappa(j);
    const double kl = kappa(lo), kh = kappa(hi - 1);
    log_amp += 0.5 * (std::log(lat.hopping(lo) * std::sinh(kl)) - std::log(lat.hopping(hi - 1) * std::sinh(kh)));
    const int steps = hi - lo;
    const double sign = (E > 0 && steps % 2 == 1) ? -1.0 : 1.0;
    if (m_end > m_start) return psi_start * sign * std::exp(log_amp);
    return psi_start * sign * std::exp(-log_amp);
}

std::vector<TranslationCheck> translation_checks(const ExponentialLattice& lat, const LatticeSpectrum& spec, int dm,
                                                 int edge_margin) {
    if (dm % 2 != 0) throw DomainError("translation_checks: dm must be even");
    std::vector<TranslationCheck> out;
    const double ratio = std::exp(-lat.gamma() * dm);
    for (int i = 0; i < static_cast<int>(spec.states.size()); ++i) {
        const auto& s = spec.states[i];
        if (s.energy <= 0) continue;
        const double c = s.center, c2 = s.center + dm;
        if (std::min(c, c2) < lat.m_left() + edge_margin || std::max(c, c2) > lat.m_right() - edge_margin) continue;
        const double target = s.energy * ratio;
        const int j = spec.nearest(target);
        out.push_back({i, j, ratio, std::abs(spec.states[j].energy - target) / std::abs(target)});
    }
    return out;
}

int bulk_margin(double gamma, double tol) {
    return std::max(20, static_cast<int>(std::ceil(std::log(1.0 / tol) / gamma)));
}

double parity_pairing_error(const LatticeSpectrum& spec) {
    const auto e = spec.energies();
    double worst = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(e[i] + e[e.size() - 1 - i]));
    return worst;
}

CascadeLatticeMap cascade_lattice_map(double A, double ntilde, double beta, double U0) {
    if (!(ntilde > 1)) throw DomainError("cascade_lattice_map: ntilde must exceed 1");
    return {0.5 * beta * U0 * A / (ntilde - 1.0), std::log(ntilde)};
}

std::vector<double> site_return_probability(const ExponentialLattice& lat, int site, const std::vector<double>& times) {
    const int n = lat.sites();
    if (n > 400) throw DomainError("site_return_probability: intended for short chains");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) H(i, i + 1) = H(i + 1, i) = -lat.hopping(lat.m_left() + i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const int k = lat.index(site);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        std::complex<double> amp = 0.0;
        for (int j = 0; j < n; ++j) {
            const double v = es.eigenvectors()(k, j);
            amp += v * v * std::exp(std::complex<double>(0.0, -es.eigenvalues()[j] * t));
        }
        out.push_back(std::norm(amp));
    }
    return out;
}

}  // namespace nqlab
