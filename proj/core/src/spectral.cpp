#include "nqlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "linalg.hpp"
#include "nqlab/errors.hpp"

namespace nqlab {

Grid::Grid(double half_width, int points) : L(half_width), M(points) {
    if (!(half_width > 0)) throw DomainError("Grid: half width must be positive");
    if (points < 2 || points % 2 != 0) throw DomainError("Grid: point count must be even and >= 2");
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) xs[i] = x(i);
    return xs;
}

std::vector<double> Potential::sample(const std::function<double(double)>& f) const {
    std::vector<double> out(static_cast<std::size_t>(grid.M));
    for (int i = 0; i < grid.M; ++i) out[i] = f(grid.x(i));
    return out;
}

Eigen::Map<const Eigen::VectorXd> EigenBasis::state(int n) const {
    if (n < 0 || n >= size()) throw DomainError("EigenBasis: state index " + std::to_string(n) + " out of range");
    return Eigen::Map<const Eigen::VectorXd>(wavefunctions.col(n).data(), wavefunctions.rows());
}

void hamiltonian_bands(const Potential& potential, std::vector<double>& diag, std::vector<double>& off) {
    const int M = potential.grid.M;
    if (static_cast<int>(potential.values.size()) != M) throw DomainError("Potential: value count does not match grid");
    const double dx = potential.grid.dx();
    diag.resize(M);
    off.assign(M - 1, -0.5 / (dx * dx));
    for (int i = 0; i < M; ++i) {
        if (!std::isfinite(potential.values[i])) throw DomainError("Potential: non-finite value");
        diag[i] = 1.0 / (dx * dx) + potential.values[i];
    }
}

namespace {

EigenBasis make_basis(const Potential& potential, detail::TridiagEigen&& eig) {
    EigenBasis b;
    b.grid = potential.grid;
    b.energies = std::move(eig.values);
    b.wavefunctions = std::move(eig.vectors);
    const double scale = 1.0 / std::sqrt(potential.grid.dx());
    b.wavefunctions *= scale;
    for (int n = 0; n < b.wavefunctions.cols(); ++n) {
        auto col = b.wavefunctions.col(n);
        const double cut = 1e-3 * col.cwiseAbs().maxCoeff();
        for (int i = static_cast<int>(col.size()) - 1; i >= 0; --i) {
            if (std::abs(col[i]) >= cut) {
                if (col[i] < 0) col *= -1.0;
                break;
            }
        }
    }
    b.count = static_cast<int>(
        std::count_if(b.energies.begin(), b.energies.end(), [&](double e) { return e < potential.threshold; }));
    return b;
}

void check_resolution(const Potential& p) {
    const double umin = *std::min_element(p.values.begin(), p.values.end());
    if (p.threshold <= umin) return;
    const double kmax = std::sqrt(2.0 * (p.threshold - umin));
    if (kmax * p.grid.dx() > std::numbers::pi / 2.0)
        throw ResolutionError("grid spacing " + std::to_string(p.grid.dx()) +
                              " resolves fewer than four points per local wavelength below threshold");
}

int weyl_estimate(const Potential& p) {
    double phase = 0.0;
    for (double u : p.values)
        if (u < p.threshold) phase += std::sqrt(2.0 * (p.threshold - u));
    return static_cast<int>(std::floor(phase * p.grid.dx() / std::numbers::pi + 0.5));
}

}  // namespace

EigenBasis solve_bound_states(const Potential& potential) {
    check_resolution(potential);
    std::vector<double> d, e;
    hamiltonian_bands(potential, d, e);
    auto basis = make_basis(potential, detail::tridiag_below(d, e, potential.threshold));
    const int expected = weyl_estimate(potential);
    const int slack = 2 + expected / 20;
    if (basis.count + slack < expected)
        throw ResolutionError("found " + std::to_string(basis.count) + " bound states, Weyl estimate is " +
                              std::to_string(expected) + "; box or grid too small");
    return basis;
}

EigenBasis solve_states(const Potential& potential, int n_states) {
    if (n_states < 1) throw DomainError("solve_states: need at least one state");
    check_resolution(potential);
    std::vector<double> d, e;
    hamiltonian_bands(potential, d, e);
    return make_basis(potential, detail::tridiag_lowest(d, e, n_states));
}

double matrix_element(const EigenBasis& basis, const std::vector<double>& f, int n_row, int n_col) {
    if (n_row < 0 || n_col < 0 || n_row >= basis.size() || n_col >= basis.size())
        throw DomainError("matrix_element: index out of range");
    if (static_cast<int>(f.size()) != basis.grid.M) throw DomainError("matrix_element: sample count does not match grid");
    const auto a = basis.wavefunctions.col(n_row);
    const auto b = basis.wavefunctions.col(n_col);
    double s = 0.0;
    for (int i = 0; i < basis.grid.M; ++i) s += a[i] * f[i] * b[i];
    return s * basis.grid.dx();
}

Eigen::MatrixXd operator_matrix(const EigenBasis& basis, const std::vector<double>& f, int n_states) {
    if (n_states > basis.size()) throw DomainError("operator_matrix: basis has fewer states than requested");
    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    const auto psi = basis.wavefunctions.leftCols(n_states);
    Eigen::MatrixXd out = psi.transpose() * fv.asDiagonal() * psi * basis.grid.dx();
    return 0.5 * (out + out.transpose());
}

double plateau_threshold(const Spectrum& s) {
    if (s.energies.empty()) throw DomainError("plateau_threshold: empty spectrum");
    const auto N = s.energies.size();
    if (N == 1) return s.energies[0] + 0.5 * s.U0;
    return s.energies[N - 1] + 0.5 * (s.energies[N - 1] - s.energies[N - 2]);
}

namespace {

bool is_log_of_naturals(const Spectrum& s) {
    return s.kind == SequenceKind::LnNaturals || s.kind == SequenceKind::LnNaturalsWithHoles;
}

// Monotone (Fritsch-Carlson) cubic for the counting function n(E), with the
// Bohr-Sommerfeld offset n = 1/2 at the bottom of the well.
class CountingFunction {
public:
    explicit CountingFunction(const Spectrum& s) {
        const auto& E = s.energies;
        for (std::size_t i = 1; i < E.size(); ++i)
            if (!(E[i] > E[i - 1])) throw DomainError("classical_inverse: spectrum must be strictly increasing");
        const double gap0 = E.size() > 1 ? E[1] - E[0] : s.U0;
        e_.push_back(E[0] - 0.5 * gap0);
        n_.push_back(0.5);
        for (std::size_t i = 0; i < E.size(); ++i) {
            e_.push_back(E[i]);
            n_.push_back(static_cast<double>(i + 1));
        }
        const std::size_t K = e_.size();
        std::vector<double> delta(K - 1);
        for (std::size_t i = 0; i + 1 < K; ++i) delta[i] = (n_[i + 1] - n_[i]) / (e_[i + 1] - e_[i]);
        m_.resize(K);
        m_[0] = delta[0];
        m_[K - 1] = delta[K - 2];
        for (std::size_t i = 1; i + 1 < K; ++i) m_[i] = (delta[i - 1] * delta[i] > 0) ? 0.5 * (delta[i - 1] + delta[i]) : 0.0;
        for (std::size_t i = 0; i + 1 < K; ++i) {
            const double a = m_[i] / delta[i], b = m_[i + 1] / delta[i];
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double t = 3.0 / std::sqrt(r);
                m_[i] = t * a * delta[i];
                m_[i + 1] = t * b * delta[i];
            }
        }
    }

    double bottom() const { return e_.front(); }

    // dn/dE; linear continuation above the top level.
    double slope(double E) const {
        if (E <= e_.front()) return m_.front();
        if (E >= e_.back()) return m_.back();
        const auto it = std::upper_bound(e_.begin(), e_.end(), E);
        const std::size_t i = static_cast<std::size_t>(it - e_.begin()) - 1;
        const double h = e_[i + 1] - e_[i], t = (E - e_[i]) / h;
        const double dh00 = 6 * t * t - 6 * t, dh10 = 3 * t * t - 4 * t + 1, dh01 = -dh00, dh11 = 3 * t * t - 2 * t;
        return (dh00 * n_[i] + dh01 * n_[i + 1]) / h + dh10 * m_[i] + dh11 * m_[i + 1];
    }

private:
    std::vector<double> e_, n_, m_;
};

// x(U) = sqrt(2) * int_0^{sqrt(U - E_b)} g(U - u^2) du, composite Gauss-Legendre.
double abel_x(const CountingFunction& cf, double U) {
    const double top = U - cf.bottom();
    if (top <= 0) return 0.0;
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    const int panels = 400;
    const double umax = std::sqrt(top), h = umax / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = (p + 0.5) * h;
        for (int k = 0; k < 5; ++k) {
            const double u = c + 0.5 * h * gx[k];
            s += gw[k] * cf.slope(U - u * u);
        }
    }
    return std::numbers::sqrt2 * s * 0.5 * h;
}

}  // namespace

double classical_turning_point(const Spectrum& s, double U) {
    if (is_log_of_naturals(s)) return std::sqrt(std::numbers::pi / 2.0 / s.U0) * std::exp(U / s.U0);
    return abel_x(CountingFunction(s), U);
}

Potential classical_inverse(const Spectrum& s, const Grid& grid) {
    Potential p;
    p.grid = grid;
    p.threshold = plateau_threshold(s);
    p.values.resize(grid.M);
    if (is_log_of_naturals(s)) {
        // Continuous counting function n = exp(E/U0) with n_b = 0 gives the closed form.
        for (int i = 0; i < grid.M; ++i) {
            const double x = std::abs(grid.x(i));
            p.values[i] = std::min(p.threshold, s.U0 * std::log(std::sqrt(2.0 * s.U0 / std::numbers::pi) * x));
        }
        return p;
    }
    const CountingFunction cf(s);
    const int K = 4000;
    std::vector<double> us(K + 1), xs(K + 1);
    for (int k = 0; k <= K; ++k) {
        us[k] = cf.bottom() + (p.threshold - cf.bottom()) * k / K;
        xs[k] = abel_x(cf, us[k]);
    }
    for (int i = 0; i < grid.M; ++i) {
        const double x = std::abs(grid.x(i));
        if (x >= xs.back()) {
            p.values[i] = p.threshold;
            continue;
        }
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        p.values[i] = us[j - 1] + t * (us[j] - us[j - 1]);
    }
    return p;
}

}  // namespace nqlab
