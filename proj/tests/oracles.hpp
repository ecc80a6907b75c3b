#pragma once

// Reference implementations used only by tests. Each one is deliberately a
// different algorithm from the library code it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

// Linear (Euler) sieve.
inline std::vector<std::uint64_t> linear_sieve(std::uint64_t n) {
    std::vector<std::uint64_t> primes;
    std::vector<std::uint32_t> lp(n + 1, 0);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (lp[i] == 0) {
            lp[i] = static_cast<std::uint32_t>(i);
            primes.push_back(i);
        }
        for (std::uint64_t p : primes) {
            if (p > lp[i] || i * p > n) break;
            lp[i * p] = static_cast<std::uint32_t>(p);
        }
    }
    return primes;
}

inline bool trial_division(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<char> prime_flags(std::uint64_t n) {
    std::vector<char> f(n + 1, 1);
    f[0] = 0;
    if (n >= 1) f[1] = 0;
    for (std::uint64_t i = 2; i * i <= n; ++i)
        if (f[i])
            for (std::uint64_t j = i * i; j <= n; j += i) f[j] = 0;
    return f;
}

// Number of Goldbach partitions w = p + q, 3 <= p <= q, and whether any uses a lower twin.
struct Partitions {
    std::uint64_t count = 0;
    bool twin = false;
};

inline Partitions brute_partitions(const std::vector<char>& isp, std::uint64_t w) {
    Partitions r;
    for (std::uint64_t p = 3; 2 * p <= w; p += 2) {
        const std::uint64_t q = w - p;
        if (!isp[p] || !isp[q]) continue;
        ++r.count;
        if ((p + 2 < isp.size() && isp[p + 2]) || (q + 2 < isp.size() && isp[q + 2])) r.twin = true;
    }
    return r;
}

// Number of eigenvalues of the symmetric tridiagonal (d, e) below x, by the
// LDL^T inertia count.
inline int sturm_count(const std::vector<double>& d, const std::vector<double>& e, double x) {
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double off = i ? e[i - 1] * e[i - 1] : 0.0;
        q = d[i] - x - (i ? off / q : 0.0);
        if (q == 0.0) q = -1e-300;
        if (q < 0) ++count;
    }
    return count;
}

// k-th smallest eigenvalue (0-based) by bisection.
inline double sturm_eigenvalue(const std::vector<double>& d, const std::vector<double>& e, int k, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(d, e, mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Bisection to full relative precision inside [lo, hi] of one sign.
inline double sturm_eigenvalue_rel(const std::vector<double>& d, const std::vector<double>& e, int k, double lo, double hi) {
    for (int it = 0; it < 3000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (sturm_count(d, e, mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Eigenvector for a known eigenvalue by inverse iteration (Thomas solver).
inline std::vector<double> inverse_iteration(const std::vector<double>& d, const std::vector<double>& e, double E) {
    const std::size_t n = d.size();
    std::vector<double> v(n, 1.0), c(n), z(n);
    const double shift = E + 1e-10 * std::max(1.0, std::abs(E));
    for (int it = 0; it < 4; ++it) {
        double b0 = d[0] - shift;
        c[0] = n > 1 ? e[0] / b0 : 0.0;
        z[0] = v[0] / b0;
        for (std::size_t i = 1; i < n; ++i) {
            const double b = d[i] - shift - e[i - 1] * c[i - 1];
            if (i + 1 < n) c[i] = e[i] / b;
            z[i] = (v[i] - e[i - 1] * z[i - 1]) / b;
        }
        for (std::size_t i = n - 1; i-- > 0;) z[i] -= c[i] * z[i + 1];
        double nrm = 0.0;
        for (double x : z) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / nrm;
    }
    return v;
}

// Finite-difference Hamiltonian bands on a cell-centred grid.
inline void fd_bands(const std::vector<double>& U, double dx, std::vector<double>& d, std::vector<double>& e) {
    d.resize(U.size());
    e.assign(U.size() - 1, -0.5 / (dx * dx));
    for (std::size_t i = 0; i < U.size(); ++i) d[i] = 1.0 / (dx * dx) + U[i];
}

// Two-level system |a>, |b> split by w0 with coupling beta*mu*cos(w t), integrated
// with classical RK4 in the lab frame (no rotating-wave approximation).
inline double two_level_peak(double w0, double mu, double beta, double omega, double T, double dt) {
    using cd = std::complex<double>;
    cd a = 1.0, b = 0.0;
    const cd I(0.0, 1.0);
    auto f = [&](double t, cd x, cd y, cd& dx, cd& dy) {
        const double g = beta * mu * std::cos(omega * t);
        dx = -I * (g * y);
        dy = -I * (w0 * y + g * x);
    };
    double peak = 0.0;
    for (double t = 0.0; t < T; t += dt) {
        cd k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        f(t, a, b, k1a, k1b);
        f(t + dt / 2, a + dt / 2 * k1a, b + dt / 2 * k1b, k2a, k2b);
        f(t + dt / 2, a + dt / 2 * k2a, b + dt / 2 * k2b, k3a, k3b);
        f(t + dt, a + dt * k3a, b + dt * k3b, k4a, k4b);
        a += dt / 6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += dt / 6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        peak = std::max(peak, std::norm(b));
    }
    return peak;
}

}  // namespace oracle
