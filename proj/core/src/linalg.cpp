#include "linalg.hpp"

#include <lapacke.h>

#include <limits>
#include <stdexcept>
#include <string>

namespace nqlab::detail {

namespace {

TridiagEigen run_stevr(const std::vector<double>& diag, const std::vector<double>& off, char range, double vl,
                       double vu, int il, int iu, bool vectors) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    if (n == 0) return {};
    std::vector<double> d = diag, e = off;
    e.resize(static_cast<std::size_t>(n), 0.0);
    lapack_int m = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    const lapack_int max_cols = range == 'I' ? iu - il + 1 : n;
    std::vector<double> z(vectors ? static_cast<std::size_t>(n) * static_cast<std::size_t>(max_cols) : 1);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(max_cols));
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, n, d.data(), e.data(), vl, vu,
                                           il, iu, 0.0, &m, w.data(), z.data(), n, isuppz.data());
    if (info != 0) throw std::runtime_error("dstevr failed with info=" + std::to_string(info));
    TridiagEigen out;
    out.values.assign(w.begin(), w.begin() + m);
    if (vectors) out.vectors = Eigen::Map<Eigen::MatrixXd>(z.data(), n, max_cols).leftCols(m);
    return out;
}

}  // namespace

TridiagEigen tridiag_lowest(const std::vector<double>& diag, const std::vector<double>& off, int count, bool vectors) {
    const int n = static_cast<int>(diag.size());
    if (count > n) count = n;
    if (count <= 0) return {};
    return run_stevr(diag, off, 'I', 0.0, 0.0, 1, count, vectors);
}

TridiagEigen tridiag_below(const std::vector<double>& diag, const std::vector<double>& off, double upper,
                           bool vectors) {
    return run_stevr(diag, off, 'V', -std::numeric_limits<double>::max(), upper, 0, 0, vectors);
}

void banded_spd_solve(const std::vector<double>& d0, const std::vector<double>& d1, const std::vector<double>& d2,
                      Eigen::MatrixXd& rhs) {
    const lapack_int n = static_cast<lapack_int>(d0.size());
    std::vector<double> ab(3 * static_cast<std::size_t>(n), 0.0);
    for (lapack_int j = 0; j < n; ++j) {
        ab[3 * j + 2] = d0[j];
        if (j >= 1) ab[3 * j + 1] = d1[j - 1];
        if (j >= 2) ab[3 * j + 0] = d2[j - 2];
    }
    const lapack_int info = LAPACKE_dpbsv(LAPACK_COL_MAJOR, 'U', n, 2, static_cast<lapack_int>(rhs.cols()), ab.data(), 3,
                                          rhs.data(), static_cast<lapack_int>(rhs.rows()));
    if (info != 0) throw std::runtime_error("dpbsv failed with info=" + std::to_string(info));
}

std::vector<double> bidiagonal_singular_values(std::vector<double> d, std::vector<double> e) {
    const lapack_int n = static_cast<lapack_int>(d.size());
    if (n == 0) return {};
    e.resize(static_cast<std::size_t>(n), 0.0);
    double dummy = 0.0;
    const lapack_int info =
        LAPACKE_dbdsqr(LAPACK_COL_MAJOR, 'U', n, 0, 0, 0, d.data(), e.data(), &dummy, 1, &dummy, 1, &dummy, 1);
    if (info != 0) throw std::runtime_error("dbdsqr failed with info=" + std::to_string(info));
    return d;
}

}  // namespace nqlab::detail
