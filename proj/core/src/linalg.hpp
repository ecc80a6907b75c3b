#pragma once

#include <Eigen/Dense>
#include <vector>

namespace nqlab::detail {

struct TridiagEigen {
    std::vector<double> values;
    Eigen::MatrixXd vectors;  // columns, unit 2-norm
};

// Lowest `count` eigenpairs of the symmetric tridiagonal matrix (diag, off).
TridiagEigen tridiag_lowest(const std::vector<double>& diag, const std::vector<double>& off, int count,
                            bool vectors = true);

// All eigenpairs with eigenvalue < upper.
TridiagEigen tridiag_below(const std::vector<double>& diag, const std::vector<double>& off, double upper,
                           bool vectors = true);

// Solves (band SPD with two super-diagonals) X = B in place. ab is LAPACK upper
// band storage: ab[0] = 2nd superdiag, ab[1] = 1st superdiag, ab[2] = diagonal.
void banded_spd_solve(const std::vector<double>& d0, const std::vector<double>& d1, const std::vector<double>& d2,
                      Eigen::MatrixXd& rhs);

// Singular values (descending) of the upper bidiagonal matrix with diagonal d
// and super-diagonal e, to high relative accuracy (implicit zero-shift QR/dqds).
std::vector<double> bidiagonal_singular_values(std::vector<double> d, std::vector<double> e);

}  // namespace nqlab::detail
