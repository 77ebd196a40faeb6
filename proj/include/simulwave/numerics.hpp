#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "simulwave/matrix.hpp"

namespace simulwave::numerics {

/// Nodes and weights of a composite quadrature rule on [lo, hi].
/// Invariants (checked by make_gauss_legendre): nodes strictly increasing
/// inside the interval, weights positive and summing to hi - lo.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double lo = 0.0;
  double hi = 0.0;
};

/// Composite 5-point Gauss-Legendre rule with the given number of equal
/// panels (>= 1). Exact through degree 9 on each panel.
QuadratureRule make_gauss_legendre(double lo, double hi, std::size_t panels);

/// Integrate f over [lo, hi] with the composite 5-point Gauss-Legendre rule.
double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    std::size_t panels);

struct SymmetricEigen {
  std::vector<double> eigenvalues;   // ascending
  DenseMatrix eigenvectors;          // columns, orthonormal, first
                                     // significant entry of each made positive
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Rejects matrices whose symmetry defect exceeds 1e-12 relative to the
/// largest entry. Intended for desk-scale problems (dimension up to a few
/// hundred).
SymmetricEigen sym_eig(const DenseMatrix& m);

/// Numerical rank: number of singular values above tol * sigma_max.
/// tol <= 0 selects the default 1e-8. Non-finite entries are rejected.
std::size_t rank_with_tolerance(const DenseMatrix& m, double tol = 0.0);

/// Cholesky factor L (lower triangular) of a symmetric positive definite
/// matrix; throws if a pivot is not strictly positive.
DenseMatrix cholesky(const DenseMatrix& m);

struct GeneralizedEigen {
  std::vector<double> eigenvalues;   // ascending
  DenseMatrix eigenvectors;          // columns z_i with z_i^T M z_j = delta_ij
};

/// Eigenpairs of A z = lambda M z for symmetric A and SPD M, reduced through
/// the Cholesky factor of M.
GeneralizedEigen generalized_eig(const DenseMatrix& a, const DenseMatrix& m);

/// Smallest generalized eigenvalue of (a, m); m must be SPD.
double generalized_min_eig(const DenseMatrix& a, const DenseMatrix& m);

/// Conjugate-gradient solve for SPD systems. Relative residual tolerance;
/// tol <= 0 selects 1e-12. Throws if 10 * dimension iterations do not reach
/// the tolerance.
std::vector<double> solve_spd(const DenseMatrix& a, const std::vector<double>& rhs,
                              double tol = 0.0);

/// Composite Simpson rule for uniformly sampled data with spacing h.
/// Needs at least three samples. An odd interval count is closed with the
/// three-point Newton-Cotes rule on the final interval, keeping fourth-order
/// accuracy throughout.
double simpson_sampled(const std::vector<double>& samples, double h);

/// First `count` eigenvalues (ascending) of the symmetric tridiagonal matrix
/// with the given diagonal and off-diagonal, by Sturm-sequence bisection.
/// Serves the large finite-difference discretizations that are out of scope
/// for the dense Jacobi path.
std::vector<double> tridiagonal_smallest_eigenvalues(const std::vector<double>& diag,
                                                     const std::vector<double>& off,
                                                     std::size_t count);

}  // namespace simulwave::numerics
