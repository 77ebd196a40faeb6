#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace simulwave::metric1d {

/// Smooth bump with chi(0) = chi(pi) = 0, a strict maximum chi(pi/2) = K > 1,
/// and chi identically 1 on [a, b] where pi/2 < a < b < pi. Piecewise pieces:
/// K*sin(x) carrying a localized curvature correction near pi/2 (so that
/// chi''(pi/2) = curvature_at_peak), exponential-smoothstep blends down to the
/// plateau and out to boundary_slope*sin(x) past tail_knot.
struct BumpProfile {
  double a = 0.0;
  double b = 0.0;
  double K = 0.0;
  double curvature_at_peak = -1.0;
  double boundary_slope = 0.9;
  double shoulder_width = 0.0;
  double tail_knot = 0.0;

  double chi(double x) const;
  double chi_prime(double x) const;
  double chi_second(double x) const;
};

/// Builds the profile and verifies its invariants on a 4096-point grid:
/// positivity, the plateau, and the strict monotonicity pattern up-down.
BumpProfile build_chi(double a, double b, double K);

/// Metric g = c(x)dx^2 on ]0, pi[ given through evaluators.
struct Metric1D {
  std::function<double(double)> c;
  std::function<double(double)> c_prime;
  bool analytic_constant = false;
};

Metric1D constant_metric(double value);

/// The metric c = (chi' sin x + chi cos x)^2 / (K^2 - chi^2 sin^2 x). The
/// removable 0/0 at x = pi/2 is evaluated through series factors within
/// |x - pi/2| < 1e-3, giving c(pi/2) = 1 - chi''(pi/2)/K. Construction
/// verifies c > 0 and a positive denominator on an interior sampling grid.
Metric1D counterexample_metric(const BumpProfile& profile);

/// Applies (1/sqrt(c)) D_h ((1/sqrt(c)) D_h u) with coefficients sampled at
/// half-grid points. `u` lives on the uniform grid {i*h} covering [0, pi]
/// with u(0) = u(pi) = 0; the result carries zeros at both ends.
std::vector<double> laplace_beltrami_apply(const Metric1D& metric,
                                           const std::vector<double>& u,
                                           double h);

/// L = integral of sqrt(c) over [0, pi].
double arclength(const Metric1D& metric);

struct SpectrumEntry {
  int index;
  double eigenvalue;
};

/// Dirichlet eigenvalues k^2 pi^2 / L^2 for k = 1..kmax.
std::vector<SpectrumEntry> dirichlet_spectrum(const Metric1D& metric, int kmax);

/// Independent finite-volume oracle: eigenvalues of the symmetric tridiagonal
/// discretization of -Delta_g with Dirichlet ends on `grid_points` interior
/// nodes, cell fluxes weighted by exact arclength increments.
std::vector<SpectrumEntry> sturm_liouville_fd(const Metric1D& metric,
                                              int grid_points, int kmax);

/// Smallest-denominator rational p/q with q <= qmax and |L/pi - p/q| <= tol,
/// if any. Absence certifies the spectrum misses the flat spectrum up to qmax.
std::optional<std::pair<long, long>> resonance_check(double L, int qmax, double tol);

}  // namespace simulwave::metric1d
