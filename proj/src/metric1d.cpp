#include "simulwave/metric1d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "simulwave/numerics.hpp"

namespace simulwave::metric1d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;
constexpr double kSeriesRadius = 1e-3;
constexpr int kSamplingGrid = 4096;

struct Smooth {
  double s;
  double d1;
  double d2;
};

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t)-based in between.
Smooth smoothstep(double t) {
  if (t <= 1e-9) return {0.0, 0.0, 0.0};
  if (t >= 1.0 - 1e-9) return {1.0, 0.0, 0.0};
  const double u = 1.0 - t;
  const double et = std::exp(-1.0 / t);
  const double eu = std::exp(-1.0 / u);
  const double g = et + eu;
  const double det = et / (t * t);
  const double deu = -eu / (u * u);
  const double dg = det + deu;
  const double ddet = et * (1.0 - 2.0 * t) / (t * t * t * t);
  const double ddeu = eu * (2.0 * t - 1.0) / (u * u * u * u);
  const double s = et / g;
  const double d1 = (det * eu - et * deu) / (g * g);
  const double d2 = (ddet * eu - et * ddeu) / (g * g) - 2.0 * dg * d1 / g;
  return {s, d1, d2};
}

Smooth scaled_step(double x, double left, double width) {
  Smooth r = smoothstep((x - left) / width);
  r.d1 /= width;
  r.d2 /= width * width;
  return r;
}

struct Value2 {
  double f;
  double d1;
  double d2;
};

/// K sin x plus the curvature correction (S+K)/2 (x-pi/2)^2 psi(x); psi ramps
/// from 0 to 1 over [pi/2 - w, pi/2] and stays 1 to the right.
Value2 peak_base(const BumpProfile& p, double x) {
  const double d = x - kHalfPi;
  const double half_gain = 0.5 * (p.curvature_at_peak + p.K);
  const Smooth psi = scaled_step(x, kHalfPi - p.shoulder_width, p.shoulder_width);
  Value2 r;
  r.f = p.K * std::sin(x) + half_gain * d * d * psi.s;
  r.d1 = p.K * std::cos(x) + half_gain * (2.0 * d * psi.s + d * d * psi.d1);
  r.d2 = -p.K * std::sin(x) +
         half_gain * (2.0 * psi.s + 4.0 * d * psi.d1 + d * d * psi.d2);
  return r;
}

}  // namespace

double BumpProfile::chi(double x) const {
  if (x <= kHalfPi) return peak_base(*this, x).f;
  if (x < a) {
    const Value2 base = peak_base(*this, x);
    const Smooth s = scaled_step(x, kHalfPi, a - kHalfPi);
    return base.f * (1.0 - s.s) + s.s;
  }
  if (x <= b) return 1.0;
  if (x < tail_knot) {
    const Smooth s = scaled_step(x, b, tail_knot - b);
    return (1.0 - s.s) + s.s * boundary_slope * std::sin(x);
  }
  return boundary_slope * std::sin(x);
}

double BumpProfile::chi_prime(double x) const {
  if (x <= kHalfPi) return peak_base(*this, x).d1;
  if (x < a) {
    const Value2 base = peak_base(*this, x);
    const Smooth s = scaled_step(x, kHalfPi, a - kHalfPi);
    return base.d1 * (1.0 - s.s) + s.d1 * (1.0 - base.f);
  }
  if (x <= b) return 0.0;
  if (x < tail_knot) {
    const Smooth s = scaled_step(x, b, tail_knot - b);
    const double target = boundary_slope * std::sin(x);
    const double target_d = boundary_slope * std::cos(x);
    return s.d1 * (target - 1.0) + s.s * target_d;
  }
  return boundary_slope * std::cos(x);
}

double BumpProfile::chi_second(double x) const {
  if (x <= kHalfPi) return peak_base(*this, x).d2;
  if (x < a) {
    const Value2 base = peak_base(*this, x);
    const Smooth s = scaled_step(x, kHalfPi, a - kHalfPi);
    return base.d2 * (1.0 - s.s) - 2.0 * s.d1 * base.d1 + s.d2 * (1.0 - base.f);
  }
  if (x <= b) return 0.0;
  if (x < tail_knot) {
    const Smooth s = scaled_step(x, b, tail_knot - b);
    const double target = boundary_slope * std::sin(x);
    const double target_d = boundary_slope * std::cos(x);
    const double target_dd = -target;
    return s.d2 * (target - 1.0) + 2.0 * s.d1 * target_d + s.s * target_dd;
  }
  return -boundary_slope * std::sin(x);
}

BumpProfile build_chi(double a, double b, double K) {
  if (!(a > kHalfPi)) {
    throw std::invalid_argument("window start must exceed pi/2");
  }
  if (!(b > a) || !(b < kPi)) {
    throw std::invalid_argument("window must satisfy pi/2 < a < b < pi");
  }
  if (!(K > 1.0)) {
    throw std::invalid_argument("peak height K must exceed 1");
  }

  BumpProfile p;
  p.a = a;
  p.b = b;
  p.K = K;
  p.curvature_at_peak = -1.0;
  p.boundary_slope = 0.9;
  p.shoulder_width = kPi / 8.0;
  p.tail_knot = 0.5 * (b + kPi);

  const double h = kPi / (kSamplingGrid + 1);
  for (int i = 1; i <= kSamplingGrid; ++i) {
    const double x = i * h;
    const double v = p.chi(x);
    if (!(v > 0.0) || !(v <= K + 1e-12)) {
      throw std::invalid_argument("profile leaves the band ]0, K] at x = " +
                                  std::to_string(x));
    }
    const double d = p.chi_prime(x);
    // Right where a blend saturates the analytic derivative drops below the
    // smallest double, so an exact zero is accepted there.
    const bool flushed =
        std::abs(x - a) < 1e-3 || std::abs(x - b) < 1e-3 || std::abs(x - p.tail_knot) < 1e-3;
    bool ok = true;
    if (x < kHalfPi) {
      ok = d > 0.0;
    } else if (x > kHalfPi && x < a) {
      ok = d < 0.0 || (flushed && d == 0.0);
    } else if (x > b) {
      ok = d < 0.0 || (flushed && d == 0.0);
    }
    if (!ok) {
      throw std::invalid_argument("profile violates the monotonicity pattern at x = " +
                                  std::to_string(x));
    }
  }
  return p;
}

Metric1D constant_metric(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("constant metric value must be positive");
  }
  Metric1D m;
  m.c = [value](double) { return value; };
  m.c_prime = [](double) { return 0.0; };
  m.analytic_constant = true;
  return m;
}

namespace {

/// Direct formula away from pi/2; c = h^2 / ((K - v)(K + v)) with
/// v = chi sin x and h = (chi sin x)'.
double metric_direct(const BumpProfile& p, double x) {
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double chi = p.chi(x);
  const double v = chi * sx;
  const double hh = p.chi_prime(x) * sx + chi * cx;
  const double den = (p.K - v) * (p.K + v);
  return hh * hh / den;
}

double metric_direct_prime(const BumpProfile& p, double x) {
  const double sx = std::sin(x);
  const double cx = std::cos(x);
  const double chi = p.chi(x);
  const double chi_d = p.chi_prime(x);
  const double v = chi * sx;
  const double hh = chi_d * sx + chi * cx;
  const double hp = p.chi_second(x) * sx + 2.0 * chi_d * cx - chi * sx;
  const double den = (p.K - v) * (p.K + v);
  return 2.0 * hh * (hp * den + v * hh * hh) / (den * den);
}

/// Near the removable point both h = (chi sin x)' and K - chi sin x vanish.
/// With chi(pi/2 + d) = K + (S/2)d^2 + (K/24)d^4 + O(d^6), the ratio reduces
/// to c = ht^2 / (wt (2K - d^2 wt)) where h = d*ht and K - chi sin x = d^2*wt.
struct SeriesFactors {
  double ht, ht_d, wt, wt_d;
};

SeriesFactors series_factors(const BumpProfile& p, double d) {
  const double S = p.curvature_at_peak;
  const double K = p.K;
  SeriesFactors f;
  f.ht = (S - K) + (K / 3.0 - S) * d * d;
  f.ht_d = 2.0 * (K / 3.0 - S) * d;
  f.wt = 0.5 * (K - S) + (0.25 * S - K / 12.0) * d * d;
  f.wt_d = 2.0 * (0.25 * S - K / 12.0) * d;
  return f;
}

double metric_series(const BumpProfile& p, double d) {
  const SeriesFactors f = series_factors(p, d);
  const double den = f.wt * (2.0 * p.K - d * d * f.wt);
  return f.ht * f.ht / den;
}

double metric_series_prime(const BumpProfile& p, double d) {
  const SeriesFactors f = series_factors(p, d);
  const double den = f.wt * (2.0 * p.K - d * d * f.wt);
  const double den_d = f.wt_d * (2.0 * p.K - d * d * f.wt) +
                       f.wt * (-2.0 * d * f.wt - d * d * f.wt_d);
  return (2.0 * f.ht * f.ht_d * den - f.ht * f.ht * den_d) / (den * den);
}

}  // namespace

Metric1D counterexample_metric(const BumpProfile& profile) {
  if (!(profile.curvature_at_peak < 0.0)) {
    throw std::invalid_argument("profile curvature at the peak must be negative");
  }
  const BumpProfile p = profile;

  const double h = kPi / (kSamplingGrid + 1);
  for (int i = 1; i <= kSamplingGrid; ++i) {
    const double x = i * h;
    if (std::abs(x - kHalfPi) < kSeriesRadius) continue;
    const double v = p.chi(x) * std::sin(x);
    if (!((p.K - v) * (p.K + v) > 0.0)) {
      throw std::invalid_argument("metric denominator vanishes away from pi/2");
    }
    if (!(metric_direct(p, x) > 0.0)) {
      throw std::invalid_argument("metric is not positive on the sampling grid");
    }
  }

  Metric1D m;
  m.c = [p](double x) {
    const double d = x - kHalfPi;
    if (std::abs(d) < kSeriesRadius) return metric_series(p, d);
    return metric_direct(p, x);
  };
  m.c_prime = [p](double x) {
    const double d = x - kHalfPi;
    if (std::abs(d) < kSeriesRadius) return metric_series_prime(p, d);
    return metric_direct_prime(p, x);
  };
  m.analytic_constant = false;
  return m;
}

std::vector<double> laplace_beltrami_apply(const Metric1D& metric,
                                           const std::vector<double>& u,
                                           double h) {
  if (u.size() < 66) {
    throw std::invalid_argument("grid needs at least 64 interior points");
  }
  if (!(h > 0.0) || std::abs((static_cast<double>(u.size()) - 1.0) * h - kPi) > 1e-9) {
    throw std::invalid_argument("grid step does not tile [0, pi]");
  }
  if (std::abs(u.front()) > 1e-9 || std::abs(u.back()) > 1e-9) {
    throw std::invalid_argument("grid function must vanish at both ends");
  }

  const std::size_t n = u.size();
  std::vector<double> out(n, 0.0);
  double am = 1.0 / std::sqrt(metric.c(0.5 * h));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = static_cast<double>(i) * h;
    const double ap = 1.0 / std::sqrt(metric.c(x + 0.5 * h));
    const double kappa = std::sqrt(metric.c(x));
    out[i] = (ap * (u[i + 1] - u[i]) - am * (u[i] - u[i - 1])) / (h * h * kappa);
    am = ap;
  }
  return out;
}

double arclength(const Metric1D& metric) {
  const auto integrand = [&metric](double x) { return std::sqrt(metric.c(x)); };
  return numerics::integrate_1d(integrand, 0.0, kPi, 8192);
}

std::vector<SpectrumEntry> dirichlet_spectrum(const Metric1D& metric, int kmax) {
  if (kmax < 1) {
    throw std::invalid_argument("kmax must be at least 1");
  }
  const double L = arclength(metric);
  std::vector<SpectrumEntry> out;
  out.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    out.push_back({k, static_cast<double>(k) * k * kPi * kPi / (L * L)});
  }
  return out;
}

std::vector<SpectrumEntry> sturm_liouville_fd(const Metric1D& metric,
                                              int grid_points, int kmax) {
  if (grid_points < 256) {
    throw std::invalid_argument("spectral grid needs at least 256 interior points");
  }
  if (kmax < 1 || kmax > grid_points / 8) {
    throw std::invalid_argument("kmax must lie in [1, grid_points/8]");
  }

  const int n = grid_points;
  const auto integrand = [&metric](double x) { return std::sqrt(metric.c(x)); };

  // Nodes equidistribute the measure (1 + sqrt(c))dx, keeping both the plain
  // spacing and the per-cell arclength bounded by O(1/n) even where the
  // metric peaks sharply.
  const int fine = 8 * (n + 1);
  const double fh = kPi / fine;
  std::vector<double> cumulative(fine + 1, 0.0);
  for (int j = 0; j < fine; ++j) {
    const auto density = [&](double x) { return 1.0 + integrand(x); };
    cumulative[j + 1] =
        cumulative[j] + numerics::integrate_1d(density, j * fh, (j + 1) * fh, 1);
  }
  const double total = cumulative.back();

  std::vector<double> node(n + 2);
  node[0] = 0.0;
  node[n + 1] = kPi;
  int cell = 0;
  for (int i = 1; i <= n; ++i) {
    const double target = total * i / (n + 1);
    while (cell + 1 < fine && cumulative[cell + 1] < target) ++cell;
    const double span = cumulative[cell + 1] - cumulative[cell];
    const double w = span > 0.0 ? (target - cumulative[cell]) / span : 0.0;
    node[i] = (cell + w) * fh;
  }

  std::vector<double> dy(n + 1);
  for (int i = 0; i <= n; ++i) {
    dy[i] = numerics::integrate_1d(integrand, node[i], node[i + 1], 2);
    if (!(dy[i] > 0.0)) {
      throw std::runtime_error("arclength increment is not positive");
    }
  }

  std::vector<double> mass(n);
  for (int i = 0; i < n; ++i) mass[i] = 0.5 * (dy[i] + dy[i + 1]);

  std::vector<double> diag(n);
  std::vector<double> off(n - 1);
  for (int i = 0; i < n; ++i) {
    diag[i] = (1.0 / dy[i] + 1.0 / dy[i + 1]) / mass[i];
  }
  for (int i = 0; i + 1 < n; ++i) {
    off[i] = -1.0 / (dy[i + 1] * std::sqrt(mass[i] * mass[i + 1]));
  }

  const std::vector<double> lambda =
      numerics::tridiagonal_smallest_eigenvalues(diag, off, kmax);
  std::vector<SpectrumEntry> out;
  out.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) out.push_back({k, lambda[k - 1]});
  return out;
}

std::optional<std::pair<long, long>> resonance_check(double L, int qmax, double tol) {
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw std::invalid_argument("arclength must be positive and finite");
  }
  if (qmax < 1) {
    throw std::invalid_argument("qmax must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }
  const double r = L / kPi;
  for (long q = 1; q <= qmax; ++q) {
    const long p = std::lround(r * static_cast<double>(q));
    if (p < 1) continue;
    if (std::abs(r - static_cast<double>(p) / static_cast<double>(q)) <= tol) {
      return std::make_pair(p, q);
    }
  }
  return std::nullopt;
}

}  // namespace simulwave::metric1d
