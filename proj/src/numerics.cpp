#include "simulwave/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace simulwave::numerics {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  DenseMatrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c) throw std::invalid_argument("ragged row list");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

DenseMatrix transpose(const DenseMatrix& m) {
  DenseMatrix out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
  return out;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("subtract: shape mismatch");
  DenseMatrix out = a;
  for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
  return out;
}

std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matvec: shape mismatch");
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double max_abs(const DenseMatrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double symmetry_defect(const DenseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      best = std::max(best, std::abs(m(i, j) - m(j, i)));
  return best;
}

void insert_block(DenseMatrix& dst, const DenseMatrix& src, std::size_t row, std::size_t col) {
  if (row + src.rows() > dst.rows() || col + src.cols() > dst.cols())
    throw std::invalid_argument("insert_block: out of range");
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) dst(row + i, col + j) = src(i, j);
}

namespace {

// 5-point Gauss-Legendre abscissas and weights on [-1, 1].
constexpr double kGlNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                  0.4786286704993665, 0.2369268850561891};

}  // namespace

QuadratureRule make_gauss_legendre(double lo, double hi, std::size_t panels) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || hi < lo)
    throw std::invalid_argument("make_gauss_legendre: bad interval");
  if (panels < 1) throw std::invalid_argument("make_gauss_legendre: panels must be >= 1");
  QuadratureRule rule;
  rule.lo = lo;
  rule.hi = hi;
  rule.nodes.reserve(5 * panels);
  rule.weights.reserve(5 * panels);
  const double h = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = lo + (static_cast<double>(p) + 0.5) * h;
    for (int q = 0; q < 5; ++q) {
      rule.nodes.push_back(mid + 0.5 * h * kGlNodes[q]);
      rule.weights.push_back(0.5 * h * kGlWeights[q]);
    }
  }
  return rule;
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi,
                    std::size_t panels) {
  const QuadratureRule rule = make_gauss_legendre(lo, hi, panels);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) acc += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(acc);
}

void normalize_column_signs(DenseMatrix& v) {
  for (std::size_t j = 0; j < v.cols(); ++j) {
    double sign = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > 1e-12) {
        sign = v(i, j) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    if (sign < 0.0)
      for (std::size_t i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
  }
}

}  // namespace

SymmetricEigen sym_eig(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("sym_eig: matrix not square");
  if (!m.all_finite()) throw std::invalid_argument("sym_eig: non-finite entries");
  const double scale = max_abs(m);
  if (symmetry_defect(m) > 1e-12 * std::max(scale, 1e-300))
    throw std::invalid_argument("sym_eig: matrix not symmetric");

  const std::size_t n = m.rows();
  DenseMatrix a = m;
  // Work on the exactly symmetric part so rotations preserve symmetry bit for bit.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
  DenseMatrix v = DenseMatrix::identity(n);

  const double target = 1e-14 * std::max(frobenius_norm(a), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) <= 1e-18 * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != p && i != q) {
            const double aip = a(i, p);
            const double aiq = a(i, q);
            a(i, p) = aip - s * (aiq + tau * aip);
            a(i, q) = aiq + s * (aip - tau * aiq);
            a(p, i) = a(i, p);
            a(q, i) = a(i, q);
          }
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  normalize_column_signs(out.eigenvectors);
  return out;
}

namespace {

// Singular values by one-sided Jacobi: rotate column pairs until mutually
// orthogonal, then read off the column norms. Unlike the Gram-matrix route
// this keeps the noise floor of a true zero singular value near eps * sigma_max
// instead of sqrt(eps) * sigma_max, which matters for rank cutoffs.
std::vector<double> singular_values(const DenseMatrix& m) {
  DenseMatrix a = m.rows() >= m.cols() ? m : transpose(m);
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) + 1e-300) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < rows; ++i) {
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) acc += a(i, j) * a(i, j);
    sigma[j] = std::sqrt(acc);
  }
  std::sort(sigma.begin(), sigma.end(), std::greater<double>());
  return sigma;
}

}  // namespace

std::size_t rank_with_tolerance(const DenseMatrix& m, double tol) {
  if (!m.all_finite()) throw std::invalid_argument("rank_with_tolerance: non-finite entries");
  if (m.rows() == 0 || m.cols() == 0) return 0;
  if (tol <= 0.0) tol = 1e-8;
  const std::vector<double> sigma = singular_values(m);
  if (sigma.front() == 0.0) return 0;
  std::size_t rank = 0;
  for (double s : sigma)
    if (s > tol * sigma.front()) ++rank;
  return rank;
}

DenseMatrix cholesky(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("cholesky: matrix not square");
  const std::size_t n = m.rows();
  DenseMatrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      if (i == j) {
        if (acc <= 0.0) throw std::runtime_error("cholesky: matrix not positive definite");
        l(i, i) = std::sqrt(acc);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return l;
}

namespace {

// Solve L x = b for lower-triangular L.
std::vector<double> forward_substitute(const DenseMatrix& l, const std::vector<double>& b) {
  const std::size_t n = l.rows();
  std::vector<double> x(b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
    x[i] /= l(i, i);
  }
  return x;
}

// Solve L^T x = b for lower-triangular L.
std::vector<double> backward_substitute(const DenseMatrix& l, const std::vector<double>& b) {
  const std::size_t n = l.rows();
  std::vector<double> x(b);
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < n; ++k) x[ii] -= l(k, ii) * x[k];
    x[ii] /= l(ii, ii);
  }
  return x;
}

}  // namespace

GeneralizedEigen generalized_eig(const DenseMatrix& a, const DenseMatrix& m) {
  if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows())
    throw std::invalid_argument("generalized_eig: shape mismatch");
  const double scale = std::max(max_abs(a), 1e-300);
  if (symmetry_defect(a) > 1e-12 * scale)
    throw std::invalid_argument("generalized_eig: left matrix not symmetric");
  const DenseMatrix l = cholesky(m);

  const std::size_t n = a.rows();
  // C = L^{-1} A L^{-T}, assembled column by column.
  DenseMatrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    col = forward_substitute(l, col);
    for (std::size_t i = 0; i < n; ++i) c(i, j) = col[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = c(i, j);
    row = forward_substitute(l, row);
    for (std::size_t j = 0; j < n; ++j) c(i, j) = row[j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = v;
      c(j, i) = v;
    }

  const SymmetricEigen eig = sym_eig(c);
  GeneralizedEigen out;
  out.eigenvalues = eig.eigenvalues;
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = eig.eigenvectors(i, j);
    const std::vector<double> z = backward_substitute(l, w);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = z[i];
  }
  normalize_column_signs(out.eigenvectors);
  return out;
}

double generalized_min_eig(const DenseMatrix& a, const DenseMatrix& m) {
  const GeneralizedEigen eig = generalized_eig(a, m);
  if (eig.eigenvalues.empty()) throw std::invalid_argument("generalized_min_eig: empty matrix");
  return eig.eigenvalues.front();
}

std::vector<double> solve_spd(const DenseMatrix& a, const std::vector<double>& rhs, double tol) {
  if (a.rows() != a.cols() || a.rows() != rhs.size())
    throw std::invalid_argument("solve_spd: shape mismatch");
  if (tol <= 0.0) tol = 1e-12;
  const std::size_t n = rhs.size();
  std::vector<double> x(n, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> p = r;
  double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
  const double bnorm = std::sqrt(rr);
  if (bnorm == 0.0) return x;
  const std::size_t max_iter = 10 * n;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (std::sqrt(rr) <= tol * bnorm) return x;
    const std::vector<double> ap = matvec(a, p);
    const double pap = std::inner_product(p.begin(), p.end(), ap.begin(), 0.0);
    if (!(pap > 0.0)) throw std::runtime_error("solve_spd: matrix not positive definite");
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (std::sqrt(rr) <= tol * bnorm) return x;
  throw std::runtime_error("solve_spd: conjugate gradient did not converge");
}

namespace {

// Number of eigenvalues strictly below x, by the Sturm sign-count of the
// shifted LDL^T recurrence.
std::size_t sturm_count_below(const std::vector<double>& diag, const std::vector<double>& off,
                              double x) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double off2 = i == 0 ? 0.0 : off[i - 1] * off[i - 1];
    q = diag[i] - x - (i == 0 ? 0.0 : off2 / q);
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

}  // namespace

double simpson_sampled(const std::vector<double>& samples, double h) {
  const std::size_t n = samples.size();
  if (n < 3) throw std::invalid_argument("simpson_sampled: need at least three samples");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("simpson_sampled: step must be positive and finite");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("simpson_sampled: non-finite sample");
  const std::size_t intervals = n - 1;
  const std::size_t paired = intervals % 2 == 0 ? intervals : intervals - 1;
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= paired; i += 2)
    sum += (h / 3.0) * (samples[i] + 4.0 * samples[i + 1] + samples[i + 2]);
  if (paired != intervals)
    sum += (h / 12.0) * (-samples[n - 3] + 8.0 * samples[n - 2] + 5.0 * samples[n - 1]);
  return sum;
}

std::vector<double> tridiagonal_smallest_eigenvalues(const std::vector<double>& diag,
                                                     const std::vector<double>& off,
                                                     std::size_t count) {
  const std::size_t n = diag.size();
  if (n == 0 || count == 0 || count > n)
    throw std::invalid_argument("tridiagonal_smallest_eigenvalues: bad sizes");
  if (off.size() + 1 != n)
    throw std::invalid_argument("tridiagonal_smallest_eigenvalues: off-diagonal size mismatch");

  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double radius =
        (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  const double span = std::max(hi - lo, 1e-300);

  std::vector<double> out(count);
  for (std::size_t j = 0; j < count; ++j) {
    double a = lo, b = hi;
    while (b - a > 1e-14 * span + 1e-14 * std::max(std::abs(a), std::abs(b))) {
      const double mid = 0.5 * (a + b);
      if (sturm_count_below(diag, off, mid) >= j + 1)
        b = mid;
      else
        a = mid;
    }
    out[j] = 0.5 * (a + b);
  }
  return out;
}

}  // namespace simulwave::numerics
