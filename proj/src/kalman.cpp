#include "simulwave/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "simulwave/numerics.hpp"

namespace simulwave::kalman {

using numerics::DenseMatrix;

void validate(const SpeedSystem& sys) {
  const std::size_t n = sys.speeds.size();
  if (n == 0) throw std::invalid_argument("speed system: no components");
  for (double d : sys.speeds)
    if (!(std::isfinite(d) && d > 0.0))
      throw std::invalid_argument("speed system: speeds must be positive and finite");
  if (sys.control_matrix.rows() != n)
    throw std::invalid_argument("speed system: control matrix must have one row per component");
  const std::size_t m = sys.control_matrix.cols();
  if (m < 1 || m > n)
    throw std::invalid_argument("speed system: control count must lie in [1, components]");
  if (!sys.control_matrix.all_finite())
    throw std::invalid_argument("speed system: control matrix has non-finite entries");
}

DenseMatrix kalman_matrix(const SpeedSystem& sys) {
  validate(sys);
  const std::size_t n = sys.components();
  const std::size_t m = sys.controls();
  DenseMatrix out(n, n * m);
  for (std::size_t block = 0; block < n; ++block) {
    const std::size_t power = n - 1 - block;
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::pow(sys.speeds[i], static_cast<double>(power));
      for (std::size_t j = 0; j < m; ++j)
        out(i, block * m + j) = scale * sys.control_matrix(i, j);
    }
  }
  return out;
}

bool kalman_rank_ok(const SpeedSystem& sys, double tol) {
  return numerics::rank_with_tolerance(kalman_matrix(sys), tol) == sys.components();
}

BlockDecomposition block_decompose(const SpeedSystem& sys, double speed_tol) {
  validate(sys);
  if (!(speed_tol >= 0.0)) throw std::invalid_argument("block_decompose: bad tolerance");
  const std::size_t n = sys.components();
  const std::size_t m = sys.controls();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&sys](std::size_t a, std::size_t b) {
    return sys.speeds[a] > sys.speeds[b];
  });

  const double scale = *std::max_element(sys.speeds.begin(), sys.speeds.end());
  const double gap = speed_tol * scale;

  BlockDecomposition out;
  out.permutation.reserve(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t stop = start + 1;
    while (stop < n &&
           sys.speeds[order[stop - 1]] - sys.speeds[order[stop]] <= gap)
      ++stop;
    const double diameter = sys.speeds[order[start]] - sys.speeds[order[stop - 1]];
    if (diameter > gap)
      throw std::invalid_argument(
          "block_decompose: speed grouping ambiguous (chained near-equal speeds)");

    SpeedBlock block;
    block.multiplicity = stop - start;
    block.rows = DenseMatrix(block.multiplicity, m);
    double speed_sum = 0.0;
    for (std::size_t r = start; r < stop; ++r) {
      const std::size_t src = order[r];
      speed_sum += sys.speeds[src];
      for (std::size_t j = 0; j < m; ++j) block.rows(r - start, j) = sys.control_matrix(src, j);
      out.permutation.push_back(src);
    }
    block.speed = speed_sum / static_cast<double>(block.multiplicity);
    block.rank = numerics::rank_with_tolerance(block.rows);
    out.blocks.push_back(std::move(block));
    start = stop;
  }
  return out;
}

bool kalman_via_blocks(const SpeedSystem& sys, double speed_tol) {
  const BlockDecomposition dec = block_decompose(sys, speed_tol);
  return std::all_of(dec.blocks.begin(), dec.blocks.end(),
                     [](const SpeedBlock& b) { return b.rank == b.multiplicity; });
}

namespace {

struct RankNormalForm {
  DenseMatrix p;  // n_i x n_i
  DenseMatrix q;  // m x m
  std::size_t rank = 0;
};

// Full-pivot Gauss-Jordan reduction P * block * Q = diag(Id_r, 0). A zero
// block reduces with r = 0 and identity transforms.
RankNormalForm rank_normal_form(const DenseMatrix& block) {
  const std::size_t rows = block.rows();
  const std::size_t cols = block.cols();
  RankNormalForm out;
  out.p = DenseMatrix::identity(rows);
  out.q = DenseMatrix::identity(cols);
  DenseMatrix a = block;
  const double pivot_floor = 1e-12 * std::max(numerics::max_abs(block), 1e-300);

  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    std::size_t pr = k, pc = k;
    double best = 0.0;
    for (std::size_t i = k; i < rows; ++i)
      for (std::size_t j = k; j < cols; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          pr = i;
          pc = j;
        }
    if (best <= pivot_floor) break;

    for (std::size_t j = 0; j < cols; ++j) std::swap(a(k, j), a(pr, j));
    for (std::size_t j = 0; j < rows; ++j) std::swap(out.p(k, j), out.p(pr, j));
    for (std::size_t i = 0; i < rows; ++i) std::swap(a(i, k), a(i, pc));
    for (std::size_t i = 0; i < cols; ++i) std::swap(out.q(i, k), out.q(i, pc));

    const double inv = 1.0 / a(k, k);
    for (std::size_t j = 0; j < cols; ++j) a(k, j) *= inv;
    for (std::size_t j = 0; j < rows; ++j) out.p(k, j) *= inv;

    for (std::size_t i = 0; i < rows; ++i) {
      if (i == k || a(i, k) == 0.0) continue;
      const double f = a(i, k);
      for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < rows; ++j) out.p(i, j) -= f * out.p(k, j);
    }
    for (std::size_t j = k + 1; j < cols; ++j) {
      const double f = a(k, j);
      if (f == 0.0) continue;
      for (std::size_t i = 0; i < rows; ++i) a(i, j) -= f * a(i, k);
      for (std::size_t i = 0; i < cols; ++i) out.q(i, j) -= f * out.q(i, k);
    }
    ++out.rank;
  }
  return out;
}

// In-place block column operation: cols(j) -= cols(i) * mult, on an n x nm
// matrix viewed as n blocks of m columns.
void block_column_update(DenseMatrix& w, std::size_t m, std::size_t block_i, std::size_t block_j,
                         const DenseMatrix& mult) {
  for (std::size_t row = 0; row < w.rows(); ++row)
    for (std::size_t cj = 0; cj < m; ++cj) {
      double acc = 0.0;
      for (std::size_t ci = 0; ci < m; ++ci) acc += w(row, block_i * m + ci) * mult(ci, cj);
      w(row, block_j * m + cj) -= acc;
    }
}

}  // namespace

BlockNormalForm block_normal_form(const SpeedSystem& sys, double speed_tol) {
  BlockNormalForm out;
  out.decomposition = block_decompose(sys, speed_tol);
  const std::size_t n = sys.components();
  const std::size_t m = sys.controls();
  const std::size_t s = out.decomposition.blocks.size();

  // P = blockdiag(P_i) * row permutation; Q = blockdiag over the n column
  // blocks, reusing Q_i for block column i and Q_s beyond the s-th.
  std::vector<RankNormalForm> forms;
  forms.reserve(s);
  for (const SpeedBlock& b : out.decomposition.blocks) forms.push_back(rank_normal_form(b.rows));

  DenseMatrix perm(n, n);
  for (std::size_t i = 0; i < n; ++i) perm(i, out.decomposition.permutation[i]) = 1.0;
  DenseMatrix pdiag(n, n);
  std::size_t row = 0;
  for (std::size_t i = 0; i < s; ++i) {
    numerics::insert_block(pdiag, forms[i].p, row, row);
    row += out.decomposition.blocks[i].multiplicity;
  }
  out.p = numerics::multiply(pdiag, perm);

  out.q = DenseMatrix(n * m, n * m);
  for (std::size_t j = 0; j < n; ++j)
    numerics::insert_block(out.q, forms[std::min(j, s - 1)].q, j * m, j * m);

  // The elimination multipliers live on the scalar coefficient matrix
  // gamma(i, j) = d_i^{n-1-j}; block operations reduce to scalar ones because
  // every block equals gamma * E_i * Q_i^{-1} * Qhat_j after P and Q.
  DenseMatrix gamma(s, n);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < n; ++j)
      gamma(i, j) = std::pow(out.decomposition.blocks[i].speed,
                             static_cast<double>(n - 1 - j));

  DenseMatrix w = numerics::multiply(out.p, numerics::multiply(kalman_matrix(sys), out.q));
  out.t = DenseMatrix::identity(n * m);

  for (std::size_t i = 0; i < s; ++i) {
    const double pivot = gamma(i, i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mu = gamma(i, j) / pivot;
      if (mu == 0.0) continue;
      // mult = mu * Q_i^{-1} * Qhat_j. Q_i is invertible (product of
      // elementary operations); reuse Gaussian elimination to apply it.
      DenseMatrix qi = forms[i].q;
      DenseMatrix rhs = forms[std::min(j, s - 1)].q;
      // Solve qi * x = rhs columnwise by plain LU with partial pivoting.
      const std::size_t mm = m;
      std::vector<std::size_t> piv(mm);
      std::iota(piv.begin(), piv.end(), std::size_t{0});
      for (std::size_t k = 0; k < mm; ++k) {
        std::size_t p = k;
        for (std::size_t r2 = k + 1; r2 < mm; ++r2)
          if (std::abs(qi(r2, k)) > std::abs(qi(p, k))) p = r2;
        if (p != k)
          for (std::size_t c2 = 0; c2 < mm; ++c2) {
            std::swap(qi(k, c2), qi(p, c2));
            std::swap(rhs(k, c2), rhs(p, c2));
          }
        for (std::size_t r2 = k + 1; r2 < mm; ++r2) {
          const double f = qi(r2, k) / qi(k, k);
          if (f == 0.0) continue;
          for (std::size_t c2 = k; c2 < mm; ++c2) qi(r2, c2) -= f * qi(k, c2);
          for (std::size_t c2 = 0; c2 < mm; ++c2) rhs(r2, c2) -= f * rhs(k, c2);
        }
      }
      DenseMatrix mult(mm, mm);
      for (std::size_t c2 = 0; c2 < mm; ++c2)
        for (std::size_t k = mm; k-- > 0;) {
          double acc = rhs(k, c2);
          for (std::size_t r2 = k + 1; r2 < mm; ++r2) acc -= qi(k, r2) * mult(r2, c2);
          mult(k, c2) = acc / qi(k, k);
        }
      for (auto& v : mult.data()) v *= mu;

      block_column_update(w, m, i, j, mult);
      block_column_update(out.t, m, i, j, mult);
      for (std::size_t l = i + 1; l < s; ++l)
        gamma(l, j) -= (gamma(i, j) / pivot) * gamma(l, i);
      gamma(i, j) = 0.0;
    }
  }

  out.reduced = w;
  out.diagonal_factors.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    double factor = std::pow(out.decomposition.blocks[i].speed, static_cast<double>(n - 1));
    for (std::size_t j = 0; j < i; ++j)
      factor *= 1.0 / out.decomposition.blocks[i].speed -
                1.0 / out.decomposition.blocks[j].speed;
    out.diagonal_factors[i] = factor;
  }
  return out;
}

}  // namespace simulwave::kalman
