#pragma once

#include <cstddef>
#include <vector>

#include "simulwave/matrix.hpp"

namespace simulwave::kalman {

/// n decoupled propagation speeds sharing one n x m control matrix.
/// Valid when every speed is positive and finite and 1 <= m <= n.
struct SpeedSystem {
  std::vector<double> speeds;
  numerics::DenseMatrix control_matrix;

  std::size_t components() const { return speeds.size(); }
  std::size_t controls() const { return control_matrix.cols(); }
};

/// Throws std::invalid_argument when the system violates its invariants.
void validate(const SpeedSystem& sys);

/// Rows of the control matrix that share one speed value.
struct SpeedBlock {
  double speed;                  // representative value
  std::size_t multiplicity;      // number of rows
  numerics::DenseMatrix rows;    // the n_i x m slice of the control matrix
  std::size_t rank;              // numerical rank of that slice
};

struct BlockDecomposition {
  std::vector<SpeedBlock> blocks;          // descending speed
  std::vector<std::size_t> permutation;    // permutation[new_row] = original row
};

/// Controllability matrix [D^{n-1}B | ... | DB | B], highest power leftmost.
numerics::DenseMatrix kalman_matrix(const SpeedSystem& sys);

/// True when the controllability matrix has full row rank n.
bool kalman_rank_ok(const SpeedSystem& sys, double tol = 0.0);

/// Group rows by speed. Speeds within speed_tol (relative to the largest
/// speed) belong to one block; if transitive merging produces a block whose
/// speed spread exceeds the tolerance, the grouping is ambiguous and an
/// exception is thrown rather than an arbitrary split.
BlockDecomposition block_decompose(const SpeedSystem& sys, double speed_tol = 1e-9);

/// Full-rank test through the block route: every speed block must have full
/// row rank. Agrees with kalman_rank_ok on every valid system.
bool kalman_via_blocks(const SpeedSystem& sys, double speed_tol = 1e-9);

/// Constructive certificate for the rank identity rank [D|B] = sum of block
/// ranks: invertible P, Q and a block column transform T such that
/// P * [D|B] * Q * T is block lower triangular whose i-th diagonal block is
/// d_i^{n-1} * prod_{j<i} (1/d_i - 1/d_j) * E_i, with E_i the rank normal
/// form of block i.
struct BlockNormalForm {
  numerics::DenseMatrix p;        // n x n
  numerics::DenseMatrix q;        // nm x nm, block diagonal
  numerics::DenseMatrix t;        // nm x nm, unit upper block triangular
  numerics::DenseMatrix reduced;  // n x nm, the eliminated matrix
  BlockDecomposition decomposition;
  std::vector<double> diagonal_factors;  // the scalar in front of each E_i
};

BlockNormalForm block_normal_form(const SpeedSystem& sys, double speed_tol = 1e-9);

}  // namespace simulwave::kalman
