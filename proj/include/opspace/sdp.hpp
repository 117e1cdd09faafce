// Copyright 2026 The opspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "opspace/matrix.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Primal-dual interior-point solver for small dense complex semidefinite
// programs in standard form:
//
//   primal:  minimize  <C, X>      s.t.  <A_i, X> = b_i,  X >= 0
//   dual:    maximize  b^T y       s.t.  C - sum_i y_i A_i = Z >= 0
//
// X, Z and every C, A_i are block diagonal with Hermitian blocks; <P, Q> is
// Re tr(P Q). y is real.
namespace opspace::sdp {

struct SparseEntry {
  int row;
  int col;
  Complex value;
};

/// Hermitian matrix held as its nonzero entries (both triangles present).
class SparseHermitian {
 public:
  SparseHermitian() = default;
  explicit SparseHermitian(std::size_t dim) : dim_(dim) {}
  /// Keeps entries with |value| > drop.
  static SparseHermitian from_dense(const Matrix& m, double drop = 0.0);

  /// Adds v at (row, col) and conj(v) at (col, row); on the diagonal only the
  /// real part of v is added.
  void add_hermitian(int row, int col, Complex v);

  std::size_t dim() const { return dim_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  Matrix dense() const;
  double frobenius_norm() const;

  /// Merges duplicate positions and drops exact zeros.
  void compress();

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
};

struct Constraint {
  /// (block index, coefficient matrix) for every block the constraint touches.
  std::vector<std::pair<std::size_t, SparseHermitian>> blocks;
  double rhs = 0.0;
};

class Problem {
 public:
  /// Validates shapes and Hermiticity (1e-12) and runs the rank check on the
  /// constraint matrices. Linearly dependent but consistent constraints are
  /// set aside; an inconsistent dependency makes the problem infeasible and
  /// stores the certificate.
  Problem(std::vector<std::size_t> block_dims,
          std::vector<SparseHermitian> objective,
          std::vector<Constraint> constraints);

  const std::vector<std::size_t>& block_dims() const { return block_dims_; }
  const std::vector<SparseHermitian>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Indices of the linearly independent constraints kept for the solve.
  const std::vector<std::size_t>& active() const { return active_; }
  /// y with sum_i y_i A_i = 0 and b^T y = 1, when the rank check found one.
  const std::optional<RealVector>& dependency_certificate() const {
    return certificate_;
  }

 private:
  void rank_check();

  std::vector<std::size_t> block_dims_;
  std::vector<SparseHermitian> objective_;
  std::vector<Constraint> constraints_;
  std::vector<std::size_t> active_;
  std::optional<RealVector> certificate_;
};

enum class Status { Optimal, MaxIter, Infeasible };

std::string to_string(Status s);

struct IterateRecord {
  double primal_objective;
  double dual_objective;
  double primal_residual;
  double dual_residual;
  double mu;
};

struct Solution {
  std::vector<Matrix> x;
  RealVector y;
  std::vector<Matrix> z;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;  // |primal - dual|
  double primal_residual = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual_residual = 0.0;    // ||C - A^*(y) - Z||_F / (1 + ||C||_F)
  Status status = Status::MaxIter;
  /// "primal" or "dual" when status is Infeasible.
  std::string infeasible_side;
  int iterations = 0;
  std::vector<IterateRecord> history;
};

/// Mehrotra predictor-corrector with the HKM search direction. Starts from
/// X = xi I, Z = eta I, y = 0 with xi, eta taken from the problem scaling.
Solution solve(const Problem& problem, double tol = 1e-8, int max_iter = 200);

/// C - sum_i y_i A_i for the given y (indexed over all constraints).
std::vector<Matrix> dual_slack(const Problem& problem, const RealVector& y);

}  // namespace opspace::sdp
