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

#include "opspace/cbmaps.hpp"
#include "opspace/matrix.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace opspace {

/// N x N grid of maps on M_d. Entry (m, n) acts on block (n, m) of its input,
/// see apply_symbol.
class SchurSymbol {
 public:
  SchurSymbol() = default;
  /// entries in row-major order; scalar entries are detected.
  SchurSymbol(std::size_t grid_size, std::size_t block_dim,
              std::vector<LinearMatrixMap> entries);

  /// Entry (m, n) is X -> phi(m, n) X on M_d.
  static SchurSymbol from_scalar(const Matrix& phi, std::size_t block_dim = 1);
  static SchurSymbol all_identity(std::size_t grid_size, std::size_t block_dim);

  std::size_t grid_size() const { return grid_size_; }
  std::size_t block_dim() const { return block_dim_; }
  const LinearMatrixMap& entry(std::size_t m, std::size_t n) const;
  const std::vector<LinearMatrixMap>& entries() const { return entries_; }

  bool is_scalar() const { return scalar_.has_value(); }
  /// The cached scalar matrix when every entry is a multiple of the identity.
  const std::optional<Matrix>& scalar() const { return scalar_; }

 private:
  std::size_t grid_size_ = 0;
  std::size_t block_dim_ = 0;
  std::vector<LinearMatrixMap> entries_;
  std::optional<Matrix> scalar_;
};

/// a[i][k], b[i][k]: r families of N blocks of size d x d.
class DiagonalRepresentation {
 public:
  DiagonalRepresentation() = default;
  DiagonalRepresentation(std::size_t grid_size, std::size_t block_dim,
                         std::vector<std::vector<Matrix>> a,
                         std::vector<std::vector<Matrix>> b);

  std::size_t length() const { return a_.size(); }
  std::size_t grid_size() const { return grid_size_; }
  std::size_t block_dim() const { return block_dim_; }
  const std::vector<std::vector<Matrix>>& a() const { return a_; }
  const std::vector<std::vector<Matrix>>& b() const { return b_; }

 private:
  std::size_t grid_size_ = 0;
  std::size_t block_dim_ = 0;
  std::vector<std::vector<Matrix>> a_;
  std::vector<std::vector<Matrix>> b_;
};

using BlockMap = std::function<BlockMatrix(const BlockMatrix&)>;

/// Output block (m, n) is entry(n, m) applied to T_{m,n}.
BlockMatrix apply_symbol(const SchurSymbol& phi, const BlockMatrix& t);

/// apply_symbol as one map on M_{Nd} (Choi assembled blockwise, pairs minimal).
LinearMatrixMap multiplier_map(const SchurSymbol& phi);

struct MultiplierNorm {
  double cb = 0.0;
  double norm_lb = 0.0;
  sdp::Status status = sdp::Status::Optimal;
  double gap = 0.0;
  /// Value of the dedicated scalar program, for scalar symbols.
  std::optional<double> scalar_cb;
  /// norm_lb <= cb + tol.
  bool consistent = true;
};

/// Throws SolverFailure if the cb program is not solved to optimality.
MultiplierNorm multiplier_norm(const SchurSymbol& phi, double tol = 1e-8,
                               const AscentOptions& options = {});

/// cb norm of the scalar Schur multiplier phi from
///   min t  s.t.  [ P  phi ; phi^*  Q ] >= 0,  P_ii <= t,  Q_jj <= t.
struct ScalarProgram {
  double value = 0.0;
  sdp::Status status = sdp::Status::Optimal;
  /// The optimal block [ P phi ; phi^* Q ] (2N x 2N).
  Matrix gram;
};
ScalarProgram scalar_multiplier_program(const Matrix& phi, double tol = 1e-8);

struct ScalarFactorization {
  std::vector<Vector> x;  // x_j
  std::vector<Vector> y;  // y_i, with <x_j, y_i> = phi(i, j)
  double value = 0.0;     // max_i ||y_i|| * max_j ||x_j||
  double residual = 0.0;  // max |<x_j, y_i> - phi(i, j)|
};
/// Throws std::invalid_argument("scalar only") for non-scalar symbols.
ScalarFactorization scalar_factorization(const SchurSymbol& phi, double tol = 1e-8);

std::vector<Matrix> diagonal_expectation(const BlockMatrix& s);
/// Blocks k >= n (0-based) replaced by zero.
std::vector<Matrix> diagonal_expectation_n(const BlockMatrix& s, std::size_t n);

/// T -> sum_i R_i T S_i.
BlockMap two_sided_map(std::vector<BlockMatrix> r, std::vector<BlockMatrix> s);

/// Symbol whose entry (p, q) is a -> block (q, p) of psi(E_{q,p}(a)), probed on
/// the matrix units of M_d. Inverse of apply_symbol on Schur-type maps.
SchurSymbol schur_compression(const BlockMap& psi, std::size_t grid_size,
                              std::size_t block_dim);

struct CompressionReport {
  double choi_residual = 0.0;
  double action_residual = 0.0;  // on the random trial blocks
  double residual = 0.0;         // max of the two
  int trials = 0;
};
/// Compares schur_compression(two_sided_map(R, S)) with the symbol of the
/// diagonal families E(R_i), E(S_i).
CompressionReport diagonal_compression_identity_check(
    const std::vector<BlockMatrix>& r, const std::vector<BlockMatrix>& s,
    int trials = 4, std::uint64_t seed = 0);

/// Entry (m, n) is x -> sum_i a[i][n] x b[i][m].
SchurSymbol representation_to_symbol(const DiagonalRepresentation& rep);

struct DecayReport {
  std::vector<double> row;  // ||sum_i a_k^i (a_k^i)^*||
  std::vector<double> col;  // ||sum_i (b_k^i)^* b_k^i||
};
DecayReport representation_decay_report(const DiagonalRepresentation& rep);

/// sqrt(max_k row(k)) * sqrt(max_k col(k)): the cb bound witnessed by the
/// block-diagonal operators of the representation.
double representation_bound(const DiagonalRepresentation& rep);

/// Symbol restricted to the trailing square: entries (p, q) with p < n or
/// q < n (0-based) set to zero.
SchurSymbol tail_symbol(const SchurSymbol& phi, std::size_t n);
/// cb norm of tail_symbol(phi, n).
double tail_multiplier_norm(const SchurSymbol& phi, std::size_t n,
                            double tol = 1e-8);

struct CounterexampleRow {
  std::size_t k = 0;
  double weight = 0.0;
  double block_norm = 0.0;
  double block_cb = 0.0;
  sdp::Status status = sdp::Status::Optimal;
};
/// weight(k) * transpose on M_k for k = 1..K.
std::vector<CounterexampleRow> counterexample_report(
    std::size_t max_k, const std::function<double(std::size_t)>& weight,
    double tol = 1e-8, const AscentOptions& options = {});

struct KernelBoundReport {
  double kernel_norm = 0.0;   // ||flatten(k)||
  double kernel_l2 = 0.0;     // sqrt(sum ||k_mn||^2)
  double symbol_sup = 0.0;    // max over entries of the cb norm
  double image_l2 = 0.0;      // l2 norm of apply_symbol(phi, k)
  double operator_margin = 0.0;  // kernel_l2 - kernel_norm
  double multiplier_margin = 0.0;  // symbol_sup * kernel_l2 - image_l2
  bool holds = false;
};
/// Entry cb norms come from the SDP bracket's upper end (exact |phi_mn| for
/// scalar symbols).
KernelBoundReport kernel_bound_check(const BlockMatrix& k, const SchurSymbol& phi,
                                     double tol = 1e-8, double margin = 1e-10);

}  // namespace opspace
