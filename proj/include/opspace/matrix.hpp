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

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace opspace {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major with explicit (rows, cols).
using Matrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Hermitian eigendecomposition with eigenvalues in ascending order.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;  // columns are eigenvectors
};

/// Singular values in descending order, with the matching singular vectors.
struct Svd {
  RealVector values;
  Matrix left;   // rows x k
  Matrix right;  // cols x k
};

Matrix identity(std::size_t n);
Matrix zeros(std::size_t rows, std::size_t cols);
/// E_{ij} in M_{rows x cols}.
Matrix matrix_unit(std::size_t rows, std::size_t cols, std::size_t i,
                   std::size_t j);
Matrix diagonal(const std::vector<Complex>& entries);

bool all_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double tol);

Matrix adjoint(const Matrix& m);
Matrix kron(const Matrix& a, const Matrix& b);

/// Largest singular value. Throws std::invalid_argument("empty input") on an
/// empty matrix and on non-finite entries.
double operator_norm(const Matrix& m);
double frobenius_norm(const Matrix& m);
/// Sum of singular values.
double trace_norm(const Matrix& m);

HermitianEigen hermitian_eigen(const Matrix& m);
Svd svd(const Matrix& m);

/// Factor L with L * adjoint(L) == M for a positive semidefinite Hermitian M.
/// Returns nullopt iff the smallest eigenvalue is below -tol * ||M||.
/// Throws std::invalid_argument("not Hermitian") when ||M - M^*|| exceeds
/// tol * max(1, ||M||).
std::optional<Matrix> psd_cholesky(const Matrix& m, double tol);

/// Entries with i.i.d. standard complex Gaussian real and imaginary parts.
Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols);
Matrix random_hermitian(std::mt19937_64& rng, std::size_t n);

/// Inner product <x, y> = y^* x (linear in the first argument).
Complex inner(const Vector& x, const Vector& y);

/// Dense block matrix: an N x N grid of d x d blocks.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  /// All-zero grid.
  BlockMatrix(std::size_t grid_size, std::size_t block_dim);
  BlockMatrix(std::size_t grid_size, std::size_t block_dim,
              std::vector<Matrix> blocks);

  std::size_t grid_size() const { return grid_size_; }
  std::size_t block_dim() const { return block_dim_; }

  const Matrix& block(std::size_t m, std::size_t n) const;
  Matrix& block(std::size_t m, std::size_t n);

  /// (Nd) x (Nd) matrix with block (m, n) at rows m*d.., cols n*d...
  Matrix flatten() const;
  static BlockMatrix reblock(const Matrix& m, std::size_t grid_size,
                             std::size_t block_dim);

  /// E_{pq}(a): zero except block (p, q) equal to a.
  static BlockMatrix unit(std::size_t grid_size, std::size_t p, std::size_t q,
                          const Matrix& a);

  BlockMatrix& operator+=(const BlockMatrix& other);
  friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) {
    a += b;
    return a;
  }
  friend BlockMatrix operator*(Complex s, BlockMatrix a) {
    for (auto& b : a.blocks_) b *= s;
    return a;
  }

 private:
  std::size_t grid_size_ = 0;
  std::size_t block_dim_ = 0;
  std::vector<Matrix> blocks_;  // row-major grid
};

BlockMatrix random_block_matrix(std::mt19937_64& rng, std::size_t grid_size,
                                std::size_t block_dim);

/// sqrt(sum_{m,n} ||T_{mn}||^2): the L2 norm of the block kernel with the
/// operator norm taken pointwise.
double kernel_l2_norm(const BlockMatrix& t);

/// max_{m,n} |a_{mn} - b_{mn}| over flattened entries; shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b);

}  // namespace opspace
