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

#include "opspace/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opspace {

Matrix identity(std::size_t n) {
  return Matrix::Identity(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(n));
}

Matrix zeros(std::size_t rows, std::size_t cols) {
  return Matrix::Zero(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
}

Matrix matrix_unit(std::size_t rows, std::size_t cols, std::size_t i,
                   std::size_t j) {
  Matrix e = zeros(rows, cols);
  e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return e;
}

Matrix diagonal(const std::vector<Complex>& entries) {
  Matrix d = zeros(entries.size(), entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    d(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = entries[k];
  }
  return d;
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianEigen hermitian_eigen(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian_eigen: matrix is not square");
  }
  if (m.size() == 0) return {RealVector(0), Matrix(0, 0)};
  // Symmetrize so that round-off in the input cannot leak into the solver.
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigen: no convergence");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("empty input");
  if (!all_finite(m)) throw std::invalid_argument("non-finite input");
  // Eigenvalues of the smaller Gram matrix; the largest is sigma_max^2.
  const Matrix gram =
      m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  const HermitianEigen eig = hermitian_eigen(gram);
  return std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
}

double frobenius_norm(const Matrix& m) { return m.norm(); }

Svd svd(const Matrix& m) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  if (k == 0) return {RealVector(0), zeros(m.rows(), 0), zeros(m.cols(), 0)};
  const Eigen::MatrixXcd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(
      dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXcd dense = m;
  Eigen::JacobiSVD<Eigen::MatrixXcd> solver(dense);
  return solver.singularValues().sum();
}

std::optional<Matrix> psd_cholesky(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("not Hermitian");
  if (m.size() == 0) return Matrix(0, 0);
  const double scale = std::max(1.0, operator_norm(m));
  if (!is_hermitian(m, tol * scale)) throw std::invalid_argument("not Hermitian");

  const double norm = operator_norm(m);
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  // Strictly positive definite: an ordinary Cholesky factor is exact enough.
  Eigen::LLT<Eigen::MatrixXcd> llt(h);
  if (llt.info() == Eigen::Success) {
    Matrix l = llt.matrixL();
    if ((l * l.adjoint() - h).norm() <= tol * std::max(norm, 1e-300)) return l;
  }
  // Semidefinite or nearly singular: spectral square root with clamping.
  const HermitianEigen eig = hermitian_eigen(m);
  if (eig.values(0) < -tol * norm) return std::nullopt;
  Matrix l = eig.vectors;
  for (Eigen::Index k = 0; k < l.cols(); ++k) {
    l.col(k) *= std::sqrt(std::max(0.0, eig.values(k)));
  }
  return l;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

Matrix random_hermitian(std::mt19937_64& rng, std::size_t n) {
  const Matrix g = random_matrix(rng, n, n);
  return 0.5 * (g + g.adjoint());
}

Complex inner(const Vector& x, const Vector& y) { return y.dot(x); }

// ---------------------------------------------------------------------------

BlockMatrix::BlockMatrix(std::size_t grid_size, std::size_t block_dim)
    : grid_size_(grid_size),
      block_dim_(block_dim),
      blocks_(grid_size * grid_size, zeros(block_dim, block_dim)) {}

BlockMatrix::BlockMatrix(std::size_t grid_size, std::size_t block_dim,
                         std::vector<Matrix> blocks)
    : grid_size_(grid_size), block_dim_(block_dim), blocks_(std::move(blocks)) {
  if (blocks_.size() != grid_size * grid_size) {
    throw std::invalid_argument("BlockMatrix: expected N*N blocks");
  }
  for (const auto& b : blocks_) {
    if (static_cast<std::size_t>(b.rows()) != block_dim ||
        static_cast<std::size_t>(b.cols()) != block_dim) {
      throw std::invalid_argument("BlockMatrix: every block must be d x d");
    }
  }
}

const Matrix& BlockMatrix::block(std::size_t m, std::size_t n) const {
  return blocks_.at(m * grid_size_ + n);
}

Matrix& BlockMatrix::block(std::size_t m, std::size_t n) {
  return blocks_.at(m * grid_size_ + n);
}

Matrix BlockMatrix::flatten() const {
  const auto d = static_cast<Eigen::Index>(block_dim_);
  Matrix out = zeros(grid_size_ * block_dim_, grid_size_ * block_dim_);
  for (std::size_t m = 0; m < grid_size_; ++m) {
    for (std::size_t n = 0; n < grid_size_; ++n) {
      out.block(static_cast<Eigen::Index>(m) * d,
                static_cast<Eigen::Index>(n) * d, d, d) = block(m, n);
    }
  }
  return out;
}

BlockMatrix BlockMatrix::reblock(const Matrix& m, std::size_t grid_size,
                                 std::size_t block_dim) {
  const auto total = static_cast<Eigen::Index>(grid_size * block_dim);
  if (m.rows() != total || m.cols() != total) {
    throw std::invalid_argument("reblock: dimension mismatch");
  }
  const auto d = static_cast<Eigen::Index>(block_dim);
  std::vector<Matrix> blocks;
  blocks.reserve(grid_size * grid_size);
  for (std::size_t p = 0; p < grid_size; ++p) {
    for (std::size_t q = 0; q < grid_size; ++q) {
      blocks.emplace_back(m.block(static_cast<Eigen::Index>(p) * d,
                                  static_cast<Eigen::Index>(q) * d, d, d));
    }
  }
  return BlockMatrix(grid_size, block_dim, std::move(blocks));
}

BlockMatrix BlockMatrix::unit(std::size_t grid_size, std::size_t p,
                              std::size_t q, const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("unit: block not square");
  BlockMatrix out(grid_size, static_cast<std::size_t>(a.rows()));
  out.block(p, q) = a;
  return out;
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& other) {
  if (other.grid_size_ != grid_size_ || other.block_dim_ != block_dim_) {
    throw std::invalid_argument("BlockMatrix: shape mismatch");
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

BlockMatrix random_block_matrix(std::mt19937_64& rng, std::size_t grid_size,
                                std::size_t block_dim) {
  std::vector<Matrix> blocks;
  blocks.reserve(grid_size * grid_size);
  for (std::size_t k = 0; k < grid_size * grid_size; ++k) {
    blocks.push_back(random_matrix(rng, block_dim, block_dim));
  }
  return BlockMatrix(grid_size, block_dim, std::move(blocks));
}

double kernel_l2_norm(const BlockMatrix& t) {
  if (t.block_dim() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t m = 0; m < t.grid_size(); ++m) {
    for (std::size_t n = 0; n < t.grid_size(); ++n) {
      const double b = operator_norm(t.block(m, n));
      sum += b * b;
    }
  }
  return std::sqrt(sum);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.grid_size() != b.grid_size() || a.block_dim() != b.block_dim()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t m = 0; m < a.grid_size(); ++m) {
    for (std::size_t n = 0; n < a.grid_size(); ++n) {
      worst = std::max(worst, max_abs_diff(a.block(m, n), b.block(m, n)));
    }
  }
  return worst;
}

}  // namespace opspace
