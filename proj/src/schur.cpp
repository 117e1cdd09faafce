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

#include "opspace/schur.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opspace {

namespace {

// Choi matrix of X -> c X on M_d.
Matrix identity_choi(std::size_t d) {
  Matrix c = zeros(d * d, d * d);
  const auto dd = static_cast<Eigen::Index>(d);
  for (Eigen::Index i = 0; i < dd; ++i) {
    for (Eigen::Index j = 0; j < dd; ++j) c(i * dd + i, j * dd + j) = 1.0;
  }
  return c;
}

std::optional<Complex> scalar_value(const LinearMatrixMap& m) {
  const std::size_t d = m.in_dim();
  if (d == 0) return std::nullopt;
  const Complex c = m.choi()(0, 0);
  const Matrix diff = m.choi() - c * identity_choi(d);
  const double scale = std::max(1.0, m.choi().cwiseAbs().maxCoeff());
  if (diff.cwiseAbs().maxCoeff() > 1e-12 * scale) return std::nullopt;
  return c;
}

void check_shape(const BlockMatrix& t, std::size_t n, std::size_t d) {
  if (t.grid_size() != n || t.block_dim() != d) {
    throw std::invalid_argument("shape mismatch");
  }
}

}  // namespace

SchurSymbol::SchurSymbol(std::size_t grid_size, std::size_t block_dim,
                         std::vector<LinearMatrixMap> entries)
    : grid_size_(grid_size), block_dim_(block_dim), entries_(std::move(entries)) {
  if (entries_.size() != grid_size * grid_size) {
    throw std::invalid_argument("SchurSymbol: expected N*N entries");
  }
  for (const auto& e : entries_) {
    if (e.in_dim() != block_dim || e.out_dim() != block_dim) {
      throw std::invalid_argument("SchurSymbol: entry maps must act on M_d");
    }
  }
  if (grid_size == 0 || block_dim == 0) return;
  Matrix phi(grid_size, grid_size);
  for (std::size_t m = 0; m < grid_size; ++m) {
    for (std::size_t n = 0; n < grid_size; ++n) {
      const auto c = scalar_value(entry(m, n));
      if (!c) return;
      phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = *c;
    }
  }
  scalar_ = std::move(phi);
}

SchurSymbol SchurSymbol::from_scalar(const Matrix& phi, std::size_t block_dim) {
  if (phi.rows() != phi.cols()) {
    throw std::invalid_argument("from_scalar: symbol must be square");
  }
  if (!all_finite(phi)) throw std::invalid_argument("from_scalar: non-finite entries");
  const auto n = static_cast<std::size_t>(phi.rows());
  const LinearMatrixMap id = LinearMatrixMap::identity(block_dim);
  std::vector<LinearMatrixMap> entries;
  entries.reserve(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      entries.push_back(
          id.scaled(phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k))));
    }
  }
  return SchurSymbol(n, block_dim, std::move(entries));
}

SchurSymbol SchurSymbol::all_identity(std::size_t grid_size, std::size_t block_dim) {
  return from_scalar(Matrix::Ones(static_cast<Eigen::Index>(grid_size),
                                  static_cast<Eigen::Index>(grid_size)),
                     block_dim);
}

const LinearMatrixMap& SchurSymbol::entry(std::size_t m, std::size_t n) const {
  return entries_.at(m * grid_size_ + n);
}

DiagonalRepresentation::DiagonalRepresentation(std::size_t grid_size,
                                               std::size_t block_dim,
                                               std::vector<std::vector<Matrix>> a,
                                               std::vector<std::vector<Matrix>> b)
    : grid_size_(grid_size), block_dim_(block_dim), a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() != b_.size()) {
    throw std::invalid_argument("DiagonalRepresentation: a and b differ in length");
  }
  const auto d = static_cast<Eigen::Index>(block_dim);
  for (const auto* fam : {&a_, &b_}) {
    for (const auto& row : *fam) {
      if (row.size() != grid_size) {
        throw std::invalid_argument("DiagonalRepresentation: expected N blocks per family");
      }
      for (const auto& m : row) {
        if (m.rows() != d || m.cols() != d) {
          throw std::invalid_argument("DiagonalRepresentation: blocks must be d x d");
        }
        if (!all_finite(m)) {
          throw std::invalid_argument("DiagonalRepresentation: non-finite entries");
        }
      }
    }
  }
}

BlockMatrix apply_symbol(const SchurSymbol& phi, const BlockMatrix& t) {
  check_shape(t, phi.grid_size(), phi.block_dim());
  BlockMatrix out(phi.grid_size(), phi.block_dim());
  for (std::size_t m = 0; m < phi.grid_size(); ++m) {
    for (std::size_t n = 0; n < phi.grid_size(); ++n) {
      out.block(m, n) = phi.entry(n, m).apply(t.block(m, n));
    }
  }
  return out;
}

LinearMatrixMap multiplier_map(const SchurSymbol& phi) {
  const std::size_t n = phi.grid_size();
  const std::size_t d = phi.block_dim();
  const auto dim = static_cast<Eigen::Index>(n * d);
  const auto di = static_cast<Eigen::Index>(d);
  Matrix c = zeros(n * d * n * d, n * d * n * d);
  // E_{(m,i),(q,j)} lands in block (m, q) as entry(q, m)(E_ij).
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t q = 0; q < n; ++q) {
      const Matrix& ec = phi.entry(q, m).choi();
      const auto mi = static_cast<Eigen::Index>(m);
      const auto qi = static_cast<Eigen::Index>(q);
      for (Eigen::Index i = 0; i < di; ++i) {
        for (Eigen::Index j = 0; j < di; ++j) {
          const Eigen::Index row0 = (mi * di + i) * dim + mi * di;
          const Eigen::Index col0 = (qi * di + j) * dim + qi * di;
          c.block(row0, col0, di, di) = ec.block(i * di, j * di, di, di);
        }
      }
    }
  }
  return LinearMatrixMap::from_choi(c, n * d, n * d);
}

// ---------------------------------------------------------------------------

ScalarProgram scalar_multiplier_program(const Matrix& phi, double tol) {
  ScalarProgram out;
  const auto n = static_cast<int>(phi.rows());
  if (phi.rows() != phi.cols()) throw std::invalid_argument("symbol must be square");
  out.gram = zeros(2 * static_cast<std::size_t>(n), 2 * static_cast<std::size_t>(n));
  if (n == 0) return out;
  const double scale = phi.cwiseAbs().maxCoeff();
  if (scale == 0.0) return out;

  using sdp::Constraint;
  using sdp::SparseHermitian;
  const auto big = static_cast<std::size_t>(2 * n);
  std::vector<std::size_t> dims{big};
  std::vector<SparseHermitian> objective;
  SparseHermitian c0(big);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) c0.add_hermitian(i, n + j, phi(i, j) / scale);
  }
  objective.push_back(c0);
  // One 1 x 1 slack block t - P_ii or t - Q_jj per diagonal entry.
  for (int k = 0; k < 2 * n; ++k) {
    dims.push_back(1);
    objective.emplace_back(1);
  }

  std::vector<Constraint> cons;
  {
    Constraint t;
    t.rhs = -1.0;
    for (int k = 0; k < 2 * n; ++k) {
      SparseHermitian s(1);
      s.add_hermitian(0, 0, -1.0);
      t.blocks.emplace_back(static_cast<std::size_t>(1 + k), s);
    }
    cons.push_back(std::move(t));
  }
  for (int side = 0; side < 2; ++side) {
    const int off = side * n;
    for (int i = 0; i < n; ++i) {
      Constraint diag;
      SparseHermitian a(big);
      a.add_hermitian(off + i, off + i, -1.0);
      SparseHermitian s(1);
      s.add_hermitian(0, 0, 1.0);
      diag.blocks = {{0, a}, {static_cast<std::size_t>(1 + off + i), s}};
      cons.push_back(std::move(diag));
      for (int j = i + 1; j < n; ++j) {
        for (const Complex phase : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          Constraint offd;
          SparseHermitian b(big);
          b.add_hermitian(off + i, off + j, -phase);
          offd.blocks = {{0, b}};
          cons.push_back(std::move(offd));
        }
      }
    }
  }
  const sdp::Problem problem(dims, objective, std::move(cons));
  const sdp::Solution sol = sdp::solve(problem, tol);
  out.status = sol.status;
  out.value = -0.5 * scale * (sol.primal_objective + sol.dual_objective);
  out.gram = scale * sdp::dual_slack(problem, sol.y)[0];
  return out;
}

MultiplierNorm multiplier_norm(const SchurSymbol& phi, double tol,
                               const AscentOptions& options) {
  MultiplierNorm out;
  if (phi.grid_size() == 0 || phi.block_dim() == 0) return out;
  const LinearMatrixMap map = multiplier_map(phi);
  const CbNormResult cb = cb_norm_result(map, tol);
  out.status = cb.status;
  out.gap = cb.gap;
  if (cb.status != sdp::Status::Optimal) {
    throw SolverFailure("solver failure: " + sdp::to_string(cb.status), cb.status);
  }
  out.cb = cb.value;
  out.norm_lb = norm_lower(map, options);
  if (phi.is_scalar()) {
    const ScalarProgram sp = scalar_multiplier_program(*phi.scalar(), tol);
    if (sp.status != sdp::Status::Optimal) {
      throw SolverFailure("solver failure: " + sdp::to_string(sp.status), sp.status);
    }
    out.scalar_cb = sp.value;
  }
  out.consistent = out.norm_lb <= out.cb + tol * std::max(1.0, out.cb);
  return out;
}

ScalarFactorization scalar_factorization(const SchurSymbol& phi, double tol) {
  if (!phi.is_scalar()) {
    if (phi.grid_size() != 0) throw std::invalid_argument("scalar only");
    return {};
  }
  const Matrix& s = *phi.scalar();
  const auto n = static_cast<Eigen::Index>(s.rows());
  ScalarFactorization out;
  const ScalarProgram sp = scalar_multiplier_program(s, tol);
  if (sp.status != sdp::Status::Optimal) {
    throw SolverFailure("solver failure: " + sdp::to_string(sp.status), sp.status);
  }
  const auto l = psd_cholesky(sp.gram, 1e-6);
  if (!l) {
    throw SolverFailure("solver failure: certificate block is not PSD",
                        sdp::Status::MaxIter);
  }
  // G = L L^* = W^* W with W = L^*: columns of W are y_1..y_N, x_1..x_N.
  const Matrix w = l->adjoint();
  double ymax = 0.0;
  double xmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.y.push_back(w.col(i));
    out.x.push_back(w.col(n + i));
    ymax = std::max(ymax, out.y.back().norm());
    xmax = std::max(xmax, out.x.back().norm());
  }
  if (ymax > 0.0 && xmax > 0.0) {
    const double c = std::sqrt(xmax / ymax);
    for (auto& y : out.y) y *= c;
    for (auto& x : out.x) x /= c;
  }
  ymax = 0.0;
  xmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    ymax = std::max(ymax, out.y[static_cast<std::size_t>(i)].norm());
    xmax = std::max(xmax, out.x[static_cast<std::size_t>(i)].norm());
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex ip =
          inner(out.x[static_cast<std::size_t>(j)], out.y[static_cast<std::size_t>(i)]);
      out.residual = std::max(out.residual, std::abs(ip - s(i, j)));
    }
  }
  out.value = ymax * xmax;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Matrix> diagonal_expectation(const BlockMatrix& s) {
  return diagonal_expectation_n(s, s.grid_size());
}

std::vector<Matrix> diagonal_expectation_n(const BlockMatrix& s, std::size_t n) {
  std::vector<Matrix> out;
  out.reserve(s.grid_size());
  for (std::size_t k = 0; k < s.grid_size(); ++k) {
    out.push_back(k < n ? s.block(k, k) : zeros(s.block_dim(), s.block_dim()));
  }
  return out;
}

BlockMap two_sided_map(std::vector<BlockMatrix> r, std::vector<BlockMatrix> s) {
  if (r.size() != s.size()) throw std::invalid_argument("shape mismatch");
  std::vector<std::pair<Matrix, Matrix>> flat;
  std::size_t n = 0;
  std::size_t d = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i == 0) {
      n = r[0].grid_size();
      d = r[0].block_dim();
    }
    check_shape(r[i], n, d);
    check_shape(s[i], n, d);
    flat.emplace_back(r[i].flatten(), s[i].flatten());
  }
  return [flat = std::move(flat), n, d](const BlockMatrix& t) {
    if (flat.empty()) return BlockMatrix(t.grid_size(), t.block_dim());
    check_shape(t, n, d);
    const Matrix tf = t.flatten();
    Matrix out = zeros(n * d, n * d);
    for (const auto& [rf, sf] : flat) out.noalias() += rf * tf * sf;
    return BlockMatrix::reblock(out, n, d);
  };
}

SchurSymbol schur_compression(const BlockMap& psi, std::size_t grid_size,
                              std::size_t block_dim) {
  const std::size_t d = block_dim;
  const auto di = static_cast<Eigen::Index>(d);
  std::vector<LinearMatrixMap> entries;
  entries.reserve(grid_size * grid_size);
  for (std::size_t p = 0; p < grid_size; ++p) {
    for (std::size_t q = 0; q < grid_size; ++q) {
      Matrix choi = zeros(d * d, d * d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const BlockMatrix probe =
              BlockMatrix::unit(grid_size, q, p, matrix_unit(d, d, i, j));
          const BlockMatrix image = psi(probe);
          check_shape(image, grid_size, d);
          choi.block(static_cast<Eigen::Index>(i) * di,
                     static_cast<Eigen::Index>(j) * di, di, di) = image.block(q, p);
        }
      }
      entries.push_back(LinearMatrixMap::from_choi(choi, d, d));
    }
  }
  return SchurSymbol(grid_size, block_dim, std::move(entries));
}

SchurSymbol representation_to_symbol(const DiagonalRepresentation& rep) {
  const std::size_t n = rep.grid_size();
  const std::size_t d = rep.block_dim();
  std::vector<LinearMatrixMap> entries;
  entries.reserve(n * n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<MapPair> pairs;
      for (std::size_t i = 0; i < rep.length(); ++i) {
        pairs.push_back({rep.a()[i][k], rep.b()[i][m]});
      }
      entries.push_back(LinearMatrixMap::from_pairs(d, d, std::move(pairs)));
    }
  }
  return SchurSymbol(n, d, std::move(entries));
}

CompressionReport diagonal_compression_identity_check(
    const std::vector<BlockMatrix>& r, const std::vector<BlockMatrix>& s,
    int trials, std::uint64_t seed) {
  CompressionReport rep;
  rep.trials = trials;
  if (r.empty()) return rep;
  const std::size_t n = r[0].grid_size();
  const std::size_t d = r[0].block_dim();
  const SchurSymbol lhs = schur_compression(two_sided_map(r, s), n, d);

  std::vector<std::vector<Matrix>> a;
  std::vector<std::vector<Matrix>> b;
  for (std::size_t i = 0; i < r.size(); ++i) {
    a.push_back(diagonal_expectation(r[i]));
    b.push_back(diagonal_expectation(s[i]));
  }
  const SchurSymbol rhs = representation_to_symbol(DiagonalRepresentation(n, d, a, b));

  for (std::size_t k = 0; k < n * n; ++k) {
    rep.choi_residual = std::max(
        rep.choi_residual, max_abs_diff(lhs.entries()[k].choi(), rhs.entries()[k].choi()));
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const BlockMatrix x = random_block_matrix(rng, n, d);
    rep.action_residual = std::max(
        rep.action_residual, max_abs_diff(apply_symbol(lhs, x), apply_symbol(rhs, x)));
  }
  rep.residual = std::max(rep.choi_residual, rep.action_residual);
  return rep;
}

DecayReport representation_decay_report(const DiagonalRepresentation& rep) {
  DecayReport out;
  const std::size_t d = rep.block_dim();
  for (std::size_t k = 0; k < rep.grid_size(); ++k) {
    Matrix ga = zeros(d, d);
    Matrix gb = zeros(d, d);
    for (std::size_t i = 0; i < rep.length(); ++i) {
      ga.noalias() += rep.a()[i][k] * rep.a()[i][k].adjoint();
      gb.noalias() += rep.b()[i][k].adjoint() * rep.b()[i][k];
    }
    out.row.push_back(d == 0 ? 0.0 : operator_norm(ga));
    out.col.push_back(d == 0 ? 0.0 : operator_norm(gb));
  }
  return out;
}

double representation_bound(const DiagonalRepresentation& rep) {
  const DecayReport decay = representation_decay_report(rep);
  if (decay.row.empty()) return 0.0;
  return std::sqrt(*std::max_element(decay.row.begin(), decay.row.end())) *
         std::sqrt(*std::max_element(decay.col.begin(), decay.col.end()));
}

SchurSymbol tail_symbol(const SchurSymbol& phi, std::size_t n) {
  if (n > phi.grid_size()) throw std::invalid_argument("tail: n exceeds grid size");
  std::vector<LinearMatrixMap> entries;
  entries.reserve(phi.entries().size());
  const std::size_t d = phi.block_dim();
  for (std::size_t p = 0; p < phi.grid_size(); ++p) {
    for (std::size_t q = 0; q < phi.grid_size(); ++q) {
      entries.push_back(p < n || q < n ? LinearMatrixMap::zero(d, d) : phi.entry(p, q));
    }
  }
  return SchurSymbol(phi.grid_size(), d, std::move(entries));
}

double tail_multiplier_norm(const SchurSymbol& phi, std::size_t n, double tol) {
  const SchurSymbol tail = tail_symbol(phi, n);
  if (tail.grid_size() == 0 || tail.block_dim() == 0) return 0.0;
  return cb_norm(multiplier_map(tail), tol);
}

std::vector<CounterexampleRow> counterexample_report(
    std::size_t max_k, const std::function<double(std::size_t)>& weight, double tol,
    const AscentOptions& options) {
  if (max_k == 0) throw std::invalid_argument("counterexample: K must be >= 1");
  std::vector<CounterexampleRow> rows;
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double alpha = weight(k);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw std::invalid_argument("counterexample: weights must be positive");
    }
    const LinearMatrixMap m = LinearMatrixMap::transpose(k).scaled(alpha);
    CounterexampleRow row;
    row.k = k;
    row.weight = alpha;
    row.block_norm = norm_lower(m, options);
    const CbNormResult cb = cb_norm_result(m, tol);
    if (cb.status != sdp::Status::Optimal) {
      throw SolverFailure("solver failure: " + sdp::to_string(cb.status), cb.status);
    }
    row.block_cb = cb.value;
    row.status = cb.status;
    rows.push_back(row);
  }
  return rows;
}

KernelBoundReport kernel_bound_check(const BlockMatrix& k, const SchurSymbol& phi,
                                     double tol, double margin) {
  check_shape(k, phi.grid_size(), phi.block_dim());
  KernelBoundReport rep;
  if (k.grid_size() == 0 || k.block_dim() == 0) {
    rep.holds = true;
    return rep;
  }
  rep.kernel_norm = operator_norm(k.flatten());
  rep.kernel_l2 = kernel_l2_norm(k);
  rep.image_l2 = kernel_l2_norm(apply_symbol(phi, k));
  if (phi.is_scalar()) {
    rep.symbol_sup = phi.scalar()->cwiseAbs().maxCoeff();
  } else {
    for (const auto& e : phi.entries()) {
      const CbNormResult cb = cb_norm_result(e, tol);
      if (cb.status != sdp::Status::Optimal) {
        throw SolverFailure("solver failure: " + sdp::to_string(cb.status), cb.status);
      }
      const double upper = cb.value + std::max(cb.gap, tol * (1.0 + cb.value));
      rep.symbol_sup = std::max(rep.symbol_sup, upper);
    }
  }
  rep.operator_margin = rep.kernel_l2 - rep.kernel_norm;
  rep.multiplier_margin = rep.symbol_sup * rep.kernel_l2 - rep.image_l2;
  rep.holds = rep.operator_margin >= -margin && rep.multiplier_margin >= -margin;
  return rep;
}

}  // namespace opspace
