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

#include "opspace/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace opspace::sdp {

// ---------------------------------------------------------------------------
// SparseHermitian

SparseHermitian SparseHermitian::from_dense(const Matrix& m, double drop) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("SparseHermitian: matrix is not square");
  }
  SparseHermitian out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > drop) {
        out.entries_.push_back(
            {static_cast<int>(i), static_cast<int>(j), m(i, j)});
      }
    }
  }
  return out;
}

void SparseHermitian::add_hermitian(int row, int col, Complex v) {
  if (row == col) {
    entries_.push_back({row, col, Complex(v.real(), 0.0)});
  } else {
    entries_.push_back({row, col, v});
    entries_.push_back({col, row, std::conj(v)});
  }
}

Matrix SparseHermitian::dense() const {
  Matrix m = zeros(dim_, dim_);
  for (const auto& e : entries_) m(e.row, e.col) += e.value;
  return m;
}

double SparseHermitian::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::norm(e.value);
  return std::sqrt(s);
}

void SparseHermitian::compress() {
  std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<SparseEntry> merged;
  for (const auto& e : entries_) {
    if (!merged.empty() && merged.back().row == e.row &&
        merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& e) { return e.value == 0.0; }),
               merged.end());
  entries_ = std::move(merged);
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "Optimal";
    case Status::MaxIter:
      return "MaxIter";
    case Status::Infeasible:
      return "Infeasible";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Problem

namespace {

constexpr double kHermitianTol = 1e-12;

void check_hermitian(const SparseHermitian& m, const char* what) {
  const Matrix d = m.dense();
  const double scale = std::max(1.0, d.size() ? d.cwiseAbs().maxCoeff() : 0.0);
  if (!is_hermitian(d, kHermitianTol * scale)) {
    throw std::invalid_argument(std::string("sdp: ") + what +
                                " is not Hermitian");
  }
}

// Re tr(A B) for Hermitian A, B given as sorted entry lists.
double sparse_trace_product(const SparseHermitian& a, const SparseHermitian& b) {
  // tr(AB) = sum_{pq} A_pq B_qp = sum_{pq} A_pq conj(B_pq).
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  double s = 0.0;
  while (i < ea.size() && j < eb.size()) {
    const auto ka = std::make_pair(ea[i].row, ea[i].col);
    const auto kb = std::make_pair(eb[j].row, eb[j].col);
    if (ka < kb) {
      ++i;
    } else if (kb < ka) {
      ++j;
    } else {
      s += (ea[i].value * std::conj(eb[j].value)).real();
      ++i;
      ++j;
    }
  }
  return s;
}

}  // namespace

Problem::Problem(std::vector<std::size_t> block_dims,
                 std::vector<SparseHermitian> objective,
                 std::vector<Constraint> constraints)
    : block_dims_(std::move(block_dims)),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)) {
  if (objective_.size() != block_dims_.size()) {
    throw std::invalid_argument("sdp: one objective block per block dim");
  }
  for (std::size_t b = 0; b < block_dims_.size(); ++b) {
    if (block_dims_[b] == 0) throw std::invalid_argument("sdp: empty block");
    if (objective_[b].dim() != block_dims_[b]) {
      throw std::invalid_argument("sdp: objective block has wrong size");
    }
    objective_[b].compress();
    check_hermitian(objective_[b], "objective");
  }
  for (auto& c : constraints_) {
    std::sort(c.blocks.begin(), c.blocks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [b, m] : c.blocks) {
      if (b >= block_dims_.size() || m.dim() != block_dims_[b]) {
        throw std::invalid_argument("sdp: constraint block has wrong size");
      }
      m.compress();
      check_hermitian(m, "constraint");
    }
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("sdp: non-finite rhs");
  }
  rank_check();
}

void Problem::rank_check() {
  const std::size_t m = constraints_.size();
  // Gram matrix of the constraint matrices under <P, Q> = Re tr(PQ).
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      const auto& bi = constraints_[i].blocks;
      const auto& bj = constraints_[j].blocks;
      std::size_t p = 0;
      std::size_t q = 0;
      while (p < bi.size() && q < bj.size()) {
        if (bi[p].first < bj[q].first) {
          ++p;
        } else if (bj[q].first < bi[p].first) {
          ++q;
        } else {
          s += sparse_trace_product(bi[p].second, bj[q].second);
          ++p;
          ++q;
        }
      }
      gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
      gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = s;
    }
  }

  // Pivoted Cholesky on the unit-diagonal scaled Gram matrix.
  Eigen::VectorXd scale(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    scale(i) = gram(i, i) > 0.0 ? 1.0 / std::sqrt(gram(i, i)) : 0.0;
  }
  const Eigen::MatrixXd g = scale.asDiagonal() * gram * scale.asDiagonal();
  constexpr double kRankTol = 1e-10;
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(mi, mi);
  Eigen::VectorXd residual = g.diagonal();
  std::vector<bool> chosen(m, false);
  std::vector<std::size_t> pivots;
  while (true) {
    Eigen::Index best = -1;
    double best_val = kRankTol;
    for (Eigen::Index i = 0; i < mi; ++i) {
      if (!chosen[static_cast<std::size_t>(i)] && residual(i) > best_val) {
        best = i;
        best_val = residual(i);
      }
    }
    if (best < 0) break;
    const auto k = static_cast<Eigen::Index>(pivots.size());
    const double piv = std::sqrt(residual(best));
    for (Eigen::Index i = 0; i < mi; ++i) {
      double v = g(i, best);
      for (Eigen::Index t = 0; t < k; ++t) v -= l(i, t) * l(best, t);
      l(i, k) = v / piv;
    }
    for (Eigen::Index i = 0; i < mi; ++i) residual(i) -= l(i, k) * l(i, k);
    chosen[static_cast<std::size_t>(best)] = true;
    pivots.push_back(static_cast<std::size_t>(best));
  }
  active_ = pivots;
  std::sort(active_.begin(), active_.end());
  if (active_.size() == m) return;

  // Every set-aside constraint is a combination of the kept ones; its rhs must
  // follow the same combination.
  const auto r = static_cast<Eigen::Index>(active_.size());
  Eigen::MatrixXd g_aa(r, r);
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = 0; b < r; ++b) {
      g_aa(a, b) = gram(static_cast<Eigen::Index>(active_[a]),
                        static_cast<Eigen::Index>(active_[b]));
    }
  }
  Eigen::LDLT<Eigen::MatrixXd> solver(g_aa);
  for (std::size_t j = 0; j < m; ++j) {
    if (chosen[j]) continue;
    Eigen::VectorXd rhs(r);
    for (Eigen::Index a = 0; a < r; ++a) {
      rhs(a) = gram(static_cast<Eigen::Index>(active_[a]),
                    static_cast<Eigen::Index>(j));
    }
    const Eigen::VectorXd coef = r > 0 ? Eigen::VectorXd(solver.solve(rhs))
                                       : Eigen::VectorXd(0);
    double predicted = 0.0;
    double magnitude = std::abs(constraints_[j].rhs);
    for (Eigen::Index a = 0; a < r; ++a) {
      predicted += coef(a) * constraints_[active_[a]].rhs;
      magnitude += std::abs(coef(a) * constraints_[active_[a]].rhs);
    }
    const double mismatch = constraints_[j].rhs - predicted;
    if (std::abs(mismatch) > 1e-9 * (1.0 + magnitude)) {
      RealVector y = RealVector::Zero(static_cast<Eigen::Index>(m));
      y(static_cast<Eigen::Index>(j)) = 1.0;
      for (Eigen::Index a = 0; a < r; ++a) {
        y(static_cast<Eigen::Index>(active_[a])) = -coef(a);
      }
      certificate_ = y / mismatch;
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Solver

namespace {

using Blocks = std::vector<Matrix>;

struct Term {
  std::size_t row;  // index into the active constraint list
  const SparseHermitian* matrix;
};

class Workspace {
 public:
  explicit Workspace(const Problem& p) : problem_(p) {
    const auto& active = p.active();
    terms_.resize(p.block_dims().size());
    b_ = RealVector(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& c = p.constraints()[active[k]];
      b_(static_cast<Eigen::Index>(k)) = c.rhs;
      for (const auto& [blk, mat] : c.blocks) {
        if (!mat.empty()) terms_[blk].push_back({k, &mat});
      }
    }
    for (std::size_t blk = 0; blk < p.block_dims().size(); ++blk) {
      c_.push_back(p.objective()[blk].dense());
    }
  }

  std::size_t m() const { return static_cast<std::size_t>(b_.size()); }
  const RealVector& b() const { return b_; }
  const Blocks& c() const { return c_; }

  RealVector apply_a(const Blocks& k) const {
    RealVector out = RealVector::Zero(b_.size());
    for (std::size_t blk = 0; blk < terms_.size(); ++blk) {
      const Matrix& kb = k[blk];
      for (const auto& t : terms_[blk]) {
        double s = 0.0;
        for (const auto& e : t.matrix->entries()) {
          s += (e.value * kb(e.col, e.row)).real();
        }
        out(static_cast<Eigen::Index>(t.row)) += s;
      }
    }
    return out;
  }

  Blocks apply_at(const RealVector& y) const {
    Blocks out;
    for (std::size_t dim : problem_.block_dims()) out.push_back(zeros(dim, dim));
    for (std::size_t blk = 0; blk < terms_.size(); ++blk) {
      for (const auto& t : terms_[blk]) {
        const double yi = y(static_cast<Eigen::Index>(t.row));
        if (yi == 0.0) continue;
        for (const auto& e : t.matrix->entries()) {
          out[blk](e.row, e.col) += yi * e.value;
        }
      }
    }
    return out;
  }

  // M_ij = Re tr(A_i X A_j W) summed over blocks, W = Z^{-1}.
  Eigen::MatrixXd schur(const Blocks& x, const Blocks& w) const {
    const auto mm = static_cast<Eigen::Index>(m());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(mm, mm);
    for (std::size_t blk = 0; blk < terms_.size(); ++blk) {
      const auto& terms = terms_[blk];
      const Matrix& xb = x[blk];
      const Matrix& wb = w[blk];
      const auto n = static_cast<std::size_t>(xb.rows());
      // Constraints with many entries get an explicit X A_j W.
      std::vector<Matrix> g(terms.size());
      std::vector<bool> dense(terms.size(), false);
      for (std::size_t t = 0; t < terms.size(); ++t) {
        if (terms[t].matrix->entries().size() > 2 * n) {
          dense[t] = true;
          g[t] = xb * terms[t].matrix->dense() * wb;
        }
      }
      for (std::size_t s = 0; s < terms.size(); ++s) {
        for (std::size_t t = s; t < terms.size(); ++t) {
          double v = 0.0;
          if (dense[t] || dense[s]) {
            const std::size_t via = dense[t] ? t : s;
            const std::size_t other = dense[t] ? s : t;
            const Matrix& gv = g[via];
            for (const auto& e : terms[other].matrix->entries()) {
              v += (e.value * gv(e.col, e.row)).real();
            }
          } else {
            // sum_{(p,q,a) in A_s} sum_{(r,u,c) in A_t} a c X_{qr} W_{up}
            for (const auto& ea : terms[s].matrix->entries()) {
              Complex acc = 0.0;
              for (const auto& ec : terms[t].matrix->entries()) {
                acc += ec.value * xb(ea.col, ec.row) * wb(ec.col, ea.row);
              }
              v += (ea.value * acc).real();
            }
          }
          const auto i = static_cast<Eigen::Index>(terms[s].row);
          const auto j = static_cast<Eigen::Index>(terms[t].row);
          out(i, j) += v;
          if (i != j) out(j, i) += v;
        }
      }
    }
    return out;
  }

 private:
  const Problem& problem_;
  std::vector<std::vector<Term>> terms_;
  RealVector b_;
  Blocks c_;
};

double inner_blocks(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += (a[k].array() * b[k].conjugate().array()).sum().real();
  }
  return s;
}

double norm_blocks(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Matrix herm(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix inverse_pd(const Matrix& m) {
  const Eigen::MatrixXcd dense = m;
  Eigen::LLT<Eigen::MatrixXcd> llt(dense);
  if (llt.info() != Eigen::Success) {
    const HermitianEigen eig = hermitian_eigen(m);
    Matrix inv = zeros(static_cast<std::size_t>(m.rows()),
                       static_cast<std::size_t>(m.rows()));
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      const double lam = std::max(eig.values(k), 1e-300);
      inv += (1.0 / lam) * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    }
    return inv;
  }
  return herm(llt.solve(Eigen::MatrixXcd::Identity(m.rows(), m.cols())));
}

// Largest alpha with X + alpha dX >= 0 (infinity when unbounded).
double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Eigen::MatrixXcd xd = x[k];
    Eigen::LLT<Eigen::MatrixXcd> llt(xd);
    Eigen::MatrixXcd t;
    if (llt.info() == Eigen::Success) {
      const Eigen::MatrixXcd dxd = dx[k];
      Eigen::MatrixXcd half = llt.matrixL().solve(dxd);
      t = llt.matrixL().solve(half.adjoint().eval());
    } else {
      return 0.0;
    }
    t = 0.5 * (t + t.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(t, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

Blocks add(const Blocks& a, const Blocks& b, double s) {
  Blocks out = a;
  for (std::size_t k = 0; k < a.size(); ++k) out[k] += s * b[k];
  return out;
}

}  // namespace

std::vector<Matrix> dual_slack(const Problem& problem, const RealVector& y) {
  if (static_cast<std::size_t>(y.size()) != problem.constraints().size()) {
    throw std::invalid_argument("dual_slack: y has wrong length");
  }
  std::vector<Matrix> s;
  for (const auto& c : problem.objective()) s.push_back(c.dense());
  for (std::size_t i = 0; i < problem.constraints().size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    for (const auto& [blk, mat] : problem.constraints()[i].blocks) {
      for (const auto& e : mat.entries()) s[blk](e.row, e.col) -= yi * e.value;
    }
  }
  return s;
}

Solution solve(const Problem& problem, double tol, int max_iter) {
  Solution sol;
  const std::size_t all_m = problem.constraints().size();
  sol.y = RealVector::Zero(static_cast<Eigen::Index>(all_m));

  if (problem.dependency_certificate()) {
    sol.status = Status::Infeasible;
    sol.infeasible_side = "primal";
    sol.y = *problem.dependency_certificate();
    for (std::size_t dim : problem.block_dims()) {
      sol.x.push_back(zeros(dim, dim));
      sol.z.push_back(zeros(dim, dim));
    }
    sol.dual_objective = std::numeric_limits<double>::infinity();
    sol.primal_objective = std::numeric_limits<double>::infinity();
    sol.gap = std::numeric_limits<double>::infinity();
    return sol;
  }

  const Workspace ws(problem);
  const std::size_t m = ws.m();
  const auto& dims = problem.block_dims();
  std::size_t n_total = 0;
  for (std::size_t d : dims) n_total += d;

  const double b_norm = ws.b().norm();
  const double c_norm = norm_blocks(ws.c());

  // Initial point from problem scaling.
  Blocks x;
  Blocks z;
  for (std::size_t blk = 0; blk < dims.size(); ++blk) {
    const auto n = static_cast<double>(dims[blk]);
    double xi = std::max(10.0, std::sqrt(n));
    double eta = std::max({10.0, std::sqrt(n), problem.objective()[blk].frobenius_norm()});
    for (std::size_t k = 0; k < m; ++k) {
      const auto& c = problem.constraints()[problem.active()[k]];
      for (const auto& [b2, mat] : c.blocks) {
        if (b2 != blk) continue;
        const double fn = mat.frobenius_norm();
        xi = std::max(xi, n * (1.0 + std::abs(c.rhs)) / (1.0 + fn));
        eta = std::max(eta, fn);
      }
    }
    x.push_back(xi * identity(dims[blk]));
    z.push_back(eta * identity(dims[blk]));
  }
  RealVector y = RealVector::Zero(static_cast<Eigen::Index>(m));

  auto finish = [&](Status status) {
    sol.status = status;
    sol.x = x;
    sol.z = z;
    for (std::size_t k = 0; k < m; ++k) {
      sol.y(static_cast<Eigen::Index>(problem.active()[k])) =
          y(static_cast<Eigen::Index>(k));
    }
    return sol;
  };

  int stalled = 0;
  for (int iter = 0;; ++iter) {
    const RealVector rp = ws.b() - ws.apply_a(x);
    const Blocks aty = ws.apply_at(y);
    Blocks rd = ws.c();
    for (std::size_t k = 0; k < rd.size(); ++k) rd[k] -= z[k] + aty[k];

    const double pobj = inner_blocks(ws.c(), x);
    const double dobj = ws.b().dot(y);
    const double mu = inner_blocks(x, z) / static_cast<double>(n_total);
    const double pinf = rp.norm() / (1.0 + b_norm);
    const double dinf = norm_blocks(rd) / (1.0 + c_norm);

    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = std::abs(pobj - dobj);
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.iterations = iter;
    sol.history.push_back({pobj, dobj, pinf, dinf, mu});

    if (sol.gap <= tol * (1.0 + std::abs(pobj)) && pinf <= tol && dinf <= tol) {
      return finish(Status::Optimal);
    }
    // Approximate Farkas certificates from diverging iterates.
    if (dobj > 0.0 && (c_norm + norm_blocks(rd)) / dobj < tol) {
      sol.infeasible_side = "primal";
      return finish(Status::Infeasible);
    }
    if (pobj < 0.0 && (ws.b() - rp).norm() / (-pobj) < tol) {
      sol.infeasible_side = "dual";
      return finish(Status::Infeasible);
    }
    if (iter >= max_iter || stalled >= 5) return finish(Status::MaxIter);

    Blocks w;
    for (const auto& zb : z) w.push_back(inverse_pd(zb));
    Eigen::MatrixXd schur = ws.schur(x, w);
    Eigen::LLT<Eigen::MatrixXd> llt(schur);
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    const bool use_llt = llt.info() == Eigen::Success;
    if (!use_llt) ldlt.compute(schur);
    auto solve_schur = [&](const RealVector& rhs) -> RealVector {
      return use_llt ? RealVector(llt.solve(rhs)) : RealVector(ldlt.solve(rhs));
    };

    // X Rd W is shared by predictor and corrector.
    Blocks x_rd_w;
    for (std::size_t k = 0; k < x.size(); ++k) x_rd_w.push_back(x[k] * rd[k] * w[k]);

    auto direction = [&](double sigma_mu, const Blocks* corr, Blocks& dx,
                         Blocks& dz, RealVector& dy) {
      Blocks k_blocks;
      for (std::size_t k = 0; k < x.size(); ++k) {
        Matrix kb = sigma_mu * w[k] - x[k];
        if (corr) kb -= (*corr)[k];
        k_blocks.push_back(kb - x_rd_w[k]);
      }
      dy = solve_schur(rp - ws.apply_a(k_blocks));
      const Blocks atdy = ws.apply_at(dy);
      dz.clear();
      dx.clear();
      for (std::size_t k = 0; k < x.size(); ++k) {
        dz.push_back(rd[k] - atdy[k]);
        Matrix dxk = sigma_mu * w[k] - x[k] - x[k] * dz[k] * w[k];
        if (corr) dxk -= (*corr)[k];
        dx.push_back(herm(dxk));
      }
    };

    Blocks dx_aff;
    Blocks dz_aff;
    RealVector dy_aff;
    direction(0.0, nullptr, dx_aff, dz_aff, dy_aff);
    const double ap_aff = std::min(1.0, max_step(x, dx_aff));
    const double ad_aff = std::min(1.0, max_step(z, dz_aff));
    const double mu_aff =
        inner_blocks(add(x, dx_aff, ap_aff), add(z, dz_aff, ad_aff)) /
        static_cast<double>(n_total);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    Blocks corr;
    for (std::size_t k = 0; k < x.size(); ++k) {
      corr.push_back(dx_aff[k] * dz_aff[k] * w[k]);
    }
    Blocks dx;
    Blocks dz;
    RealVector dy;
    direction(sigma * mu, &corr, dx, dz, dy);

    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    const double ap = std::min(1.0, gamma * max_step(x, dx));
    const double ad = std::min(1.0, gamma * max_step(z, dz));
    stalled = (ap < 1e-9 && ad < 1e-9) ? stalled + 1 : 0;

    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = herm(x[k] + ap * dx[k]);
      z[k] = herm(z[k] + ad * dz[k]);
    }
    y += ad * dy;
  }
}

}  // namespace opspace::sdp
