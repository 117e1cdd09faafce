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

#include "opspace/cbmaps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace opspace {

Matrix choi_from_pairs(std::size_t in_dim, std::size_t out_dim,
                       const std::vector<MapPair>& pairs) {
  const auto d = static_cast<Eigen::Index>(in_dim);
  const auto dp = static_cast<Eigen::Index>(out_dim);
  Matrix c = zeros(in_dim * out_dim, in_dim * out_dim);
  // C[(i,r),(j,s)] = A[r,i] B[j,s]: a rank-one term u w^T per pair.
  Vector u(d * dp);
  Vector w(d * dp);
  for (const auto& p : pairs) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index r = 0; r < dp; ++r) {
        u(i * dp + r) = p.left(r, i);
        w(i * dp + r) = p.right(i, r);
      }
    }
    c.noalias() += u * w.transpose();
  }
  return c;
}

LinearMatrixMap LinearMatrixMap::from_pairs(std::size_t in_dim,
                                            std::size_t out_dim,
                                            std::vector<MapPair> pairs) {
  for (const auto& p : pairs) {
    if (static_cast<std::size_t>(p.left.rows()) != out_dim ||
        static_cast<std::size_t>(p.left.cols()) != in_dim ||
        static_cast<std::size_t>(p.right.rows()) != in_dim ||
        static_cast<std::size_t>(p.right.cols()) != out_dim) {
      throw std::invalid_argument("from_pairs: dimension mismatch");
    }
    if (!all_finite(p.left) || !all_finite(p.right)) {
      throw std::invalid_argument("from_pairs: non-finite entries");
    }
  }
  Matrix c = choi_from_pairs(in_dim, out_dim, pairs);
  return LinearMatrixMap(in_dim, out_dim, std::move(pairs), std::move(c));
}

LinearMatrixMap LinearMatrixMap::from_choi(const Matrix& choi,
                                           std::size_t in_dim,
                                           std::size_t out_dim) {
  const auto n = static_cast<Eigen::Index>(in_dim * out_dim);
  if (choi.rows() != n || choi.cols() != n) {
    throw std::invalid_argument("from_choi: dimension mismatch");
  }
  if (!all_finite(choi)) throw std::invalid_argument("from_choi: non-finite entries");
  std::vector<MapPair> pairs;
  if (n > 0) {
    const Svd s = svd(choi);
    const double cutoff = 1e-12 * s.values(0);
    const auto d = static_cast<Eigen::Index>(in_dim);
    const auto dp = static_cast<Eigen::Index>(out_dim);
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
      if (!(s.values(k) > cutoff)) break;
      const double root = std::sqrt(s.values(k));
      MapPair p{zeros(out_dim, in_dim), zeros(in_dim, out_dim)};
      for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index r = 0; r < dp; ++r) {
          p.left(r, i) = root * s.left(i * dp + r, k);
          p.right(i, r) = root * std::conj(s.right(i * dp + r, k));
        }
      }
      pairs.push_back(std::move(p));
    }
  }
  return LinearMatrixMap(in_dim, out_dim, std::move(pairs), choi);
}

LinearMatrixMap LinearMatrixMap::identity(std::size_t d) {
  return from_pairs(d, d, {{opspace::identity(d), opspace::identity(d)}});
}

LinearMatrixMap LinearMatrixMap::transpose(std::size_t n) {
  std::vector<MapPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pairs.push_back({matrix_unit(n, n, i, j), matrix_unit(n, n, i, j)});
    }
  }
  return from_pairs(n, n, std::move(pairs));
}

LinearMatrixMap LinearMatrixMap::zero(std::size_t in_dim, std::size_t out_dim) {
  return from_pairs(in_dim, out_dim, {});
}

LinearMatrixMap LinearMatrixMap::two_sided(const Matrix& a, const Matrix& b) {
  return from_pairs(static_cast<std::size_t>(a.cols()),
                    static_cast<std::size_t>(a.rows()), {{a, b}});
}

Matrix LinearMatrixMap::apply(const Matrix& x) const {
  if (static_cast<std::size_t>(x.rows()) != in_dim_ ||
      static_cast<std::size_t>(x.cols()) != in_dim_) {
    throw std::invalid_argument("apply: dimension mismatch");
  }
  Matrix out = zeros(out_dim_, out_dim_);
  for (const auto& p : pairs_) out.noalias() += p.left * x * p.right;
  return out;
}

LinearMatrixMap LinearMatrixMap::amplify(std::size_t k) const {
  if (k == 0) throw std::invalid_argument("amplify: level must be >= 1");
  if (k == 1) return *this;
  std::vector<MapPair> pairs;
  pairs.reserve(pairs_.size());
  const Matrix ik = opspace::identity(k);
  for (const auto& p : pairs_) pairs.push_back({kron(ik, p.left), kron(ik, p.right)});
  return from_pairs(k * in_dim_, k * out_dim_, std::move(pairs));
}

LinearMatrixMap LinearMatrixMap::scaled(Complex c) const {
  std::vector<MapPair> pairs = pairs_;
  for (auto& p : pairs) p.left *= c;
  return LinearMatrixMap(in_dim_, out_dim_, std::move(pairs), c * choi_);
}

LinearMatrixMap LinearMatrixMap::minimal() const {
  return from_choi(choi_, in_dim_, out_dim_);
}

LinearMatrixMap LinearMatrixMap::dual() const {
  std::vector<MapPair> pairs;
  pairs.reserve(pairs_.size());
  for (const auto& p : pairs_) pairs.push_back({p.left.adjoint(), p.right.adjoint()});
  return from_pairs(out_dim_, in_dim_, std::move(pairs));
}

// ---------------------------------------------------------------------------
// Operator norm lower bound

namespace {

Matrix polar_unitary(const Matrix& k) {
  const Svd s = svd(k);
  return s.left * s.right.adjoint();
}

double ascent_run(const LinearMatrixMap& m, std::uint64_t seed, int max_iter) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  std::mt19937_64 rng(seq);
  Matrix x = polar_unitary(random_matrix(rng, m.in_dim(), m.in_dim()));
  double value = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Matrix y = m.apply(x);
    const Svd s = svd(y);
    const double current = s.values(0);
    // K = sum_i B_i v u^* A_i, so that <m(X) v, u> = tr(X K).
    const Vector u = s.left.col(0);
    const Vector v = s.right.col(0);
    Matrix k = zeros(m.in_dim(), m.in_dim());
    for (const auto& p : m.pairs()) {
      k.noalias() += (p.right * v) * (u.adjoint() * p.left);
    }
    const Svd ks = svd(k);
    if (ks.values.size() == 0 || ks.values(0) == 0.0) {
      value = std::max(value, current);
      break;
    }
    // argmax over the unit ball of |tr(X K)| for K = U S V^*: X = V U^*.
    x = ks.right * ks.left.adjoint();
    const bool converged = current - value <= 1e-15 * std::max(1.0, current);
    value = std::max(value, current);
    if (converged && it > 2) break;
  }
  // Certify at the final iterate.
  const double xn = operator_norm(x);
  const double at_x = xn > 0.0 ? operator_norm(m.apply(x)) / xn : 0.0;
  return std::max(at_x, 0.0);
}

}  // namespace

double norm_lower(const LinearMatrixMap& m, const AscentOptions& options) {
  if (m.in_dim() == 0 || m.out_dim() == 0 || m.pairs().empty()) return 0.0;
  const int restarts = std::max(1, options.restarts);
  std::vector<double> best(static_cast<std::size_t>(restarts), 0.0);
  auto run = [&](int r) {
    best[static_cast<std::size_t>(r)] = ascent_run(
        m, options.seed * 1000003ULL + static_cast<std::uint64_t>(r),
        options.max_iter);
  };
  const unsigned threads =
      std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(restarts));
  if (threads == 1) {
    for (int r = 0; r < restarts; ++r) run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < restarts; r = next++) run(r);
      });
    }
    for (auto& th : pool) th.join();
  }
  return *std::max_element(best.begin(), best.end());
}

// ---------------------------------------------------------------------------
// cb norm SDPs

namespace {

using sdp::Constraint;
using sdp::SparseHermitian;

// Adds coefficient matrix m (dense, Hermitian) at offset within block blk.
void add_dense(SparseHermitian& s, const Matrix& m, int offset = 0) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        s.add_hermitian(offset + static_cast<int>(i), offset + static_cast<int>(j),
                        i == j ? m(i, j) : 0.5 * m(i, j));
      }
    }
  }
}

}  // namespace

CbNormResult cb_norm_result(const LinearMatrixMap& m, double tol) {
  CbNormResult out;
  if (m.in_dim() == 0 || m.out_dim() == 0) return out;
  const LinearMatrixMap mm = m.minimal();
  if (mm.pairs().empty()) return out;

  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (const auto& p : mm.pairs()) {
    a.push_back(p.left);
    b.push_back(p.right);
  }
  // Rescale so that the identity weight gives value 1.
  Matrix ga = zeros(m.out_dim(), m.out_dim());
  Matrix gb = zeros(m.out_dim(), m.out_dim());
  for (std::size_t k = 0; k < a.size(); ++k) {
    ga += a[k] * a[k].adjoint();
    gb += b[k].adjoint() * b[k];
  }
  const double na = operator_norm(ga);
  const double nb = operator_norm(gb);
  const double scale = std::sqrt(na * nb);
  for (auto& ak : a) ak /= std::sqrt(na);
  for (auto& bk : b) bk /= std::sqrt(nb);

  const auto r = static_cast<int>(a.size());
  const auto dp = static_cast<int>(m.out_dim());
  const auto d = static_cast<int>(m.in_dim());
  const std::size_t n0 = m.out_dim();
  const std::size_t n1 = m.out_dim() + static_cast<std::size_t>(r * d);

  SparseHermitian c0(n0);
  SparseHermitian c1(n1);
  for (int k = 0; k < r; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int s = 0; s < dp; ++s) {
        const Complex v = b[static_cast<std::size_t>(k)](i, s);
        if (v != 0.0) c1.add_hermitian(dp + k * d + i, s, v);
      }
    }
  }

  std::vector<Constraint> cons;
  {
    Constraint t;
    t.rhs = -1.0;
    SparseHermitian t0(n0);
    SparseHermitian t1(n1);
    for (int s = 0; s < dp; ++s) {
      t0.add_hermitian(s, s, -1.0);
      t1.add_hermitian(s, s, -1.0);
    }
    t.blocks = {{0, t0}, {1, t1}};
    cons.push_back(std::move(t));
  }
  auto weight_constraint = [&](int k, int l, Complex phase) {
    // Coefficient of a real parameter entering P_kl = phase, P_lk = conj(phase).
    Constraint c;
    c.rhs = 0.0;
    const auto ku = static_cast<std::size_t>(k);
    const auto lu = static_cast<std::size_t>(l);
    Matrix top = phase * a[ku] * a[lu].adjoint();
    if (k != l) top += std::conj(phase) * a[lu] * a[ku].adjoint();
    SparseHermitian s0(n0);
    add_dense(s0, 0.5 * (top + top.adjoint()));
    SparseHermitian s1(n1);
    for (int i = 0; i < d; ++i) {
      if (k == l) {
        s1.add_hermitian(dp + k * d + i, dp + k * d + i, -phase);
      } else {
        s1.add_hermitian(dp + k * d + i, dp + l * d + i, -phase);
      }
    }
    c.blocks = {{0, s0}, {1, s1}};
    cons.push_back(std::move(c));
  };
  for (int k = 0; k < r; ++k) {
    weight_constraint(k, k, 1.0);
    for (int l = k + 1; l < r; ++l) {
      weight_constraint(k, l, 1.0);
      weight_constraint(k, l, Complex(0.0, 1.0));
    }
  }

  const sdp::Problem problem({n0, n1}, {c0, c1}, std::move(cons));
  const sdp::Solution sol = sdp::solve(problem, tol);
  out.status = sol.status;
  out.iterations = sol.iterations;
  // The dual objective is -t; report the midpoint of the certified bracket.
  const double t = -0.5 * (sol.primal_objective + sol.dual_objective);
  out.value = scale * t;
  out.gap = scale * sol.gap;
  return out;
}

double cb_norm(const LinearMatrixMap& m, double tol) {
  const CbNormResult r = cb_norm_result(m, tol);
  if (r.status != sdp::Status::Optimal) {
    throw SolverFailure("solver failure: " + sdp::to_string(r.status), r.status);
  }
  return r.value;
}

CbNormResult cb_norm_watrous(const LinearMatrixMap& m, double tol) {
  CbNormResult out;
  if (m.in_dim() == 0 || m.out_dim() == 0) return out;
  const LinearMatrixMap psi = m.dual();
  const std::size_t din = psi.in_dim();
  const std::size_t dout = psi.out_dim();
  const Matrix& j = psi.choi();
  const double jn = operator_norm(j);
  if (jn == 0.0) return out;
  const Matrix jj = j / jn;

  const auto dd = static_cast<int>(din * dout);
  const std::size_t n = 2 * din * dout;
  const auto di = static_cast<int>(din);
  const auto dO = static_cast<int>(dout);

  SparseHermitian c(n);
  for (int p = 0; p < 2 * dd; ++p) c.add_hermitian(p, p, 1.0 / static_cast<double>(din));

  std::vector<Constraint> cons;
  // rho_s = I / din + traceless part, entering the top-left (s = 0) or
  // bottom-right (s = 1) block as rho_s (x) I_out.
  auto rho_term = [&](int s, int k, int l, Complex phase) {
    Constraint con;
    con.rhs = 0.0;
    SparseHermitian a(n);
    const int off = s * dd;
    for (int q = 0; q < dO; ++q) {
      if (k == l) {
        a.add_hermitian(off + k * dO + q, off + k * dO + q, -1.0);
        a.add_hermitian(off + (di - 1) * dO + q, off + (di - 1) * dO + q, 1.0);
      } else {
        a.add_hermitian(off + k * dO + q, off + l * dO + q, -phase);
      }
    }
    con.blocks = {{0, a}};
    cons.push_back(std::move(con));
  };
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < di; ++k) {
      if (k < di - 1) rho_term(s, k, k, 1.0);
      for (int l = k + 1; l < di; ++l) {
        rho_term(s, k, l, 1.0);
        rho_term(s, k, l, Complex(0.0, 1.0));
      }
    }
  }
  for (int p = 0; p < dd; ++p) {
    for (int q = 0; q < dd; ++q) {
      for (int part = 0; part < 2; ++part) {
        const Complex phase = part == 0 ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
        Constraint con;
        con.rhs = part == 0 ? jj(p, q).real() : jj(p, q).imag();
        SparseHermitian a(n);
        a.add_hermitian(p, dd + q, -phase);
        con.blocks = {{0, a}};
        cons.push_back(std::move(con));
      }
    }
  }
  const sdp::Problem problem({n}, {c}, std::move(cons));
  const sdp::Solution sol = sdp::solve(problem, tol);
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.value = jn * 0.5 * (sol.primal_objective + sol.dual_objective);
  out.gap = jn * sol.gap;
  return out;
}

double cb_norm_via_amplification(const LinearMatrixMap& m,
                                 const AscentOptions& options) {
  if (m.out_dim() == 0) return 0.0;
  return norm_lower(m.amplify(m.out_dim()), options);
}

DimBoundReport dim_bound_check(const LinearMatrixMap& m, double tol,
                               const AscentOptions& options, double slack) {
  DimBoundReport rep;
  rep.norm_lb = norm_lower(m, options);
  rep.cb = cb_norm(m, tol);
  rep.bound = m.out_dim();
  rep.slack = slack;
  rep.ratio = rep.norm_lb > 0.0 ? rep.cb / rep.norm_lb : 0.0;
  rep.holds = rep.cb <= static_cast<double>(rep.bound) * rep.norm_lb * (1.0 + slack) +
                           tol;
  rep.saturation_gap =
      rep.bound > 0
          ? std::abs(rep.ratio - static_cast<double>(rep.bound)) /
                static_cast<double>(rep.bound)
          : 0.0;
  return rep;
}

}  // namespace opspace
