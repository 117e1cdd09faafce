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

#include "opspace/haagerup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace opspace {

HaagerupTensor::HaagerupTensor(std::size_t dim, std::vector<Matrix> rows,
                               std::vector<Matrix> cols)
    : dim_(dim), rows_(std::move(rows)), cols_(std::move(cols)) {
  if (rows_.size() != cols_.size()) {
    throw std::invalid_argument("HaagerupTensor: rows and cols differ in length");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    if (rows_[k].rows() != d || rows_[k].cols() != d || cols_[k].rows() != d ||
        cols_[k].cols() != d) {
      throw std::invalid_argument("HaagerupTensor: every matrix must be d x d");
    }
    if (!all_finite(rows_[k]) || !all_finite(cols_[k])) {
      throw std::invalid_argument("HaagerupTensor: non-finite entries");
    }
  }
}

LinearMatrixMap elementary_operator(const HaagerupTensor& v) {
  std::vector<MapPair> pairs;
  pairs.reserve(v.length());
  for (std::size_t k = 0; k < v.length(); ++k) {
    pairs.push_back({v.cols()[k], v.rows()[k]});
  }
  return LinearMatrixMap::from_pairs(v.dim(), v.dim(), std::move(pairs));
}

double row_norm(const HaagerupTensor& v) {
  if (v.length() == 0 || v.dim() == 0) return 0.0;
  Matrix g = zeros(v.dim(), v.dim());
  for (const auto& a : v.rows()) g.noalias() += a.adjoint() * a;
  return std::sqrt(operator_norm(g));
}

double col_norm(const HaagerupTensor& v) {
  if (v.length() == 0 || v.dim() == 0) return 0.0;
  Matrix g = zeros(v.dim(), v.dim());
  for (const auto& b : v.cols()) g.noalias() += b * b.adjoint();
  return std::sqrt(operator_norm(g));
}

HaagerupTensor minimal_length(const HaagerupTensor& v) {
  const std::size_t d = v.dim();
  const auto dd = static_cast<Eigen::Index>(d * d);
  if (v.length() == 0 || d == 0) return HaagerupTensor(d, {}, {});
  Matrix m = zeros(d * d, d * d);
  for (std::size_t k = 0; k < v.length(); ++k) {
    const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, 1>> a(
        v.rows()[k].data(), dd);
    const Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, 1>> b(
        v.cols()[k].data(), dd);
    m.noalias() += a * b.transpose();
  }
  const Svd s = svd(m);
  std::vector<Matrix> rows;
  std::vector<Matrix> cols;
  if (s.values.size() == 0 || s.values(0) == 0.0) return HaagerupTensor(d, {}, {});
  const double cutoff = 1e-12 * s.values(0);
  for (Eigen::Index k = 0; k < s.values.size() && s.values(k) > cutoff; ++k) {
    const double root = std::sqrt(s.values(k));
    Matrix a(d, d);
    Matrix b(d, d);
    for (Eigen::Index p = 0; p < dd; ++p) {
      a.data()[p] = root * s.left(p, k);
      b.data()[p] = root * std::conj(s.right(p, k));
    }
    rows.push_back(std::move(a));
    cols.push_back(std::move(b));
  }
  return HaagerupTensor(d, std::move(rows), std::move(cols));
}

double haagerup_norm_sdp(const HaagerupTensor& v, double tol) {
  return cb_norm(elementary_operator(v), tol);
}

// ---------------------------------------------------------------------------
// Factorization route

namespace {

using Dense = Eigen::MatrixXcd;

struct Smoothed {
  double value;
  Matrix weight;  // gradient of the smoothed lambda_max in H
};

// tau * log sum exp(lambda_i / tau), written around lambda_max.
Smoothed smoothed_lambda_max(const Matrix& h, double tau) {
  const HermitianEigen e = hermitian_eigen(h);
  const Eigen::Index n = e.values.size();
  const double top = e.values(n - 1);
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = std::exp((e.values(i) - top) / tau);
  const double sum = w.sum();
  w /= sum;
  Matrix g = zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w(i) > 1e-300) g.noalias() += w(i) * e.vectors.col(i) * e.vectors.col(i).adjoint();
  }
  return {top + tau * std::log(sum), g};
}

class Objective {
 public:
  Objective(std::vector<Matrix> a, std::vector<Matrix> b, std::size_t d)
      : a_(std::move(a)), b_(std::move(b)), d_(d),
        r_(static_cast<Eigen::Index>(a_.size())) {}

  Eigen::Index size() const { return 2 * r_ * r_; }

  Dense generator(const RealVector& x) const {
    Dense g(r_, r_);
    for (Eigen::Index i = 0; i < r_ * r_; ++i) {
      g(i / r_, i % r_) = Complex(x(i), x(r_ * r_ + i));
    }
    return g;
  }
  Dense factor(const RealVector& x) const { return generator(x).exp(); }

  void transform(const Dense& f, std::vector<Matrix>& c, std::vector<Matrix>& dd,
                 Dense& k) const {
    k = f.inverse();
    c.assign(a_.size(), zeros(d_, d_));
    dd.assign(a_.size(), zeros(d_, d_));
    for (Eigen::Index p = 0; p < r_; ++p) {
      for (Eigen::Index q = 0; q < r_; ++q) {
        c[static_cast<std::size_t>(q)] += f(p, q) * a_[static_cast<std::size_t>(p)];
        dd[static_cast<std::size_t>(p)] += k(p, q) * b_[static_cast<std::size_t>(q)];
      }
    }
  }

  /// Exact row_norm * col_norm at x.
  double exact(const RealVector& x) const {
    std::vector<Matrix> c;
    std::vector<Matrix> dd;
    Dense k;
    transform(factor(x), c, dd, k);
    const HaagerupTensor v(d_, std::move(c), std::move(dd));
    return row_norm(v) * col_norm(v);
  }

  /// 1/2 log f1 + 1/2 log f2 with smoothed lambda_max, and its gradient.
  double eval(const RealVector& x, double tau, RealVector* grad) const {
    const Dense gmat = generator(x);
    const Dense f = gmat.exp();
    if (!f.allFinite()) return std::numeric_limits<double>::infinity();
    std::vector<Matrix> c;
    std::vector<Matrix> dd;
    Dense k;
    transform(f, c, dd, k);
    if (!k.allFinite()) return std::numeric_limits<double>::infinity();

    Matrix h1 = zeros(d_, d_);
    Matrix h2 = zeros(d_, d_);
    for (Eigen::Index p = 0; p < r_; ++p) {
      const auto& cp = c[static_cast<std::size_t>(p)];
      const auto& dp = dd[static_cast<std::size_t>(p)];
      h1.noalias() += cp.adjoint() * cp;
      h2.noalias() += dp * dp.adjoint();
    }
    const Smoothed s1 = smoothed_lambda_max(h1, tau);
    const Smoothed s2 = smoothed_lambda_max(h2, tau);
    if (!(s1.value > 0.0) || !(s2.value > 0.0)) {
      return std::numeric_limits<double>::infinity();
    }
    const double value = 0.5 * std::log(s1.value) + 0.5 * std::log(s2.value);
    if (grad == nullptr) return value;

    Dense t(r_, r_);
    Dense omega(r_, r_);
    for (Eigen::Index i = 0; i < r_; ++i) {
      for (Eigen::Index j = 0; j < r_; ++j) {
        t(i, j) = (s1.weight * c[static_cast<std::size_t>(j)].adjoint() *
                   a_[static_cast<std::size_t>(i)]).trace();
        omega(i, j) = (s2.weight * b_[static_cast<std::size_t>(j)] *
                       dd[static_cast<std::size_t>(i)].adjoint()).trace();
      }
    }
    const Dense grad1 = 2.0 * t.conjugate();
    const Dense grad2 = -2.0 * (k * omega.transpose() * k).adjoint();
    const Dense grad_f = 0.5 * grad1 / s1.value + 0.5 * grad2 / s2.value;

    // Adjoint of the Frechet derivative of exp at G is the derivative at G^*,
    // read off the upper-right block of exp([G^* E; 0 G^*]).
    Dense big = Dense::Zero(2 * r_, 2 * r_);
    big.topLeftCorner(r_, r_) = gmat.adjoint();
    big.bottomRightCorner(r_, r_) = gmat.adjoint();
    big.topRightCorner(r_, r_) = grad_f;
    const Dense e = big.exp();
    const Dense grad_g = e.topRightCorner(r_, r_);
    grad->resize(size());
    for (Eigen::Index i = 0; i < r_ * r_; ++i) {
      (*grad)(i) = grad_g(i / r_, i % r_).real();
      (*grad)(r_ * r_ + i) = grad_g(i / r_, i % r_).imag();
    }
    return value;
  }

  HaagerupTensor tensor(const RealVector& x, double row_scale,
                        double col_scale) const {
    std::vector<Matrix> c;
    std::vector<Matrix> dd;
    Dense k;
    transform(factor(x), c, dd, k);
    for (auto& m : c) m *= row_scale;
    for (auto& m : dd) m *= col_scale;
    return HaagerupTensor(d_, std::move(c), std::move(dd));
  }

 private:
  std::vector<Matrix> a_;
  std::vector<Matrix> b_;
  std::size_t d_;
  Eigen::Index r_;
};

struct StageResult {
  RealVector x;
  bool capped = false;
};

// BFGS with Armijo backtracking.
StageResult bfgs(const Objective& obj, RealVector x, double tau, int iters,
                 double tol, const std::function<void(const RealVector&)>& visit) {
  const Eigen::Index n = obj.size();
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  RealVector g;
  double fx = obj.eval(x, tau, &g);
  StageResult out;
  for (int it = 0; it < iters; ++it) {
    if (g.norm() <= tol) return {x, false};
    RealVector p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    RealVector xn;
    double fn = 0.0;
    bool accepted = false;
    while (step > 1e-14) {
      xn = x + step * p;
      fn = obj.eval(xn, tau, nullptr);
      if (fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return {x, false};
    RealVector gn;
    fn = obj.eval(xn, tau, &gn);
    const RealVector s = xn - x;
    const RealVector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const RealVector hy = hinv * y;
      hinv += (rho * rho * y.dot(hy) + rho) * s * s.transpose() -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
    const double decrease = fx - fn;
    x = xn;
    g = gn;
    fx = fn;
    visit(x);
    if (decrease <= 1e-15 * std::max(1.0, std::abs(fx))) return {x, false};
  }
  out.x = x;
  out.capped = true;
  return out;
}

}  // namespace

FactorizedNorm haagerup_norm_factorized(const HaagerupTensor& v, int iters,
                                        double tol, int restarts,
                                        std::uint64_t seed) {
  if (v.length() == 0) {
    throw std::invalid_argument("haagerup_norm_factorized: empty tensor");
  }
  FactorizedNorm out;
  const HaagerupTensor m = minimal_length(v);
  if (m.length() == 0) {
    out.tensor = m;
    out.converged = true;
    return out;
  }
  const double row_scale = row_norm(m);
  const double col_scale = col_norm(m);
  std::vector<Matrix> a = m.rows();
  std::vector<Matrix> b = m.cols();
  for (auto& x : a) x /= row_scale;
  for (auto& x : b) x /= col_scale;
  const Objective obj(std::move(a), std::move(b), m.dim());

  const std::vector<double> temperatures{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x4aa6u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 0.3);

  double best = std::numeric_limits<double>::infinity();
  RealVector best_x;
  bool best_converged = false;
  for (int start = 0; start < std::max(1, restarts); ++start) {
    RealVector x = RealVector::Zero(obj.size());
    if (start > 0) {
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
    }
    double run_best = obj.exact(x);
    RealVector run_x = x;
    auto visit = [&](const RealVector& y) {
      const double e = obj.exact(y);
      if (e < run_best) {
        run_best = e;
        run_x = y;
      }
    };
    bool capped = false;
    for (const double tau : temperatures) {
      const StageResult stage = bfgs(obj, x, tau, iters, tol, visit);
      x = stage.x;
      capped = stage.capped;
    }
    if (run_best < best) {
      best = run_best;
      best_x = run_x;
      best_converged = !capped;
    }
  }
  out.tensor = obj.tensor(best_x, row_scale, col_scale);
  out.value = row_norm(out.tensor) * col_norm(out.tensor);
  out.converged = best_converged;
  return out;
}

}  // namespace opspace
