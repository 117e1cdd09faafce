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

#include "opspace/acceptance.hpp"

#include "opspace/cbmaps.hpp"
#include "opspace/haagerup.hpp"
#include "opspace/schur.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace opspace::acceptance {

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

CriterionResult finish(CriterionResult r, bool ok, const Timer& timer) {
  r.seconds = timer.seconds();
  r.passed = ok && r.seconds < r.limit_seconds;
  return r;
}

std::vector<BlockMatrix> random_blocks(std::mt19937_64& rng, std::size_t count,
                                       std::size_t n, std::size_t d) {
  std::vector<BlockMatrix> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_block_matrix(rng, n, d));
  return out;
}

SchurSymbol random_symbol(std::mt19937_64& rng, std::size_t n, std::size_t d,
                          std::size_t pairs) {
  std::vector<LinearMatrixMap> entries;
  for (std::size_t k = 0; k < n * n; ++k) {
    std::vector<MapPair> ps;
    for (std::size_t i = 0; i < pairs; ++i) {
      ps.push_back({random_matrix(rng, d, d), random_matrix(rng, d, d)});
    }
    entries.push_back(LinearMatrixMap::from_pairs(d, d, std::move(ps)));
  }
  return SchurSymbol(n, d, std::move(entries));
}

// sum_{ij} E_ij (x) E_ij on M_n.
HaagerupTensor transpose_tensor(std::size_t n) {
  std::vector<Matrix> rows;
  std::vector<Matrix> cols;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      rows.push_back(matrix_unit(n, n, i, j));
      cols.push_back(matrix_unit(n, n, i, j));
    }
  }
  return HaagerupTensor(n, std::move(rows), std::move(cols));
}

Matrix block_diagonal(const std::vector<Matrix>& blocks, std::size_t d) {
  BlockMatrix b(blocks.size(), d);
  for (std::size_t k = 0; k < blocks.size(); ++k) b.block(k, k) = blocks[k];
  return b.flatten();
}

}  // namespace

CriterionResult transpose_dichotomy() {
  CriterionResult r{1, "transpose dichotomy", false, "", 0.0, 120.0};
  const Timer timer;
  double cb_err = 0.0;
  double norm_err = 0.0;
  for (std::size_t n = 2; n <= 5; ++n) {
    const LinearMatrixMap t = LinearMatrixMap::transpose(n);
    cb_err = std::max(cb_err, std::abs(cb_norm(t) - static_cast<double>(n)));
    norm_err = std::max(norm_err, std::abs(norm_lower(t) - 1.0));
  }
  double row_cb_err = 0.0;
  double row_norm_err = 0.0;
  for (const auto& row :
       counterexample_report(4, [](std::size_t k) { return 1.0 / static_cast<double>(k); })) {
    row_cb_err = std::max(row_cb_err, std::abs(row.block_cb - 1.0));
    row_norm_err = std::max(row_norm_err,
                            std::abs(row.block_norm - 1.0 / static_cast<double>(row.k)));
  }
  r.detail = fmt("|cb-n| %.2e <= 1e-5, |norm-1| %.2e <= 1e-6, ", cb_err, norm_err) +
             fmt("K=4 |blockCb-1| %.2e <= 1e-4, |blockNorm-1/k| %.2e <= 1e-6", row_cb_err,
                 row_norm_err);
  return finish(r, cb_err <= 1e-5 && norm_err <= 1e-6 && row_cb_err <= 1e-4 &&
                       row_norm_err <= 1e-6,
                timer);
}

CriterionResult haagerup_identification() {
  CriterionResult r{2, "haagerup/cb identification", false, "", 0.0, 180.0};
  const Timer timer;
  double id_err = 0.0;
  for (std::size_t n = 2; n <= 3; ++n) {
    id_err = std::max(id_err,
                      std::abs(haagerup_norm_sdp(transpose_tensor(n)) - static_cast<double>(n)));
  }
  std::mt19937_64 rng(2);
  double route_gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = pick(rng, 1, 3);
    const std::size_t len = pick(rng, 1, 4);
    std::vector<Matrix> a;
    std::vector<Matrix> b;
    for (std::size_t k = 0; k < len; ++k) {
      a.push_back(random_matrix(rng, d, d));
      b.push_back(random_matrix(rng, d, d));
    }
    const HaagerupTensor v(d, std::move(a), std::move(b));
    route_gap = std::max(route_gap, std::abs(haagerup_norm_sdp(v) -
                                             haagerup_norm_factorized(v).value));
  }
  r.detail = fmt("|h(sum E_ij (x) E_ij) - n| %.2e <= 1e-5, max |sdp - factorized| %.2e <= 1e-4 "
                 "over 20 tensors",
                 id_err, route_gap);
  return finish(r, id_err <= 1e-5 && route_gap <= 1e-4, timer);
}

CriterionResult bimodule_norm_equality() {
  CriterionResult r{3, "bimodule norm equality", false, "", 0.0, 120.0};
  const Timer timer;
  std::mt19937_64 rng(3);
  double gap = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = pick(rng, 2, 8);
    const MultiplierNorm mn = multiplier_norm(SchurSymbol::from_scalar(random_matrix(rng, n, n)));
    gap = std::max(gap, std::abs(mn.cb - mn.norm_lb));
  }
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  const double had = multiplier_norm(SchurSymbol::from_scalar(h)).cb;
  const double had_err = std::abs(had - std::sqrt(2.0));
  r.detail = fmt("max |cb - norm_lb| %.2e <= 1e-3 over 20 scalar symbols, "
                 "|hadamard - sqrt 2| %.2e <= 1e-6",
                 gap, had_err);
  return finish(r, gap <= 1e-3 && had_err <= 1e-6, timer);
}

CriterionResult diagonal_compression() {
  CriterionResult r{4, "diagonal-compression identity", false, "", 0.0, 30.0};
  const Timer timer;
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = pick(rng, 1, 5);
    const std::size_t d = pick(rng, 1, 3);
    const std::size_t pairs = pick(rng, 1, 4);
    const auto rs = random_blocks(rng, pairs, n, d);
    const auto ss = random_blocks(rng, pairs, n, d);
    worst = std::max(worst, diagonal_compression_identity_check(rs, ss, 2, rng()).residual);
  }
  r.detail = fmt("max residual %.2e < 1e-12 over 50 instances", worst);
  return finish(r, worst < 1e-12, timer);
}

CriterionResult kernel_bounds() {
  CriterionResult r{5, "kernel bounds", false, "", 0.0, 30.0};
  const Timer timer;
  std::mt19937_64 rng(5);
  double worst_op = std::numeric_limits<double>::infinity();
  double worst_mult = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = pick(rng, 1, 4);
    const std::size_t d = trial % 2 == 0 ? pick(rng, 1, 3) : pick(rng, 1, 2);
    const SchurSymbol phi = trial % 2 == 0
                                ? SchurSymbol::from_scalar(random_matrix(rng, n, n), d)
                                : random_symbol(rng, n, d, pick(rng, 1, 2));
    const KernelBoundReport rep = kernel_bound_check(random_block_matrix(rng, n, d), phi);
    worst_op = std::min(worst_op, rep.operator_margin);
    worst_mult = std::min(worst_mult, rep.multiplier_margin);
  }
  r.detail = fmt("min margins %.2e, %.2e >= -1e-10 over 100 instances", worst_op, worst_mult);
  return finish(r, worst_op >= -1e-10 && worst_mult >= -1e-10, timer);
}

CriterionResult dimension_bound() {
  CriterionResult r{6, "dimension bound", false, "", 0.0, 120.0};
  const Timer timer;
  std::mt19937_64 rng(6);
  bool holds = true;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t in = pick(rng, 1, 4);
    const std::size_t out = pick(rng, 1, 4);
    std::vector<MapPair> ps;
    for (std::size_t k = 0, len = pick(rng, 1, 4); k < len; ++k) {
      ps.push_back({random_matrix(rng, out, in), random_matrix(rng, in, out)});
    }
    const DimBoundReport rep =
        dim_bound_check(LinearMatrixMap::from_pairs(in, out, std::move(ps)));
    holds = holds && rep.holds;
    worst_ratio = std::max(worst_ratio, rep.ratio / static_cast<double>(rep.bound));
  }
  double saturation = 0.0;
  for (std::size_t d = 2; d <= 4; ++d) {
    const DimBoundReport rep = dim_bound_check(LinearMatrixMap::transpose(d));
    holds = holds && rep.holds;
    saturation = std::max(saturation, std::abs(rep.ratio - static_cast<double>(d)));
  }
  r.detail = std::string("cb <= d' norm_lb (1+1e-3) on 20 maps and transposes: ") +
             (holds ? "yes" : "no") +
             fmt(" (max ratio/d' %.3f), transpose |ratio - d| %.2e <= 1e-4", worst_ratio,
                 saturation);
  return finish(r, holds && saturation <= 1e-4, timer);
}

CriterionResult tail_diagnostics() {
  CriterionResult r{7, "tail diagnostics", false, "", 0.0, 120.0};
  const Timer timer;
  const std::size_t n = 8;
  Matrix diag = zeros(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    diag(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        1.0 / static_cast<double>(k + 1);
  }
  const SchurSymbol diag_symbol = SchurSymbol::from_scalar(diag);
  const SchurSymbol ones = SchurSymbol::from_scalar(Matrix::Ones(n, n));
  double diag_err = 0.0;
  double ones_err = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    diag_err = std::max(diag_err, std::abs(tail_multiplier_norm(diag_symbol, t) -
                                           1.0 / static_cast<double>(t + 1)));
    ones_err = std::max(ones_err, std::abs(tail_multiplier_norm(ones, t) - 1.0));
  }
  const double at_end = std::max(tail_multiplier_norm(diag_symbol, n),
                                 tail_multiplier_norm(ones, n));
  r.detail = fmt("N=8: |tail - 1/(n+1)| %.2e <= 1e-6, |ones tail - 1| %.2e <= 1e-6, "
                 "tail(N) = %.1f",
                 diag_err, ones_err, at_end);
  return finish(r, diag_err <= 1e-6 && ones_err <= 1e-6 && at_end == 0.0, timer);
}

CriterionResult round_trips() {
  CriterionResult r{8, "round trips", false, "", 0.0, 120.0};
  const Timer timer;
  std::mt19937_64 rng(8);
  double compression = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = pick(rng, 1, 4);
    const std::size_t d = pick(rng, 1, 3);
    const SchurSymbol phi = random_symbol(rng, n, d, pick(rng, 1, 3));
    const SchurSymbol back = schur_compression(
        [&phi](const BlockMatrix& t) { return apply_symbol(phi, t); }, n, d);
    for (std::size_t k = 0; k < n * n; ++k) {
      compression = std::max(compression,
                             max_abs_diff(phi.entries()[k].choi(), back.entries()[k].choi()));
    }
  }
  double double_sum = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = pick(rng, 1, 5);
    const std::size_t d = pick(rng, 1, 3);
    const std::size_t len = pick(rng, 1, 4);
    std::vector<std::vector<Matrix>> a(len);
    std::vector<std::vector<Matrix>> b(len);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        a[i].push_back(random_matrix(rng, d, d));
        b[i].push_back(random_matrix(rng, d, d));
      }
    }
    const BlockMatrix t = random_block_matrix(rng, n, d);
    const BlockMatrix via_symbol =
        apply_symbol(representation_to_symbol(DiagonalRepresentation(n, d, a, b)), t);
    // Direct sum_i D(a^i) T D(b^i) with D the block-diagonal operator.
    Matrix direct = zeros(n * d, n * d);
    for (std::size_t i = 0; i < len; ++i) {
      direct += block_diagonal(a[i], d) * t.flatten() * block_diagonal(b[i], d);
    }
    double_sum = std::max(double_sum, max_abs_diff(via_symbol.flatten(), direct));
  }
  r.detail = fmt("compression round trip %.2e < 1e-12, representation double sum %.2e < "
                 "1e-12 (50 instances each)",
                 compression, double_sum);
  return finish(r, compression < 1e-12 && double_sum < 1e-12, timer);
}

std::vector<CriterionResult> run_all() {
  return {transpose_dichotomy(), haagerup_identification(), bimodule_norm_equality(),
          diagonal_compression(), kernel_bounds(),          dimension_bound(),
          tail_diagnostics(),     round_trips()};
}

std::string format(const CriterionResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " +
         r.name + ": " + r.detail + fmt(" (%.1f s / %.0f s)", r.seconds, r.limit_seconds);
}

}  // namespace opspace::acceptance
