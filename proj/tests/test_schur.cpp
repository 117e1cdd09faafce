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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace opspace;

namespace {

Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix ones(std::size_t n) {
  return Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), 1.0);
}

SchurSymbol random_symbol(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::vector<LinearMatrixMap> entries;
  for (std::size_t k = 0; k < n * n; ++k) {
    entries.push_back(LinearMatrixMap::two_sided(random_matrix(rng, d, d),
                                                 random_matrix(rng, d, d)));
  }
  return SchurSymbol(n, d, std::move(entries));
}

DiagonalRepresentation random_representation(std::mt19937_64& rng, std::size_t n,
                                             std::size_t d, std::size_t r) {
  std::vector<std::vector<Matrix>> a(r);
  std::vector<std::vector<Matrix>> b(r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      a[i].push_back(random_matrix(rng, d, d));
      b[i].push_back(random_matrix(rng, d, d));
    }
  }
  return DiagonalRepresentation(n, d, std::move(a), std::move(b));
}

// Block-diagonal operator with the given diagonal blocks.
BlockMatrix block_diagonal(const std::vector<Matrix>& blocks) {
  const std::size_t n = blocks.size();
  BlockMatrix out(n, n == 0 ? 0 : static_cast<std::size_t>(blocks[0].rows()));
  for (std::size_t k = 0; k < n; ++k) out.block(k, k) = blocks[k];
  return out;
}

double symbol_gap(const SchurSymbol& a, const SchurSymbol& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) {
    worst = std::max(worst, max_abs_diff(a.entries()[k].choi(), b.entries()[k].choi()));
  }
  return worst;
}

}  // namespace

TEST_CASE("apply_symbol", "[schur]") {
  const SchurSymbol phi = SchurSymbol::from_scalar(real_matrix({{1, 2}, {3, 4}}));
  const BlockMatrix t = BlockMatrix::reblock(ones(2), 2, 1);
  // out(m, n) = phi(n, m) T(m, n).
  CHECK(apply_symbol(phi, t).flatten() == real_matrix({{1, 3}, {2, 4}}));

  std::mt19937_64 rng(30);
  const BlockMatrix x = random_block_matrix(rng, 3, 2);
  CHECK(max_abs_diff(apply_symbol(SchurSymbol::all_identity(3, 2), x), x) == 0.0);

  // Against an explicit loop for operator-valued entries.
  const SchurSymbol g = random_symbol(rng, 2, 2);
  const BlockMatrix y = random_block_matrix(rng, 2, 2);
  const BlockMatrix out = apply_symbol(g, y);
  for (std::size_t m = 0; m < 2; ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const auto& p = g.entry(n, m).pairs()[0];
      CHECK(max_abs_diff(out.block(m, n), p.left * y.block(m, n) * p.right) < 1e-12);
    }
  }
  CHECK_THROWS(apply_symbol(g, random_block_matrix(rng, 3, 2)));

  // The assembled map agrees with the blockwise action.
  const LinearMatrixMap map = multiplier_map(g);
  CHECK(max_abs_diff(map.apply(y.flatten()), out.flatten()) < 1e-10);
}

TEST_CASE("scalar detection", "[schur]") {
  CHECK(SchurSymbol::all_identity(2, 3).is_scalar());
  std::mt19937_64 rng(31);
  CHECK_FALSE(random_symbol(rng, 2, 2).is_scalar());
  const SchurSymbol s = SchurSymbol::from_scalar(real_matrix({{1, -2}, {0.5, 3}}), 2);
  REQUIRE(s.is_scalar());
  CHECK(max_abs_diff(*s.scalar(), real_matrix({{1, -2}, {0.5, 3}})) < 1e-12);
  CHECK_THROWS(SchurSymbol(2, 1, {LinearMatrixMap::identity(1)}));
}

TEST_CASE("multiplier_norm examples", "[schur]") {
  for (std::size_t n : {2, 4}) {
    const MultiplierNorm all = multiplier_norm(SchurSymbol::from_scalar(ones(n)));
    CHECK(std::abs(all.cb - 1.0) < 1e-6);
    CHECK(all.consistent);
  }

  // Rank one u v^T: max |u| max |v|.
  const Matrix u = real_matrix({{1.0}, {-3.0}, {0.5}});
  const Matrix v = real_matrix({{2.0}, {0.25}, {-1.0}});
  const MultiplierNorm r1 = multiplier_norm(SchurSymbol::from_scalar(u * v.transpose()));
  CHECK(std::abs(r1.cb - 6.0) < 1e-6 * 6.0);
  REQUIRE(r1.scalar_cb);
  CHECK(std::abs(*r1.scalar_cb - 6.0) < 1e-6 * 6.0);

  const MultiplierNorm h = multiplier_norm(SchurSymbol::from_scalar(real_matrix({{1, 1}, {1, -1}})));
  CHECK(std::abs(h.cb - std::sqrt(2.0)) < 1e-6);
  CHECK(std::abs(h.norm_lb - std::sqrt(2.0)) < 1e-6);

  CHECK(multiplier_norm(SchurSymbol(0, 1, {})).cb == 0.0);
}

TEST_CASE("multiplier_norm routes agree", "[schur]") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix phi = random_matrix(rng, 3, 3);
    const MultiplierNorm r = multiplier_norm(SchurSymbol::from_scalar(phi));
    REQUIRE(r.scalar_cb);
    CHECK(std::abs(r.cb - *r.scalar_cb) < 1e-6 * (1.0 + r.cb));
    CHECK(r.norm_lb <= r.cb + 1e-8 * (1.0 + r.cb));
    // Entries are compressions of the multiplier.
    CHECK(r.cb >= phi.cwiseAbs().maxCoeff() - 1e-8);
  }
  for (int trial = 0; trial < 3; ++trial) {
    const MultiplierNorm r = multiplier_norm(random_symbol(rng, 2, 2));
    CHECK(r.consistent);
    CHECK_FALSE(r.scalar_cb);
  }
}

TEST_CASE("scalar_factorization", "[schur]") {
  const ScalarFactorization f = scalar_factorization(SchurSymbol::from_scalar(ones(3)));
  CHECK(std::abs(f.value - 1.0) < 1e-6);
  CHECK(f.residual < 1e-6);

  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix phi = random_matrix(rng, 3, 3);
    const ScalarFactorization g = scalar_factorization(SchurSymbol::from_scalar(phi));
    const double cb = scalar_multiplier_program(phi).value;
    CHECK(g.residual < 1e-6 * (1.0 + cb));
    CHECK(std::abs(g.value - cb) < 1e-5 * (1.0 + cb));
    // Recompute the witnessed product directly.
    double ymax = 0.0;
    double xmax = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      ymax = std::max(ymax, g.y[i].norm());
      xmax = std::max(xmax, g.x[i].norm());
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(inner(g.x[j], g.y[i]) -
                       phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <
              1e-6 * (1.0 + cb));
      }
    }
    CHECK(std::abs(ymax * xmax - g.value) < 1e-12 * (1.0 + cb));
  }
  CHECK_THROWS_WITH(scalar_factorization(random_symbol(rng, 2, 2)), "scalar only");
}

TEST_CASE("diagonal_expectation", "[schur]") {
  std::mt19937_64 rng(34);
  const BlockMatrix s = random_block_matrix(rng, 3, 2);
  const auto e = diagonal_expectation(s);
  REQUIRE(e.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(e[k] == s.block(k, k));
  const auto e1 = diagonal_expectation_n(s, 1);
  CHECK(e1[0] == s.block(0, 0));
  CHECK(e1[1] == zeros(2, 2));
  CHECK(e1[2] == zeros(2, 2));
  // The expectation is contractive.
  CHECK(operator_norm(block_diagonal(e).flatten()) <= operator_norm(s.flatten()) + 1e-12);
}

TEST_CASE("two_sided_map", "[schur]") {
  std::mt19937_64 rng(35);
  const BlockMatrix r = random_block_matrix(rng, 2, 2);
  const BlockMatrix s = random_block_matrix(rng, 2, 2);
  const BlockMatrix t = random_block_matrix(rng, 2, 2);
  const BlockMap psi = two_sided_map({r}, {s});
  CHECK(max_abs_diff(psi(t).flatten(), r.flatten() * t.flatten() * s.flatten()) < 1e-12);
  CHECK(max_abs_diff(two_sided_map({}, {})(t), BlockMatrix(2, 2)) == 0.0);
  CHECK_THROWS(two_sided_map({r}, {}));
}

TEST_CASE("schur_compression", "[schur]") {
  std::mt19937_64 rng(36);
  // Compressing a Schur multiplier recovers its symbol.
  const SchurSymbol g = random_symbol(rng, 3, 2);
  const BlockMap as_map = [&](const BlockMatrix& t) { return apply_symbol(g, t); };
  CHECK(symbol_gap(schur_compression(as_map, 3, 2), g) < 1e-12);

  // Diagonal R, S compress to the representation symbol.
  const DiagonalRepresentation rep = random_representation(rng, 3, 2, 2);
  std::vector<BlockMatrix> r;
  std::vector<BlockMatrix> s;
  for (std::size_t i = 0; i < 2; ++i) {
    r.push_back(block_diagonal(rep.a()[i]));
    s.push_back(block_diagonal(rep.b()[i]));
  }
  CHECK(symbol_gap(schur_compression(two_sided_map(r, s), 3, 2),
                   representation_to_symbol(rep)) < 1e-12);
}

TEST_CASE("diagonal_compression_identity_check", "[schur]") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<BlockMatrix> r;
    std::vector<BlockMatrix> s;
    for (int i = 0; i < 2; ++i) {
      r.push_back(random_block_matrix(rng, 3, 2));
      s.push_back(random_block_matrix(rng, 3, 2));
    }
    const CompressionReport rep = diagonal_compression_identity_check(r, s, 4, 99);
    CHECK(rep.residual < 1e-10);
    CHECK(rep.trials == 4);
  }
  const CompressionReport empty = diagonal_compression_identity_check({}, {});
  CHECK(empty.residual == 0.0);
}

TEST_CASE("representations", "[schur]") {
  std::mt19937_64 rng(38);
  const DiagonalRepresentation rep = random_representation(rng, 3, 2, 2);
  const SchurSymbol phi = representation_to_symbol(rep);
  // entry(m, n)(x) = sum_i a_n^i x b_m^i.
  const Matrix x = random_matrix(rng, 2, 2);
  for (std::size_t m = 0; m < 3; ++m) {
    for (std::size_t n = 0; n < 3; ++n) {
      Matrix expect = zeros(2, 2);
      for (std::size_t i = 0; i < 2; ++i) expect += rep.a()[i][n] * x * rep.b()[i][m];
      CHECK(max_abs_diff(phi.entry(m, n).apply(x), expect) < 1e-12);
    }
  }

  const DecayReport decay = representation_decay_report(rep);
  REQUIRE(decay.row.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    Matrix ga = zeros(2, 2);
    Matrix gb = zeros(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
      ga += rep.a()[i][k] * rep.a()[i][k].adjoint();
      gb += rep.b()[i][k].adjoint() * rep.b()[i][k];
    }
    CHECK(std::abs(decay.row[k] - operator_norm(ga)) < 1e-12);
    CHECK(std::abs(decay.col[k] - operator_norm(gb)) < 1e-12);
  }

  // The representation witnesses an upper bound on the cb norm.
  for (int trial = 0; trial < 4; ++trial) {
    const DiagonalRepresentation r = random_representation(rng, 2 + trial % 2, 2, 1 + trial % 3);
    const MultiplierNorm mn = multiplier_norm(representation_to_symbol(r));
    CHECK(mn.cb <= representation_bound(r) + 1e-8 * (1.0 + mn.cb));
  }

  const DiagonalRepresentation none(2, 2, {}, {});
  CHECK(representation_bound(none) == 0.0);
  CHECK(max_abs_diff(representation_to_symbol(none).entry(1, 0).choi(), zeros(4, 4)) == 0.0);
  CHECK_THROWS(DiagonalRepresentation(2, 2, {{identity(2)}}, {{identity(2)}}));
}

TEST_CASE("tails", "[schur]") {
  const std::size_t n = 5;
  std::vector<Complex> d;
  for (std::size_t k = 0; k < n; ++k) d.emplace_back(1.0 / double(k + 1));
  const SchurSymbol diag = SchurSymbol::from_scalar(diagonal(d));
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(std::abs(tail_multiplier_norm(diag, k) - 1.0 / double(k + 1)) < 1e-6);
  }
  CHECK(tail_multiplier_norm(diag, n) == 0.0);
  CHECK_THROWS(tail_symbol(diag, n + 1));

  const SchurSymbol all = SchurSymbol::from_scalar(ones(4));
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(tail_multiplier_norm(all, k) - 1.0) < 1e-6);
  }

  const SchurSymbol t = tail_symbol(all, 2);
  CHECK(max_abs_diff(*t.scalar(),
                     real_matrix({{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}})) ==
        0.0);

  // Tails of a generic symbol never grow.
  std::mt19937_64 rng(39);
  const SchurSymbol g = random_symbol(rng, 3, 2);
  double previous = multiplier_norm(g).cb;
  CHECK(std::abs(tail_multiplier_norm(g, 0) - previous) < 1e-7 * (1.0 + previous));
  for (std::size_t k = 1; k <= 3; ++k) {
    const double next = tail_multiplier_norm(g, k);
    CHECK(next <= previous + 1e-8 * (1.0 + previous));
    previous = next;
  }
}

TEST_CASE("counterexample_report", "[schur]") {
  const auto rows = counterexample_report(4, [](std::size_t) { return 1.0; });
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(std::abs(row.block_norm - 1.0) < 1e-6);
    CHECK(std::abs(row.block_cb - double(row.k)) < 1e-5 * double(row.k));
  }

  const auto decay = counterexample_report(
      4, [](std::size_t k) { return 1.0 / double(k * k); });
  for (const auto& row : decay) {
    CHECK(std::abs(row.block_cb - 1.0 / double(row.k)) < 1e-6);
    CHECK(std::abs(row.block_norm - row.weight) < 1e-6 * row.weight);
  }
  CHECK_THROWS(counterexample_report(0, [](std::size_t) { return 1.0; }));
  CHECK_THROWS(counterexample_report(2, [](std::size_t) { return -1.0; }));
}

TEST_CASE("kernel_bound_check", "[schur]") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 4; ++trial) {
    const BlockMatrix k = random_block_matrix(rng, 3, 2);
    const KernelBoundReport scalar =
        kernel_bound_check(k, SchurSymbol::from_scalar(random_matrix(rng, 3, 3), 2));
    CHECK(scalar.holds);
    CHECK(scalar.operator_margin >= 0.0);
    CHECK(scalar.multiplier_margin >= -1e-10);

    const KernelBoundReport generic = kernel_bound_check(k, random_symbol(rng, 3, 2));
    CHECK(generic.holds);
  }

  // Identity symbol: image equals kernel, margin is exactly zero.
  const BlockMatrix k = random_block_matrix(rng, 2, 2);
  const KernelBoundReport id = kernel_bound_check(k, SchurSymbol::all_identity(2, 2));
  CHECK(std::abs(id.multiplier_margin) < 1e-12);
  CHECK(id.symbol_sup == 1.0);

  const KernelBoundReport empty = kernel_bound_check(BlockMatrix(0, 1), SchurSymbol(0, 1, {}));
  CHECK(empty.holds);
}
