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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace opspace;

namespace {

LinearMatrixMap random_map(std::mt19937_64& rng, std::size_t in, std::size_t out,
                           std::size_t len) {
  std::vector<MapPair> pairs;
  for (std::size_t k = 0; k < len; ++k) {
    pairs.push_back({random_matrix(rng, out, in), random_matrix(rng, in, out)});
  }
  return LinearMatrixMap::from_pairs(in, out, std::move(pairs));
}

// Largest deviation between two maps over the matrix units of M_d.
double basis_gap(const LinearMatrixMap& a, const LinearMatrixMap& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.in_dim(); ++i) {
    for (std::size_t j = 0; j < a.in_dim(); ++j) {
      const Matrix e = matrix_unit(a.in_dim(), a.in_dim(), i, j);
      worst = std::max(worst, max_abs_diff(a.apply(e), b.apply(e)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("from_pairs", "[cbmaps]") {
  std::mt19937_64 rng(10);
  const Matrix x = random_matrix(rng, 3, 3);
  CHECK(max_abs_diff(LinearMatrixMap::from_pairs(3, 3, {{identity(3), identity(3)}}).apply(x),
                     x) == 0.0);

  const auto corner = LinearMatrixMap::from_pairs(
      2, 2, {{matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 0, 0)}});
  const Matrix y = random_matrix(rng, 2, 2);
  CHECK(max_abs_diff(corner.apply(y), y(0, 0) * matrix_unit(2, 2, 0, 0)) == 0.0);

  // sum_ij E_ij X E_ij = X^T, checked on every matrix unit.
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto t = LinearMatrixMap::transpose(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(max_abs_diff(t.apply(matrix_unit(n, n, i, j)), matrix_unit(n, n, j, i)) == 0.0);
      }
    }
  }
  CHECK_THROWS(LinearMatrixMap::from_pairs(2, 3, {{identity(2), identity(2)}}));
}

TEST_CASE("apply", "[cbmaps]") {
  Matrix m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  Matrix mt(2, 2);
  mt << 1.0, 3.0, 2.0, 4.0;
  CHECK(LinearMatrixMap::transpose(2).apply(m) == mt);
  CHECK(LinearMatrixMap::identity(2).apply(m) == m);

  std::mt19937_64 rng(11);
  const Matrix a = random_matrix(rng, 3, 2);
  const Matrix b = random_matrix(rng, 2, 3);
  const Matrix x = random_matrix(rng, 2, 2);
  CHECK(max_abs_diff(LinearMatrixMap::two_sided(a, b).apply(x), a * x * b) < 1e-12);
  CHECK_THROWS(LinearMatrixMap::two_sided(a, b).apply(identity(3)));
}

TEST_CASE("Choi and pair forms", "[cbmaps]") {
  std::mt19937_64 rng(12);
  const auto id = LinearMatrixMap::identity(3);
  const auto back = LinearMatrixMap::from_choi(id.choi(), 3, 3);
  const Matrix x = random_matrix(rng, 3, 3);
  CHECK(max_abs_diff(back.apply(x), x) < 1e-10);
  CHECK(back.pairs().size() == 1);

  const auto zero = LinearMatrixMap::from_choi(zeros(4, 4), 2, 2);
  CHECK(zero.pairs().empty());
  CHECK(max_abs_diff(zero.apply(x.topLeftCorner(2, 2)), zeros(2, 2)) == 0.0);

  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_map(rng, 2 + trial % 2, 3 - trial % 2, 1 + trial);
    const auto minimal = m.minimal();
    CHECK(basis_gap(m, minimal) < 1e-10);
    CHECK(max_abs_diff(choi_from_pairs(m.in_dim(), m.out_dim(), minimal.pairs()), m.choi()) <
          1e-12 * std::max(1.0, m.choi().cwiseAbs().maxCoeff()));
    // Choi block (i, j) is m(E_ij).
    const auto d = static_cast<Eigen::Index>(m.out_dim());
    CHECK(max_abs_diff(m.choi().block(d, 0, d, d),
                       m.apply(matrix_unit(m.in_dim(), m.in_dim(), 1, 0))) < 1e-12);
  }
}

TEST_CASE("amplify", "[cbmaps]") {
  std::mt19937_64 rng(13);
  const auto m = random_map(rng, 2, 2, 2);
  CHECK(basis_gap(m.amplify(1), m) == 0.0);
  const auto id = LinearMatrixMap::identity(2).amplify(3);
  const Matrix x = random_matrix(rng, 6, 6);
  CHECK(max_abs_diff(id.apply(x), x) < 1e-15);
  CHECK_THROWS(m.amplify(0));

  // Level-k norms never decrease; the transpose climbs to its cb norm.
  const auto t = LinearMatrixMap::transpose(3);
  double previous = 0.0;
  for (std::size_t k = 1; k <= 3; ++k) {
    const double level = norm_lower(t.amplify(k));
    CHECK(level >= previous - 1e-9);
    previous = level;
  }
  CHECK(std::abs(previous - 3.0) < 1e-4);
}

TEST_CASE("norm_lower", "[cbmaps]") {
  const double id = norm_lower(LinearMatrixMap::identity(3));
  CHECK(id >= 1.0 - 1e-9);
  CHECK(id <= 1.0 + 1e-12);
  for (std::size_t n = 2; n <= 4; ++n) {
    CHECK(std::abs(norm_lower(LinearMatrixMap::transpose(n)) - 1.0) < 1e-6);
  }
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = random_matrix(rng, 3, 2);
    const Matrix b = random_matrix(rng, 2, 3);
    CHECK(norm_lower(LinearMatrixMap::two_sided(a, b)) >=
          operator_norm(a) * operator_norm(b) - 1e-6);
  }
  // More restarts never lower the bound; threads do not change it.
  const auto m = random_map(rng, 3, 3, 3);
  AscentOptions few;
  few.restarts = 4;
  AscentOptions many;
  many.restarts = 16;
  CHECK(norm_lower(m, many) >= norm_lower(m, few));
  AscentOptions threaded = many;
  threaded.threads = 3;
  CHECK(norm_lower(m, threaded) == norm_lower(m, many));
  CHECK(norm_lower(LinearMatrixMap::zero(2, 3)) == 0.0);
}

TEST_CASE("cb_norm", "[cbmaps]") {
  for (std::size_t d = 1; d <= 4; ++d) {
    CHECK(std::abs(cb_norm(LinearMatrixMap::identity(d)) - 1.0) < 1e-6);
  }
  for (std::size_t n = 2; n <= 5; ++n) {
    CHECK(std::abs(cb_norm(LinearMatrixMap::transpose(n)) - static_cast<double>(n)) < 1e-5);
  }
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = random_matrix(rng, 2, 3);
    const Matrix b = random_matrix(rng, 3, 2);
    CHECK(std::abs(cb_norm(LinearMatrixMap::two_sided(a, b)) -
                   operator_norm(a) * operator_norm(b)) < 1e-6);
  }
  CHECK(cb_norm(LinearMatrixMap::zero(2, 2)) == 0.0);
}

TEST_CASE("cb_norm properties", "[cbmaps]") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 6; ++trial) {
    const auto m = random_map(rng, 1 + trial % 3, 1 + (trial + 1) % 3, 1 + trial % 4);
    const double cb = cb_norm(m);
    CHECK(norm_lower(m) <= cb + 1e-8 * (1.0 + cb));

    const Complex c(-1.5, 2.0);
    CHECK(std::abs(cb_norm(m.scaled(c)) - std::abs(c) * cb) < 1e-8 * std::abs(c) * cb);

    // Independent program: Watrous form on the trace dual.
    const CbNormResult w = cb_norm_watrous(m);
    REQUIRE(w.status == sdp::Status::Optimal);
    CHECK(std::abs(w.value - cb) < 1e-6 * (1.0 + cb));

    // Every map here has out dim <= 3; level out dim attains the cb norm.
    CHECK(std::abs(cb_norm_via_amplification(m) - cb) < 1e-4 * (1.0 + cb));
  }
}

TEST_CASE("cb_norm_via_amplification", "[cbmaps]") {
  CHECK(std::abs(cb_norm_via_amplification(LinearMatrixMap::identity(2)) - 1.0) < 1e-9);
  CHECK(std::abs(cb_norm_via_amplification(LinearMatrixMap::transpose(3)) - 3.0) < 1e-4);
  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(rng, 3, 3);
  const Matrix b = random_matrix(rng, 3, 3);
  CHECK(std::abs(cb_norm_via_amplification(LinearMatrixMap::two_sided(a, b)) -
                 operator_norm(a) * operator_norm(b)) < 1e-4);
}

TEST_CASE("dim_bound_check", "[cbmaps]") {
  const DimBoundReport id = dim_bound_check(LinearMatrixMap::identity(3));
  CHECK(id.holds);
  CHECK(std::abs(id.ratio - 1.0) < 1e-6);
  CHECK(id.bound == 3);

  const DimBoundReport t = dim_bound_check(LinearMatrixMap::transpose(3));
  CHECK(t.holds);
  CHECK(t.saturation_gap < 1e-4);

  std::mt19937_64 rng(18);
  const DimBoundReport ab = dim_bound_check(
      LinearMatrixMap::two_sided(random_matrix(rng, 3, 2), random_matrix(rng, 2, 3)));
  CHECK(ab.holds);
  CHECK(std::abs(ab.ratio - 1.0) < 1e-4);
}

TEST_CASE("solver failures surface", "[cbmaps]") {
  // A single interior-point iteration cannot certify the optimum.
  const CbNormResult r = cb_norm_result(LinearMatrixMap::transpose(3), 1e-15);
  if (r.status != sdp::Status::Optimal) {
    CHECK_THROWS_AS(cb_norm(LinearMatrixMap::transpose(3), 1e-15), SolverFailure);
  }
  CHECK(to_string(sdp::Status::MaxIter) == "MaxIter");
}
