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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace opspace;

namespace {

HaagerupTensor random_tensor(std::mt19937_64& rng, std::size_t dim, std::size_t len) {
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (std::size_t k = 0; k < len; ++k) {
    a.push_back(random_matrix(rng, dim, dim));
    b.push_back(random_matrix(rng, dim, dim));
  }
  return HaagerupTensor(dim, std::move(a), std::move(b));
}

HaagerupTensor transpose_tensor(std::size_t n) {
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a.push_back(matrix_unit(n, n, i, j));
      b.push_back(matrix_unit(n, n, i, j));
    }
  }
  return HaagerupTensor(n, std::move(a), std::move(b));
}

// sum_k a_k (x) b_k as a d^2 x d^2 matrix.
Matrix kron_sum(const HaagerupTensor& v) {
  Matrix out = zeros(v.dim() * v.dim(), v.dim() * v.dim());
  for (std::size_t k = 0; k < v.length(); ++k) out += kron(v.rows()[k], v.cols()[k]);
  return out;
}

}  // namespace

TEST_CASE("HaagerupTensor validation", "[haagerup]") {
  CHECK_THROWS(HaagerupTensor(2, {identity(2)}, {}));
  CHECK_THROWS(HaagerupTensor(2, {identity(3)}, {identity(3)}));
  CHECK_NOTHROW(HaagerupTensor(2, {}, {}));
}

TEST_CASE("elementary_operator", "[haagerup]") {
  std::mt19937_64 rng(20);
  const Matrix a = random_matrix(rng, 2, 2);
  const Matrix b = random_matrix(rng, 2, 2);
  const Matrix r = random_matrix(rng, 2, 2);
  const auto op = elementary_operator(HaagerupTensor(2, {a}, {b}));
  CHECK(max_abs_diff(op.apply(r), b * r * a) < 1e-12);

  // The transpose tensor gives the transpose map.
  const auto t = elementary_operator(transpose_tensor(3));
  const Matrix x = random_matrix(rng, 3, 3);
  CHECK(max_abs_diff(t.apply(x), x.transpose()) < 1e-12);
}

TEST_CASE("row and column norms", "[haagerup]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto v = transpose_tensor(n);
    CHECK(std::abs(row_norm(v) - std::sqrt(double(n))) < 1e-12);
    CHECK(std::abs(col_norm(v) - std::sqrt(double(n))) < 1e-12);
  }
  const HaagerupTensor empty(3, {}, {});
  CHECK(row_norm(empty) == 0.0);
  CHECK(col_norm(empty) == 0.0);

  std::mt19937_64 rng(21);
  const Matrix a = random_matrix(rng, 3, 3);
  const Matrix b = random_matrix(rng, 3, 3);
  const HaagerupTensor single(3, {a}, {b});
  CHECK(std::abs(row_norm(single) - operator_norm(a)) < 1e-10);
  CHECK(std::abs(col_norm(single) - operator_norm(b)) < 1e-10);
}

TEST_CASE("haagerup_norm_sdp", "[haagerup]") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix a = random_matrix(rng, 3, 3);
    const Matrix b = random_matrix(rng, 3, 3);
    CHECK(std::abs(haagerup_norm_sdp(HaagerupTensor(3, {a}, {b})) -
                   operator_norm(a) * operator_norm(b)) < 1e-6);
  }
  const HaagerupTensor diag(2, {matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 1, 1)},
                            {matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 1, 1)});
  CHECK(std::abs(haagerup_norm_sdp(diag) - 1.0) < 1e-6);
  for (std::size_t n = 2; n <= 4; ++n) {
    CHECK(std::abs(haagerup_norm_sdp(transpose_tensor(n)) - double(n)) < 1e-5);
  }
  CHECK(haagerup_norm_sdp(HaagerupTensor(2, {}, {})) == 0.0);
}

TEST_CASE("minimal_length", "[haagerup]") {
  // a (x) b + a (x) c collapses to a (x) (b + c).
  std::mt19937_64 rng(23);
  const Matrix a = random_matrix(rng, 2, 2);
  const Matrix b = random_matrix(rng, 2, 2);
  const Matrix c = random_matrix(rng, 2, 2);
  const HaagerupTensor v(2, {a, a}, {b, c});
  const HaagerupTensor m = minimal_length(v);
  CHECK(m.length() == 1);
  CHECK(max_abs_diff(kron_sum(m), kron_sum(v)) < 1e-12);

  CHECK(minimal_length(transpose_tensor(2)).length() == 4);
  CHECK(minimal_length(HaagerupTensor(2, {zeros(2, 2)}, {zeros(2, 2)})).length() == 0);

  for (int trial = 0; trial < 5; ++trial) {
    const HaagerupTensor r = random_tensor(rng, 2, 6);
    const HaagerupTensor mr = minimal_length(r);
    CHECK(mr.length() <= 4);
    CHECK(max_abs_diff(kron_sum(mr), kron_sum(r)) < 1e-12);
  }
}

TEST_CASE("haagerup_norm_factorized", "[haagerup]") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 4; ++trial) {
    const HaagerupTensor v = random_tensor(rng, 3, 3);
    const double sdp_value = haagerup_norm_sdp(v);
    const FactorizedNorm f = haagerup_norm_factorized(v);
    CHECK(std::abs(f.value - sdp_value) < 1e-4 * (1.0 + sdp_value));
    // The returned representation is a genuine factorization of v.
    CHECK(max_abs_diff(kron_sum(f.tensor), kron_sum(v)) < 1e-9 * (1.0 + sdp_value));
    CHECK(std::abs(row_norm(f.tensor) * col_norm(f.tensor) - f.value) < 1e-12 * f.value);
    // Any representation bounds the norm from above.
    CHECK(sdp_value <= row_norm(v) * col_norm(v) + 1e-8);
  }
  CHECK_THROWS(haagerup_norm_factorized(HaagerupTensor(2, {}, {})));
}

TEST_CASE("balancing does not change the norm", "[haagerup]") {
  std::mt19937_64 rng(25);
  const HaagerupTensor v = random_tensor(rng, 2, 2);
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (std::size_t k = 0; k < v.length(); ++k) {
    a.push_back(4.0 * v.rows()[k]);
    b.push_back(0.25 * v.cols()[k]);
  }
  const HaagerupTensor scaled(2, std::move(a), std::move(b));
  CHECK(std::abs(haagerup_norm_factorized(scaled).value - haagerup_norm_factorized(v).value) <
        1e-6);

  // Mixing the representation by an invertible F leaves the tensor and norm.
  const Matrix f = random_matrix(rng, 2, 2) + 3.0 * identity(2);
  const Matrix finv = f.inverse();
  std::vector<Matrix> c(2, zeros(2, 2));
  std::vector<Matrix> d(2, zeros(2, 2));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      c[i] += f(k, i) * v.rows()[k];
      d[i] += finv(i, k) * v.cols()[k];
    }
  }
  const HaagerupTensor mixed(2, std::move(c), std::move(d));
  REQUIRE(max_abs_diff(kron_sum(mixed), kron_sum(v)) < 1e-12);
  CHECK(std::abs(haagerup_norm_sdp(mixed) - haagerup_norm_sdp(v)) < 1e-6);
}
