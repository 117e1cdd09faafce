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

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace opspace;
using namespace opspace::sdp;

namespace {

// max -t  s.t.  t I - A >= 0, i.e. lambda_max(A) = -optimum.
Problem lambda_max_problem(const Matrix& a, double scale = 1.0) {
  const auto n = static_cast<std::size_t>(a.rows());
  Constraint c;
  c.rhs = -scale;
  SparseHermitian id(n);
  for (int i = 0; i < static_cast<int>(n); ++i) id.add_hermitian(i, i, -scale);
  c.blocks = {{0, id}};
  return Problem({n}, {SparseHermitian::from_dense(-a)}, {c});
}

double lambda_max_oracle(const Matrix& a) {
  const Eigen::MatrixXcd h = a;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("eigenvalue programs", "[sdp]") {
  const Solution s = solve(lambda_max_problem(diagonal({1.0, 3.0})));
  REQUIRE(s.status == Status::Optimal);
  CHECK(std::abs(-s.dual_objective - 3.0) < 1e-7);

  std::mt19937_64 rng(7);
  for (std::size_t n : {2, 5, 12}) {
    const Matrix a = random_hermitian(rng, n);
    const Solution sol = solve(lambda_max_problem(a));
    REQUIRE(sol.status == Status::Optimal);
    CHECK(std::abs(-sol.dual_objective - lambda_max_oracle(a)) < 1e-7);
    // Weak duality and the reported certificate at the optimum.
    CHECK(sol.primal_objective >= sol.dual_objective - 1e-8);
    CHECK(sol.gap <= 1e-8 * (1.0 + std::abs(sol.primal_objective)));
    CHECK(sol.primal_residual <= 1e-8);
    CHECK(hermitian_eigen(sol.x[0]).values(0) >= -1e-8);
  }
}

TEST_CASE("contradictory constraints are infeasible", "[sdp]") {
  SparseHermitian id(2);
  id.add_hermitian(0, 0, 1.0);
  id.add_hermitian(1, 1, 1.0);
  const Problem p({2}, {SparseHermitian::from_dense(identity(2))},
                  {Constraint{{{0, id}}, 1.0}, Constraint{{{0, id}}, 2.0}});
  REQUIRE(p.dependency_certificate());
  const Solution s = solve(p);
  CHECK(s.status == Status::Infeasible);
  CHECK(s.infeasible_side == "primal");
}

TEST_CASE("consistent duplicate constraints are set aside", "[sdp]") {
  SparseHermitian id(2);
  id.add_hermitian(0, 0, 1.0);
  id.add_hermitian(1, 1, 1.0);
  SparseHermitian twice(2);
  twice.add_hermitian(0, 0, 2.0);
  twice.add_hermitian(1, 1, 2.0);
  // min <diag(1, 3), X>  s.t.  tr X = 1 (stated twice) -> 1.
  const Problem p({2}, {SparseHermitian::from_dense(diagonal({1.0, 3.0}))},
                  {Constraint{{{0, id}}, 1.0}, Constraint{{{0, twice}}, 2.0}});
  CHECK(p.active().size() == 1);
  const Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(std::abs(s.primal_objective - 1.0) < 1e-7);
}

TEST_CASE("rescaling constraints leaves the optimum", "[sdp]") {
  std::mt19937_64 rng(8);
  const Matrix a = random_hermitian(rng, 4);
  const Solution s1 = solve(lambda_max_problem(a, 1.0));
  const Solution s2 = solve(lambda_max_problem(a, 250.0));
  REQUIRE(s1.status == Status::Optimal);
  REQUIRE(s2.status == Status::Optimal);
  // y scales by 1/250 but b^T y does not.
  CHECK(std::abs(s1.dual_objective - s2.dual_objective) < 1e-7);
}

TEST_CASE("solves are deterministic", "[sdp]") {
  std::mt19937_64 rng(9);
  const Problem p = lambda_max_problem(random_hermitian(rng, 6));
  const Solution s1 = solve(p);
  const Solution s2 = solve(p);
  REQUIRE(s1.history.size() == s2.history.size());
  for (std::size_t k = 0; k < s1.history.size(); ++k) {
    CHECK(s1.history[k].primal_objective == s2.history[k].primal_objective);
    CHECK(s1.history[k].dual_objective == s2.history[k].dual_objective);
  }
  CHECK(s1.y == s2.y);
}

TEST_CASE("problem validation", "[sdp]") {
  SparseHermitian bad(2);
  bad.add_hermitian(0, 1, 1.0);
  CHECK_NOTHROW(Problem({2}, {bad}, {}));
  CHECK_THROWS(Problem({2}, {SparseHermitian(3)}, {}));
  CHECK_THROWS(Problem({2, 1}, {SparseHermitian(2)}, {}));
}

TEST_CASE("dual_slack recomputes C - sum y A", "[sdp]") {
  const Matrix a = diagonal({2.0, -1.0});
  const Problem p = lambda_max_problem(a);
  RealVector y(1);
  y(0) = 5.0;
  CHECK(max_abs_diff(dual_slack(p, y)[0], diagonal({3.0, 6.0})) < 1e-15);
}
