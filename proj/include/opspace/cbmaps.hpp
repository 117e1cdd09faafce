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

#pragma once

#include "opspace/matrix.hpp"
#include "opspace/sdp.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace opspace {

/// One term X -> left * X * right of a linear map M_d -> M_d'.
struct MapPair {
  Matrix left;   // d' x d
  Matrix right;  // d x d'
};

/// Raised when a norm SDP ends without a certified optimum.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, sdp::Status status)
      : std::runtime_error(what), status_(status) {}
  sdp::Status status() const { return status_; }

 private:
  sdp::Status status_;
};

/// Linear map M_d -> M_d' held both as a list of pairs and as its Choi matrix
///   C = sum_{ij} E_ij (x) m(E_ij),
/// whose (i, j) block of size d' x d' is m(E_ij).
class LinearMatrixMap {
 public:
  static LinearMatrixMap from_pairs(std::size_t in_dim, std::size_t out_dim,
                                    std::vector<MapPair> pairs);
  /// One balanced pair per singular value of C above 1e-12 * sigma_max.
  static LinearMatrixMap from_choi(const Matrix& choi, std::size_t in_dim,
                                   std::size_t out_dim);

  static LinearMatrixMap identity(std::size_t d);
  static LinearMatrixMap transpose(std::size_t n);
  static LinearMatrixMap zero(std::size_t in_dim, std::size_t out_dim);
  /// X -> a X b.
  static LinearMatrixMap two_sided(const Matrix& a, const Matrix& b);

  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }
  const std::vector<MapPair>& pairs() const { return pairs_; }
  const Matrix& choi() const { return choi_; }

  Matrix apply(const Matrix& x) const;
  /// id_{M_k} (x) m, acting on M_k(M_d).
  LinearMatrixMap amplify(std::size_t k) const;
  LinearMatrixMap scaled(Complex c) const;
  /// Equivalent map whose pairs come from the Choi SVD (minimal length).
  LinearMatrixMap minimal() const;
  /// Trace-duality adjoint Y -> sum_i left_i^* Y right_i^*, M_d' -> M_d.
  LinearMatrixMap dual() const;

 private:
  LinearMatrixMap(std::size_t in_dim, std::size_t out_dim,
                  std::vector<MapPair> pairs, Matrix choi)
      : in_dim_(in_dim),
        out_dim_(out_dim),
        pairs_(std::move(pairs)),
        choi_(std::move(choi)) {}

  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  std::vector<MapPair> pairs_;
  Matrix choi_;
};

Matrix choi_from_pairs(std::size_t in_dim, std::size_t out_dim,
                       const std::vector<MapPair>& pairs);

struct AscentOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_iter = 500;
  /// Restarts are spread over this many threads and reduced by max.
  unsigned threads = 1;
};

/// Certified lower bound on sup{ ||m(X)|| : ||X|| <= 1 } from alternating
/// maximization: for fixed X take the top singular pair (u, v) of m(X), then
/// replace X by the unitary maximizing |<m(X) v, u>|. The value is
/// ||m(X)|| / ||X|| at the final X of the best restart.
double norm_lower(const LinearMatrixMap& m, const AscentOptions& options = {});

struct CbNormResult {
  double value = 0.0;
  sdp::Status status = sdp::Status::Optimal;
  double gap = 0.0;
  int iterations = 0;
};

/// Completely bounded norm by semidefinite programming. The pairs of the
/// minimal representation (A_k, B_k) are reweighted by a positive matrix P,
///
///   ||m||_cb = min t  s.t.  t I - sum_kl P_kl A_k A_l^* >= 0,
///                           [ t I   B^* ; B   P (x) I_d ] >= 0,
///
/// with B the column stack of the B_k; the second block is the Schur
/// complement form of sum_kl (P^{-1})_kl B_k^* B_l <= t I.
CbNormResult cb_norm_result(const LinearMatrixMap& m, double tol = 1e-8);
/// Same value; throws SolverFailure unless the SDP reports Optimal.
double cb_norm(const LinearMatrixMap& m, double tol = 1e-8);

/// Diamond norm of the trace dual from the two-block Watrous program on its
/// Choi matrix J:
///   max Re <J, W>  s.t.  [ rho0 (x) I   W ; W^*   rho1 (x) I ] >= 0,
/// rho0, rho1 density matrices. Has 2 (d d')^2 variables; meant for small maps.
CbNormResult cb_norm_watrous(const LinearMatrixMap& m, double tol = 1e-8);

/// norm_lower(amplify(m, outDim)).
double cb_norm_via_amplification(const LinearMatrixMap& m,
                                 const AscentOptions& options = {});

struct DimBoundReport {
  double norm_lb = 0.0;
  double cb = 0.0;
  double ratio = 0.0;  // cb / norm_lb
  std::size_t bound = 0;  // outDim
  double slack = 0.0;
  /// cb <= bound * norm_lb * (1 + slack)
  bool holds = false;
  /// |ratio - bound| / bound
  double saturation_gap = 0.0;
};

DimBoundReport dim_bound_check(const LinearMatrixMap& m, double tol = 1e-8,
                               const AscentOptions& options = {},
                               double slack = 1e-3);

}  // namespace opspace
