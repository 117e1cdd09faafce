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

#include "opspace/cbmaps.hpp"
#include "opspace/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace opspace {

/// v = sum_k rows[k] (x) cols[k] in M_d (x) M_d.
class HaagerupTensor {
 public:
  HaagerupTensor() = default;
  HaagerupTensor(std::size_t dim, std::vector<Matrix> rows,
                 std::vector<Matrix> cols);

  std::size_t dim() const { return dim_; }
  std::size_t length() const { return rows_.size(); }
  const std::vector<Matrix>& rows() const { return rows_; }
  const std::vector<Matrix>& cols() const { return cols_; }

 private:
  std::size_t dim_ = 0;
  std::vector<Matrix> rows_;
  std::vector<Matrix> cols_;
};

/// r -> sum_j cols[j] r rows[j], i.e. pairs (b_j, a_j).
LinearMatrixMap elementary_operator(const HaagerupTensor& v);

/// ||sum_k a_k^* a_k||^{1/2}. With the elementary operator written as
/// r -> sum b r a, this and col_norm are the two factors whose product bounds
/// its cb norm.
double row_norm(const HaagerupTensor& v);
/// ||sum_k b_k b_k^*||^{1/2}.
double col_norm(const HaagerupTensor& v);

/// Same tensor with linearly independent rows and linearly independent cols
/// (SVD of sum_k vec(a_k) vec(b_k)^T).
HaagerupTensor minimal_length(const HaagerupTensor& v);

double haagerup_norm_sdp(const HaagerupTensor& v, double tol = 1e-8);

struct FactorizedNorm {
  double value = 0.0;
  /// Representation attaining value: row_norm(tensor) * col_norm(tensor).
  HaagerupTensor tensor;
  bool converged = false;
};

/// Minimizes row_norm * col_norm over c = a F, d = F^{-1} b with F = exp(G),
/// starting from the minimal-length representation.
FactorizedNorm haagerup_norm_factorized(const HaagerupTensor& v,
                                        int iters = 400, double tol = 1e-10,
                                        int restarts = 8,
                                        std::uint64_t seed = 0);

}  // namespace opspace
