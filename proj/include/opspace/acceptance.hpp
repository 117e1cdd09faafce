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

#include <string>
#include <vector>

namespace opspace::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Worst observed deviation and its tolerance, in words.
  std::string detail;
  double seconds = 0.0;
  double limit_seconds = 0.0;
};

CriterionResult transpose_dichotomy();
CriterionResult haagerup_identification();
CriterionResult bimodule_norm_equality();
CriterionResult diagonal_compression();
CriterionResult kernel_bounds();
CriterionResult dimension_bound();
CriterionResult tail_diagnostics();
CriterionResult round_trips();

/// All criteria in order.
std::vector<CriterionResult> run_all();

/// "[PASS] 3 bimodule norm equality: ... (1.2 s / 120 s)".
std::string format(const CriterionResult& r);

}  // namespace opspace::acceptance
