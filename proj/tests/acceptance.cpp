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

// Runs every acceptance criterion and prints one line per criterion.

#include "opspace/acceptance.hpp"

#include <iostream>

int main() {
  bool ok = true;
  for (const auto& r : opspace::acceptance::run_all()) {
    std::cout << opspace::acceptance::format(r) << std::endl;
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}
