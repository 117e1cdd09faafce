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
#include "opspace/haagerup.hpp"
#include "opspace/matrix.hpp"
#include "opspace/schur.hpp"
#include "opspace/sdp.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace opspace::io {

using Json = nlohmann::ordered_json;

/// Malformed input. what() carries either "line:col" for syntax errors or the
/// JSON path of the offending field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses text; syntax errors become InputError("<source>:<line>:<col>: ...").
Json parse(const std::string& text, const std::string& source);
Json read_file(const std::string& path);

Json to_json(const Matrix& m);
Json to_json(const Vector& v);
Json to_json(const BlockMatrix& t);
Json to_json(const LinearMatrixMap& m);
Json to_json(const HaagerupTensor& v);
Json to_json(const SchurSymbol& phi);
Json to_json(const DiagonalRepresentation& rep);
Json to_json(const sdp::Problem& p);
Json to_json(const sdp::Solution& s);

// `path` names the value being read, e.g. "$.pairs[0].A".
Matrix matrix_from_json(const Json& j, const std::string& path = "$");
BlockMatrix block_from_json(const Json& j, const std::string& path = "$");
LinearMatrixMap map_from_json(const Json& j, const std::string& path = "$");
HaagerupTensor tensor_from_json(const Json& j, const std::string& path = "$");
SchurSymbol symbol_from_json(const Json& j, const std::string& path = "$");
DiagonalRepresentation representation_from_json(const Json& j,
                                                const std::string& path = "$");

}  // namespace opspace::io
