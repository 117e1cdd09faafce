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

#include "opspace/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace opspace::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError(path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(path, "missing field \"" + key + "\"");
  return *it;
}

std::size_t count_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(path + "." + key, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

double real_value(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "non-finite value");
  return x;
}

// A scalar written as a number or as [re, im].
Complex complex_value(const Json& v, const std::string& path) {
  if (v.is_number()) return real_value(v, path);
  if (v.is_array() && v.size() == 2) {
    return {real_value(v[0], path + "[0]"), real_value(v[1], path + "[1]")};
  }
  fail(path, "expected a number or [re, im]");
}

const Json& array_field(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = field(j, key, path);
  if (!v.is_array()) fail(path + "." + key, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

Json matrix_list(const std::vector<Matrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(to_json(m));
  return out;
}

}  // namespace

Json parse(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": " + e.what());
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

// ---------------------------------------------------------------------------

Json to_json(const Matrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Json to_json(const Vector& v) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return Json{{"re", re}, {"im", im}};
}

Json to_json(const BlockMatrix& t) {
  Json blocks = Json::array();
  for (std::size_t m = 0; m < t.grid_size(); ++m) {
    Json row = Json::array();
    for (std::size_t n = 0; n < t.grid_size(); ++n) row.push_back(to_json(t.block(m, n)));
    blocks.push_back(row);
  }
  return Json{{"gridSize", t.grid_size()}, {"blockDim", t.block_dim()}, {"blocks", blocks}};
}

Json to_json(const LinearMatrixMap& m) {
  Json pairs = Json::array();
  for (const auto& p : m.pairs()) {
    pairs.push_back(Json{{"A", to_json(p.left)}, {"B", to_json(p.right)}});
  }
  return Json{{"inDim", m.in_dim()}, {"outDim", m.out_dim()}, {"pairs", pairs}};
}

Json to_json(const HaagerupTensor& v) {
  return Json{{"dim", v.dim()}, {"rows", matrix_list(v.rows())}, {"cols", matrix_list(v.cols())}};
}

Json to_json(const SchurSymbol& phi) {
  if (phi.is_scalar()) {
    Json rows = Json::array();
    const Matrix& s = *phi.scalar();
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < s.cols(); ++j) {
        row.push_back(Json::array({s(i, j).real(), s(i, j).imag()}));
      }
      rows.push_back(row);
    }
    return Json{{"blockDim", phi.block_dim()}, {"scalar", rows}};
  }
  Json entries = Json::array();
  for (std::size_t m = 0; m < phi.grid_size(); ++m) {
    Json row = Json::array();
    for (std::size_t n = 0; n < phi.grid_size(); ++n) row.push_back(to_json(phi.entry(m, n)));
    entries.push_back(row);
  }
  return Json{{"gridSize", phi.grid_size()}, {"blockDim", phi.block_dim()}, {"entries", entries}};
}

Json to_json(const DiagonalRepresentation& rep) {
  Json a = Json::array();
  Json b = Json::array();
  for (std::size_t i = 0; i < rep.length(); ++i) {
    a.push_back(matrix_list(rep.a()[i]));
    b.push_back(matrix_list(rep.b()[i]));
  }
  return Json{{"gridSize", rep.grid_size()}, {"blockDim", rep.block_dim()}, {"a", a}, {"b", b}};
}

Json to_json(const sdp::Problem& p) {
  Json c = Json::array();
  for (const auto& blk : p.objective()) c.push_back(to_json(blk.dense()));
  Json cons = Json::array();
  for (const auto& con : p.constraints()) {
    Json blocks = Json::array();
    for (const auto& [idx, mat] : con.blocks) {
      blocks.push_back(Json{{"block", idx}, {"A", to_json(mat.dense())}});
    }
    cons.push_back(Json{{"rhs", con.rhs}, {"blocks", blocks}});
  }
  return Json{{"blockDims", p.block_dims()}, {"C", c}, {"constraints", cons}};
}

Json to_json(const sdp::Solution& s) {
  Json y = Json::array();
  for (Eigen::Index i = 0; i < s.y.size(); ++i) y.push_back(s.y(i));
  return Json{{"status", sdp::to_string(s.status)},
              {"primalObj", s.primal_objective},
              {"dualObj", s.dual_objective},
              {"gap", s.gap},
              {"primalResidual", s.primal_residual},
              {"dualResidual", s.dual_residual},
              {"iterations", s.iterations},
              {"X", matrix_list(s.x)},
              {"y", y}};
}

// ---------------------------------------------------------------------------

Matrix matrix_from_json(const Json& j, const std::string& path) {
  const std::size_t rows = count_field(j, "rows", path);
  const std::size_t cols = count_field(j, "cols", path);
  const Json& re = array_field(j, "re", path);
  if (re.size() != rows * cols) {
    fail(path + ".re", "expected " + std::to_string(rows * cols) + " entries, got " +
                           std::to_string(re.size()));
  }
  const bool has_im = j.contains("im");
  if (has_im) {
    const Json& im = array_field(j, "im", path);
    if (im.size() != rows * cols) {
      fail(path + ".im", "expected " + std::to_string(rows * cols) + " entries, got " +
                             std::to_string(im.size()));
    }
  }
  Matrix m = zeros(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) {
    const double x = real_value(re[k], at(path + ".re", k));
    const double y = has_im ? real_value(j["im"][k], at(path + ".im", k)) : 0.0;
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = {x, y};
  }
  return m;
}

BlockMatrix block_from_json(const Json& j, const std::string& path) {
  const std::size_t n = count_field(j, "gridSize", path);
  const std::size_t d = count_field(j, "blockDim", path);
  const Json& grid = array_field(j, "blocks", path);
  if (grid.size() != n) fail(path + ".blocks", "expected gridSize rows");
  std::vector<Matrix> blocks;
  for (std::size_t m = 0; m < n; ++m) {
    const std::string rp = at(path + ".blocks", m);
    if (!grid[m].is_array() || grid[m].size() != n) fail(rp, "expected gridSize blocks");
    for (std::size_t k = 0; k < n; ++k) {
      const std::string bp = at(rp, k);
      Matrix b = matrix_from_json(grid[m][k], bp);
      if (static_cast<std::size_t>(b.rows()) != d || static_cast<std::size_t>(b.cols()) != d) {
        fail(bp, "expected a blockDim x blockDim matrix");
      }
      blocks.push_back(std::move(b));
    }
  }
  return BlockMatrix(n, d, std::move(blocks));
}

LinearMatrixMap map_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("choi")) {
    const Matrix c = matrix_from_json(j["choi"], path + ".choi");
    std::size_t in = 0;
    std::size_t out = 0;
    if (j.contains("inDim") || j.contains("outDim")) {
      in = count_field(j, "inDim", path);
      out = count_field(j, "outDim", path);
    } else {
      const auto n = static_cast<std::size_t>(c.rows());
      const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (d * d != n) fail(path, "choi size is not a square; give inDim and outDim");
      in = out = d;
    }
    if (static_cast<std::size_t>(c.rows()) != in * out || c.cols() != c.rows()) {
      fail(path + ".choi", "expected a (inDim*outDim) square matrix");
    }
    return LinearMatrixMap::from_choi(c, in, out);
  }
  const std::size_t in = count_field(j, "inDim", path);
  const std::size_t out = count_field(j, "outDim", path);
  const Json& pairs = array_field(j, "pairs", path);
  std::vector<MapPair> ps;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::string pp = at(path + ".pairs", k);
    MapPair p{matrix_from_json(field(pairs[k], "A", pp), pp + ".A"),
              matrix_from_json(field(pairs[k], "B", pp), pp + ".B")};
    if (static_cast<std::size_t>(p.left.rows()) != out ||
        static_cast<std::size_t>(p.left.cols()) != in) {
      fail(pp + ".A", "expected outDim x inDim");
    }
    if (static_cast<std::size_t>(p.right.rows()) != in ||
        static_cast<std::size_t>(p.right.cols()) != out) {
      fail(pp + ".B", "expected inDim x outDim");
    }
    ps.push_back(std::move(p));
  }
  return LinearMatrixMap::from_pairs(in, out, std::move(ps));
}

HaagerupTensor tensor_from_json(const Json& j, const std::string& path) {
  const std::size_t d = count_field(j, "dim", path);
  const Json& rows = array_field(j, "rows", path);
  const Json& cols = array_field(j, "cols", path);
  if (rows.size() != cols.size()) fail(path + ".cols", "rows and cols differ in length");
  std::vector<Matrix> a;
  std::vector<Matrix> b;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    a.push_back(matrix_from_json(rows[k], at(path + ".rows", k)));
    b.push_back(matrix_from_json(cols[k], at(path + ".cols", k)));
    for (const auto* m : {&a.back(), &b.back()}) {
      if (static_cast<std::size_t>(m->rows()) != d ||
          static_cast<std::size_t>(m->cols()) != d) {
        fail(at(path + (m == &a.back() ? ".rows" : ".cols"), k), "expected dim x dim");
      }
    }
  }
  return HaagerupTensor(d, std::move(a), std::move(b));
}

SchurSymbol symbol_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  if (j.contains("scalar")) {
    const Json& s = array_field(j, "scalar", path);
    const std::size_t n = s.size();
    const std::size_t d = j.contains("blockDim") ? count_field(j, "blockDim", path) : 1;
    Matrix phi = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string rp = at(path + ".scalar", i);
      if (!s[i].is_array() || s[i].size() != n) fail(rp, "expected a square array");
      for (std::size_t k = 0; k < n; ++k) {
        phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
            complex_value(s[i][k], at(rp, k));
      }
    }
    return SchurSymbol::from_scalar(phi, d);
  }
  const std::size_t n = count_field(j, "gridSize", path);
  const std::size_t d = count_field(j, "blockDim", path);
  const Json& grid = array_field(j, "entries", path);
  if (grid.size() != n) fail(path + ".entries", "expected gridSize rows");
  std::vector<LinearMatrixMap> entries;
  for (std::size_t m = 0; m < n; ++m) {
    const std::string rp = at(path + ".entries", m);
    if (!grid[m].is_array() || grid[m].size() != n) fail(rp, "expected gridSize maps");
    for (std::size_t k = 0; k < n; ++k) {
      LinearMatrixMap e = map_from_json(grid[m][k], at(rp, k));
      if (e.in_dim() != d || e.out_dim() != d) {
        fail(at(rp, k), "entry must map M_blockDim to itself");
      }
      entries.push_back(std::move(e));
    }
  }
  return SchurSymbol(n, d, std::move(entries));
}

DiagonalRepresentation representation_from_json(const Json& j, const std::string& path) {
  const Json& a = array_field(j, "a", path);
  const Json& b = array_field(j, "b", path);
  if (a.size() != b.size()) fail(path + ".b", "a and b differ in length");
  std::size_t n = j.contains("gridSize") ? count_field(j, "gridSize", path) : 0;
  std::size_t d = j.contains("blockDim") ? count_field(j, "blockDim", path) : 0;
  std::vector<std::vector<Matrix>> fa;
  std::vector<std::vector<Matrix>> fb;
  for (const auto& [name, src, dst] :
       {std::tuple{"a", &a, &fa}, std::tuple{"b", &b, &fb}}) {
    for (std::size_t i = 0; i < src->size(); ++i) {
      const std::string fp = at(path + "." + name, i);
      const Json& fam = (*src)[i];
      if (!fam.is_array()) fail(fp, "expected an array of matrices");
      if (!j.contains("gridSize") && i == 0 && dst == &fa) n = fam.size();
      if (fam.size() != n) fail(fp, "expected gridSize matrices");
      std::vector<Matrix> blocks;
      for (std::size_t k = 0; k < fam.size(); ++k) {
        Matrix m = matrix_from_json(fam[k], at(fp, k));
        if (!j.contains("blockDim") && d == 0) d = static_cast<std::size_t>(m.rows());
        if (static_cast<std::size_t>(m.rows()) != d ||
            static_cast<std::size_t>(m.cols()) != d) {
          fail(at(fp, k), "expected blockDim x blockDim");
        }
        blocks.push_back(std::move(m));
      }
      dst->push_back(std::move(blocks));
    }
  }
  return DiagonalRepresentation(n, d, std::move(fa), std::move(fb));
}

}  // namespace opspace::io
