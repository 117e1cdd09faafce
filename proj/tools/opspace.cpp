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

// Command-line front end: JSON in, JSON or CSV reports out.

#include "opspace/acceptance.hpp"
#include "opspace/cbmaps.hpp"
#include "opspace/haagerup.hpp"
#include "opspace/json_io.hpp"
#include "opspace/schur.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using opspace::io::Json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int restarts = 32;
  bool csv = false;
  bool timings = false;
  bool watrous = false;
  std::size_t max_k = 4;
  double power = 1.0;
  unsigned threads = 1;
};

enum Exit { kOk = 0, kSolverFailure = 1, kInputError = 2 };

class Clock {
 public:
  void mark(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    laps_[name] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  const Json& laps() const { return laps_; }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
  Json laps_ = Json::object();
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

opspace::AscentOptions ascent(const RunConfig& c) {
  opspace::AscentOptions o;
  o.restarts = c.restarts;
  o.seed = c.seed;
  o.threads = c.threads;
  return o;
}

// A symbol file may also hold a diagonal representation {"a": ..., "b": ...}.
opspace::SchurSymbol load_symbol(const Json& j, std::optional<opspace::DiagonalRepresentation>* rep) {
  if (j.is_object() && j.contains("a") && j.contains("b")) {
    *rep = opspace::io::representation_from_json(j);
    return opspace::representation_to_symbol(**rep);
  }
  return opspace::io::symbol_from_json(j);
}

Json run_norm(const RunConfig& c, const Json& in) {
  const auto m = opspace::io::map_from_json(in);
  return Json{{"normLb", opspace::norm_lower(m, ascent(c))}, {"kind", "lower bound"}};
}

Json run_cbnorm(const RunConfig& c, const Json& in) {
  const auto m = opspace::io::map_from_json(in);
  const auto cb = opspace::cb_norm_result(m, c.tol);
  if (cb.status != opspace::sdp::Status::Optimal) {
    throw opspace::SolverFailure("solver failure: " + opspace::sdp::to_string(cb.status),
                                 cb.status);
  }
  const double lb = opspace::norm_lower(m, ascent(c));
  Json out{{"cb", cb.value},
           {"status", opspace::sdp::to_string(cb.status)},
           {"gap", cb.gap},
           {"iterations", cb.iterations},
           {"normLb", lb},
           {"outDim", m.out_dim()},
           {"ratio", lb > 0.0 ? cb.value / lb : 0.0}};
  if (c.watrous) {
    const auto w = opspace::cb_norm_watrous(m, c.tol);
    out["cbWatrous"] = Json{{"value", w.value}, {"status", opspace::sdp::to_string(w.status)}};
  }
  return out;
}

Json run_haagerup(const RunConfig& c, const Json& in) {
  const auto v = opspace::io::tensor_from_json(in);
  const auto sdp = opspace::cb_norm_result(opspace::elementary_operator(v), c.tol);
  if (sdp.status != opspace::sdp::Status::Optimal) {
    throw opspace::SolverFailure("solver failure: " + opspace::sdp::to_string(sdp.status),
                                 sdp.status);
  }
  Json out{{"rowNorm", opspace::row_norm(v)},
           {"colNorm", opspace::col_norm(v)},
           {"sdp", Json{{"value", sdp.value}, {"status", opspace::sdp::to_string(sdp.status)},
                        {"gap", sdp.gap}}}};
  if (v.length() > 0) {
    const auto f = opspace::haagerup_norm_factorized(v, 400, 1e-10, 8, c.seed);
    out["factorized"] = Json{{"value", f.value},
                             {"converged", f.converged},
                             {"tensor", opspace::io::to_json(f.tensor)}};
  }
  return out;
}

Json run_schur_apply(const RunConfig&, const Json& in) {
  if (!in.is_object() || !in.contains("symbol") || !in.contains("block")) {
    throw opspace::io::InputError("$: expected fields \"symbol\" and \"block\"");
  }
  std::optional<opspace::DiagonalRepresentation> rep;
  const auto phi = load_symbol(in["symbol"], &rep);
  const auto t = opspace::io::block_from_json(in["block"], "$.block");
  return Json{{"result", opspace::io::to_json(opspace::apply_symbol(phi, t))}};
}

Json run_schur_norm(const RunConfig& c, const Json& in) {
  std::optional<opspace::DiagonalRepresentation> rep;
  const auto phi = load_symbol(in, &rep);
  const auto mn = opspace::multiplier_norm(phi, c.tol, ascent(c));
  Json out{{"cb", mn.cb},
           {"status", opspace::sdp::to_string(mn.status)},
           {"gap", mn.gap},
           {"normLb", mn.norm_lb},
           {"consistent", mn.consistent},
           {"scalar", phi.is_scalar()}};
  if (mn.scalar_cb) out["scalarCb"] = *mn.scalar_cb;
  if (rep) {
    const auto decay = opspace::representation_decay_report(*rep);
    out["representationBound"] = opspace::representation_bound(*rep);
    out["rowDecay"] = decay.row;
    out["colDecay"] = decay.col;
  }
  return out;
}

Json run_factorize(const RunConfig& c, const Json& in) {
  std::optional<opspace::DiagonalRepresentation> rep;
  const auto phi = load_symbol(in, &rep);
  const auto f = opspace::scalar_factorization(phi, c.tol);
  Json xs = Json::array();
  Json ys = Json::array();
  for (const auto& x : f.x) xs.push_back(opspace::io::to_json(x));
  for (const auto& y : f.y) ys.push_back(opspace::io::to_json(y));
  return Json{{"value", f.value}, {"residual", f.residual}, {"x", xs}, {"y", ys}};
}

Json run_tail_report(const RunConfig& c, const Json& in) {
  std::optional<opspace::DiagonalRepresentation> rep;
  const auto phi = load_symbol(in, &rep);
  Json rows = Json::array();
  for (std::size_t n = 0; n <= phi.grid_size(); ++n) {
    rows.push_back(Json{{"n", n}, {"tail", opspace::tail_multiplier_norm(phi, n, c.tol)}});
  }
  return Json{{"rows", rows}};
}

Json run_counterexample(const RunConfig& c, const Json&) {
  const double p = c.power;
  const auto table = opspace::counterexample_report(
      c.max_k, [p](std::size_t k) { return std::pow(static_cast<double>(k), -p); }, c.tol,
      ascent(c));
  Json rows = Json::array();
  for (const auto& r : table) {
    rows.push_back(Json{{"k", r.k},
                        {"weight", r.weight},
                        {"blockNorm", r.block_norm},
                        {"blockCb", r.block_cb},
                        {"status", opspace::sdp::to_string(r.status)}});
  }
  return Json{{"power", p}, {"rows", rows}};
}

Json run_check_suite(const RunConfig& c, bool* all_passed, Json* timing) {
  Json rows = Json::array();
  *all_passed = true;
  for (const auto& r : opspace::acceptance::run_all()) {
    rows.push_back(Json{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    (*timing)[std::to_string(r.id)] = r.seconds;
    *all_passed = *all_passed && r.passed;
    if (!c.csv && c.output.empty()) std::cerr << opspace::acceptance::format(r) << "\n";
  }
  return Json{{"passed", *all_passed}, {"rows", rows}};
}

std::string to_csv(const Json& result) {
  std::ostringstream out;
  auto cell = [](const Json& v) -> std::string {
    if (v.is_number_float()) return num(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  };
  if (result.contains("rows") && result["rows"].is_array() && !result["rows"].empty()) {
    const Json& rows = result["rows"];
    bool first = true;
    for (const auto& [key, _] : rows[0].items()) {
      out << (first ? "" : ",") << key;
      first = false;
    }
    out << "\n";
    for (const auto& row : rows) {
      first = true;
      for (const auto& [key, v] : row.items()) {
        out << (first ? "" : ",") << cell(v);
        first = false;
      }
      out << "\n";
    }
    return out.str();
  }
  out << "key,value\n";
  for (const auto& [key, v] : result.items()) {
    if (v.is_primitive()) out << key << "," << cell(v) << "\n";
  }
  return out.str();
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(c.output);
  if (!out) throw opspace::io::InputError(c.output + ": cannot write report");
  out << text;
}

int run(const RunConfig& c) {
  Clock clock;
  Json in;
  const bool needs_input = c.command != "counterexample" && c.command != "check-suite";
  if (needs_input) {
    if (c.input.empty()) throw opspace::io::InputError("missing input file");
    in = opspace::io::read_file(c.input);
  }
  clock.mark("read");

  Json result;
  Json suite_timing = Json::object();
  bool suite_passed = true;
  if (c.command == "norm") result = run_norm(c, in);
  else if (c.command == "cbnorm") result = run_cbnorm(c, in);
  else if (c.command == "haagerup") result = run_haagerup(c, in);
  else if (c.command == "schur-apply") result = run_schur_apply(c, in);
  else if (c.command == "schur-norm") result = run_schur_norm(c, in);
  else if (c.command == "factorize") result = run_factorize(c, in);
  else if (c.command == "tail-report") result = run_tail_report(c, in);
  else if (c.command == "counterexample") result = run_counterexample(c, in);
  else result = run_check_suite(c, &suite_passed, &suite_timing);
  clock.mark("compute");

  Json report{{"command", c.command},
              {"config", Json{{"tol", c.tol}, {"seed", c.seed}, {"restarts", c.restarts}}},
              {"result", result}};
  if (c.timings) {
    Json t = clock.laps();
    if (c.command == "check-suite") t["criteria"] = suite_timing;
    report["timings"] = t;
  }
  emit(c, c.csv ? to_csv(result) : report.dump(2) + "\n");
  return suite_passed ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"Operator norms, cb norms, Haagerup norms and Schur multipliers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--tol", config.tol, "solver tolerance, in (0, 1)")
      ->check([](const std::string& s) -> std::string {
        const double t = std::strtod(s.c_str(), nullptr);
        return t > 0.0 && t < 1.0 ? "" : "tol must lie in (0, 1)";
      });
  app.add_option("--seed", config.seed, "seed for the ascent restarts");
  app.add_option("--restarts", config.restarts, "ascent restarts")->check(CLI::PositiveNumber);
  app.add_option("--out", config.output, "report file (default: stdout)");
  app.add_flag("--csv", config.csv, "CSV instead of JSON");
  app.add_flag("--timings", config.timings, "add wall-clock timings to the report");

  const std::vector<std::pair<std::string, std::string>> with_input{
      {"norm", "lower bound on the operator norm of a map"},
      {"cbnorm", "completely bounded norm of a map"},
      {"haagerup", "Haagerup norm of a tensor by both routes"},
      {"schur-apply", "apply a symbol to a block matrix"},
      {"schur-norm", "multiplier norms of a symbol"},
      {"factorize", "factorization of a scalar symbol"},
      {"tail-report", "tail multiplier norms of a symbol"}};
  for (const auto& [name, help] : with_input) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("input", config.input, "input JSON file")->required();
    if (name == "cbnorm") sub->add_flag("--watrous", config.watrous, "add the Watrous cross-check");
  }
  auto* ce = app.add_subcommand("counterexample", "transpose-block table");
  ce->add_option("-K,--max-k", config.max_k, "largest block size")->check(CLI::PositiveNumber);
  ce->add_option("--power", config.power, "weights k^-power");
  app.add_subcommand("check-suite", "run the acceptance battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }
  config.command = app.get_subcommands().front()->get_name();

  if (const char* env = std::getenv("OPSPACE_THREADS")) {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || t < 1) {
      std::cerr << "error: OPSPACE_THREADS must be a positive integer\n";
      return kInputError;
    }
    config.threads = static_cast<unsigned>(t);
  }

  try {
    return run(config);
  } catch (const opspace::SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const opspace::io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  }
}
