#pragma once

// Geometry definitions, the built-in registry, command execution and
// machine-readable reports behind the egjms executable.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egjms/geometry.hpp"
#include "egjms/operators.hpp"
#include "egjms/sampling.hpp"
#include "egjms/submanifold.hpp"

namespace egjms {

struct GeometrySpec {
  std::string name;
  int n = 0;
  int k = 0;
  MetricChart metric;
  Embedding embedding;
  /// Declares an Einstein ambient (Ric = lambda (n-1) g) with minimal Sigma.
  std::optional<double> lambda;
  std::optional<Expr> omega;
  /// One [lo, hi] pair per submanifold coordinate.
  Box box;
  bool conformally_flat = false;

  OperatorOptions operator_options() const;
};

/// Parses a geometry file (JSON). Malformed JSON and malformed expressions
/// raise ParseError; inconsistent dimensions raise SpecError.
GeometrySpec parse_geometry(std::string_view text, const std::string& name = "file");

std::vector<std::string> builtin_names();
std::optional<GeometrySpec> builtin_geometry(std::string_view name);
/// A built-in name, otherwise a path to a geometry file.
GeometrySpec resolve_geometry(const std::string& name_or_path);

struct RunOptions {
  std::string command;  // curvature, extrinsic, qcurv, apply, verify, spectrum
  std::string target;   // verify subject
  std::optional<int> level;
  std::optional<std::string> f;
  double tol = 1e-6;
  std::uint64_t seed = 1;
  int points = 5;
  int order = 6;
  int spectrum_k = 2;
  int spectrum_l = 2;
  int spectrum_mmax = 3;
};

struct PointRecord {
  std::vector<double> x;
  std::map<std::string, double> values;
  std::map<std::string, double> residuals;
  std::map<std::string, std::string> labels;  // expressions and exact values
};

struct Report {
  std::string command;
  std::string geometry;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::vector<PointRecord> points;
  bool pass = true;
  double tol = 0.0;
  std::string paper_ref;
  double wall_seconds = 0.0;
  std::string timestamp;
};

/// The verify subjects accepted by run_command.
const std::vector<std::string>& verify_targets();

/// Runs one command. spec may be null only for spectrum. Errors propagate
/// as the exception types of error.hpp.
Report run_command(const RunOptions& opt, const GeometrySpec* spec);

/// Everything except the "timing" member is a deterministic function of the inputs.
nlohmann::ordered_json report_json(const Report& r);
std::string report_csv(const Report& r);

/// 0 pass, 2 tolerance failure.
int exit_code(const Report& r);
/// 3 inadmissible, 4 parse or spec error, 5 numeric failure, 1 otherwise.
int exit_code(const std::exception& e);

}  // namespace egjms
