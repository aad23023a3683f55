#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "contactdyn/experiments.hpp"
#include "contactdyn/flow.hpp"
#include "contactdyn/metrics.hpp"

namespace contactdyn::cli {

/// A named Hamiltonian: either an expression or a builtin with parameters.
struct HamiltonianSpec {
  std::optional<std::string> expr;
  std::optional<std::string> builtin;
  std::map<std::string, double> params;
};

struct ManifoldSpec {
  std::string kind = "darboux";  ///< "darboux" or "hopf"
  int n = 2;
  double half_width = 2.0;
  std::optional<std::vector<double>> box_lo;
  std::optional<std::vector<double>> box_hi;
  double pole_margin = 1e-3;
};

/// Verb-specific inputs. Names refer to entries of RunConfig::hamiltonians.
struct VerbParams {
  std::string hamiltonian = "H";
  std::string a = "H";
  std::string b = "F";
  std::optional<std::string> phi;
  std::optional<std::string> zeta;   ///< expression in t
  std::optional<std::string> dzeta;  ///< its derivative; by automatic differentiation if absent
  double theta0 = 0.0;
  double lower = 0.0;  ///< a in ||H_hat||_{a,b}
  double upper = 1.0;  ///< b
  std::optional<std::string> experiment;
  std::optional<int> k;
  std::vector<int> ks;
  double time = 1.0;
};

/// Validated configuration. Unknown keys in the source are rejected.
struct RunConfig {
  std::string verb;
  ManifoldSpec manifold;
  std::map<std::string, HamiltonianSpec> hamiltonians;
  FlowOptions flow{};
  std::optional<std::vector<int>> grid;
  std::optional<std::pair<double, double>> eta_range;
  NormOptions norm{};
  std::optional<std::vector<std::vector<double>>> seeds;
  VerbParams params;
  std::string format = "json";
  /// Canonical JSON of the effective configuration; its hash is embedded in reports.
  std::string canonical;
};

/// Parses a config document (JSON text) for `verb`. Throws ConfigError.
RunConfig parse_config(const std::string& verb, const std::string& text);

/// Runs the tool on argv-style arguments (without the program name).
/// Exit codes: 0 success, 2 invalid input, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already parsed configuration.
std::vector<Report> execute(const RunConfig& cfg);

}  // namespace contactdyn::cli
