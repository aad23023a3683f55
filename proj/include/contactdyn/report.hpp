#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contactdyn {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// How a scalar is judged against its target.
enum class Relation { Info, Close, RelClose, LessEq, GreaterEq, Less, Greater };

/// Where a target comes from.
enum class Provenance {
  Published,          ///< a number stated in the source literature
  IndependentOracle,  ///< closed form or separate computation in this code base
  Consistency,        ///< identity that must hold by construction
  Informational       ///< reported, not judged
};

std::string to_string(Relation r);
std::string to_string(Provenance p);

struct Scalar {
  std::string name;
  double value = 0.0;
  std::optional<double> target;
  std::optional<double> tol;
  Relation relation = Relation::Info;
  Provenance provenance = Provenance::Informational;
  std::optional<bool> pass;
};

/// A table of plot-ready samples.
struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string name;
  std::map<std::string, double> params;
  std::map<std::string, std::string> text_params;
  std::vector<Scalar> scalars;
  std::map<std::string, Series> series;
  std::vector<std::string> notes;
  std::string config_hash;

  Scalar& info(const std::string& name, double value);
  /// |value - target| <= tol
  Scalar& close(const std::string& name, double value, double target, double tol,
                Provenance p = Provenance::IndependentOracle);
  /// |value - target| <= tol * |target|
  Scalar& rel_close(const std::string& name, double value, double target, double tol,
                    Provenance p = Provenance::IndependentOracle);
  Scalar& at_most(const std::string& name, double value, double bound,
                  Provenance p = Provenance::IndependentOracle);
  Scalar& at_least(const std::string& name, double value, double bound,
                   Provenance p = Provenance::IndependentOracle);
  Scalar& below(const std::string& name, double value, double bound,
                Provenance p = Provenance::IndependentOracle);
  Scalar& above(const std::string& name, double value, double bound,
                Provenance p = Provenance::IndependentOracle);
  /// A pass/fail fact with no natural scalar (value 1 or 0).
  Scalar& flag(const std::string& name, bool ok, Provenance p = Provenance::Consistency);

  const Scalar* find(const std::string& name) const;
  /// Value of a named scalar; throws if missing.
  double value(const std::string& name) const;
  /// True if every judged scalar passed.
  bool all_pass() const;
  std::vector<std::string> failures() const;
};

std::string to_json(const Report& r, int indent = 2);
std::string to_json(const std::vector<Report>& rs, int indent = 2);
/// Scalars as one CSV table; series follow, each introduced by a "# series <name>" line.
std::string to_csv(const Report& r);
std::string series_csv(const Series& s);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace contactdyn
