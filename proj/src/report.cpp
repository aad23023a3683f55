#include "contactdyn/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "contactdyn/errors.hpp"

namespace contactdyn {

using nlohmann::json;

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Info: return "info";
    case Relation::Close: return "abs_close";
    case Relation::RelClose: return "rel_close";
    case Relation::LessEq: return "le";
    case Relation::GreaterEq: return "ge";
    case Relation::Less: return "lt";
    case Relation::Greater: return "gt";
  }
  return "info";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Published: return "published";
    case Provenance::IndependentOracle: return "independent_oracle";
    case Provenance::Consistency: return "consistency";
    case Provenance::Informational: return "informational";
  }
  return "informational";
}

namespace {

Scalar& push(Report& r, Scalar s) {
  r.scalars.push_back(std::move(s));
  return r.scalars.back();
}

Scalar judged(const std::string& name, double value, double target, std::optional<double> tol,
              Relation rel, Provenance p, bool ok) {
  Scalar s;
  s.name = name;
  s.value = value;
  s.target = target;
  s.tol = tol;
  s.relation = rel;
  s.provenance = p;
  s.pass = ok && std::isfinite(value);
  return s;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
}

// shortest text that round-trips, matching the JSON writer
std::string csv_number(double v) {
  if (!std::isfinite(v)) return v != v ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json report_json(const Report& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["name"] = r.name;
  j["config_hash"] = r.config_hash;
  json params = json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  for (const auto& [k, v] : r.text_params) params[k] = v;
  j["params"] = params;
  json scalars = json::array();
  for (const Scalar& s : r.scalars) {
    json o;
    o["name"] = s.name;
    o["value"] = number(s.value);
    if (s.target) o["target"] = number(*s.target);
    if (s.tol) o["tol"] = *s.tol;
    o["relation"] = to_string(s.relation);
    o["provenance"] = to_string(s.provenance);
    if (s.pass) o["pass"] = *s.pass;
    scalars.push_back(o);
  }
  j["scalars"] = scalars;
  json refs = json::array();
  json series = json::object();
  for (const auto& [k, s] : r.series) {
    refs.push_back(k);
    json rows = json::array();
    for (const auto& row : s.rows) {
      json jr = json::array();
      for (double v : row) jr.push_back(number(v));
      rows.push_back(jr);
    }
    series[k] = {{"columns", s.columns}, {"rows", rows}};
  }
  j["series_refs"] = refs;
  j["series"] = series;
  j["notes"] = r.notes;
  j["all_pass"] = r.all_pass();
  return j;
}

}  // namespace

Scalar& Report::info(const std::string& n, double v) {
  Scalar s;
  s.name = n;
  s.value = v;
  return push(*this, s);
}

Scalar& Report::close(const std::string& n, double v, double target, double tol, Provenance p) {
  return push(*this, judged(n, v, target, tol, Relation::Close, p, std::abs(v - target) <= tol));
}

Scalar& Report::rel_close(const std::string& n, double v, double target, double tol, Provenance p) {
  return push(*this, judged(n, v, target, tol, Relation::RelClose, p,
                            std::abs(v - target) <= tol * std::abs(target)));
}

Scalar& Report::at_most(const std::string& n, double v, double bound, Provenance p) {
  return push(*this, judged(n, v, bound, std::nullopt, Relation::LessEq, p, v <= bound));
}

Scalar& Report::at_least(const std::string& n, double v, double bound, Provenance p) {
  return push(*this, judged(n, v, bound, std::nullopt, Relation::GreaterEq, p, v >= bound));
}

Scalar& Report::below(const std::string& n, double v, double bound, Provenance p) {
  return push(*this, judged(n, v, bound, std::nullopt, Relation::Less, p, v < bound));
}

Scalar& Report::above(const std::string& n, double v, double bound, Provenance p) {
  return push(*this, judged(n, v, bound, std::nullopt, Relation::Greater, p, v > bound));
}

Scalar& Report::flag(const std::string& n, bool ok, Provenance p) {
  return push(*this, judged(n, ok ? 1.0 : 0.0, 1.0, std::nullopt, Relation::GreaterEq, p, ok));
}

const Scalar* Report::find(const std::string& n) const {
  for (const Scalar& s : scalars)
    if (s.name == n) return &s;
  return nullptr;
}

double Report::value(const std::string& n) const {
  const Scalar* s = find(n);
  if (!s) throw Error(ErrorKind::ConfigError, "report " + name + " has no scalar " + n);
  return s->value;
}

bool Report::all_pass() const { return failures().empty(); }

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const Scalar& s : scalars)
    if (s.pass && !*s.pass) out.push_back(s.name);
  return out;
}

std::string to_json(const Report& r, int indent) { return report_json(r).dump(indent) + "\n"; }

std::string to_json(const std::vector<Report>& rs, int indent) {
  json a = json::array();
  for (const Report& r : rs) a.push_back(report_json(r));
  return a.dump(indent) + "\n";
}

std::string series_csv(const Series& s) {
  std::ostringstream o;
  for (std::size_t i = 0; i < s.columns.size(); ++i) o << (i ? "," : "") << csv_field(s.columns[i]);
  o << "\n";
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << csv_number(row[i]);
    o << "\n";
  }
  return o.str();
}

std::string to_csv(const Report& r) {
  std::ostringstream o;
  o << "report,name,value,target,tol,relation,provenance,pass\n";
  for (const Scalar& s : r.scalars) {
    o << csv_field(r.name) << "," << csv_field(s.name) << "," << csv_number(s.value) << ","
      << (s.target ? csv_number(*s.target) : "") << "," << (s.tol ? csv_number(*s.tol) : "") << ","
      << to_string(s.relation) << "," << to_string(s.provenance) << ","
      << (s.pass ? (*s.pass ? "true" : "false") : "") << "\n";
  }
  for (const auto& [k, s] : r.series) o << "# series " << k << "\n" << series_csv(s);
  return o.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace contactdyn
