#include "contactdyn/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "contactdyn/builtins.hpp"
#include "contactdyn/symplectization.hpp"

namespace contactdyn::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kVerbs = {"flow",      "norm",    "distance", "compose",    "invert",
                                         "conjugate", "reparam", "lift",     "experiment", "cauchy"};

const std::vector<std::string> kVerbHelp = {
    "integrate a Hamiltonian from the seeds",
    "contact norm of a Hamiltonian",
    "d_alpha between the systems of params.a and params.b",
    "system generated by a#b",
    "inverse system",
    "conjugate by the time-1 map of params.phi",
    "time change by params.zeta",
    "lift to the symplectization and check it",
    "run a named reproduction",
    "Cauchy diagnostics for a family"};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("bad value for '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const std::string& key, T& dst, const std::string& where) {
  if (j.contains(key)) dst = get<T>(j, key, where);
}

template <class T>
void read(const json& j, const std::string& key, std::optional<T>& dst, const std::string& where) {
  if (j.contains(key)) dst = get<T>(j, key, where);
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error(flag + " expects comma-separated integers, got '" + text + "'");
    }
  }
  if (out.empty()) config_error(flag + " is empty");
  return out;
}

RunConfig parse_document(const std::string& verb, const json& root) {
  if (std::find(kVerbs.begin(), kVerbs.end(), verb) == kVerbs.end()) config_error("unknown verb '" + verb + "'");
  RunConfig c;
  c.verb = verb;
  check_keys(root, {"manifold", "hamiltonians", "flow", "grid", "norm", "seeds", "params", "format"}, "config");

  if (root.contains("manifold")) {
    const json& m = root["manifold"];
    check_keys(m, {"kind", "n", "half_width", "box_lo", "box_hi", "pole_margin"}, "manifold");
    read(m, "kind", c.manifold.kind, "manifold");
    read(m, "n", c.manifold.n, "manifold");
    read(m, "half_width", c.manifold.half_width, "manifold");
    read(m, "box_lo", c.manifold.box_lo, "manifold");
    read(m, "box_hi", c.manifold.box_hi, "manifold");
    read(m, "pole_margin", c.manifold.pole_margin, "manifold");
    if (c.manifold.kind != "darboux" && c.manifold.kind != "hopf")
      config_error("manifold.kind must be darboux or hopf");
    if (c.manifold.box_lo.has_value() != c.manifold.box_hi.has_value())
      config_error("manifold.box_lo and box_hi go together");
  }

  if (root.contains("hamiltonians")) {
    const json& hs = root["hamiltonians"];
    if (!hs.is_object()) config_error("hamiltonians must be an object");
    for (const auto& [name, h] : hs.items()) {
      const std::string where = "hamiltonians." + name;
      HamiltonianSpec s;
      if (h.is_string()) {
        s.expr = h.get<std::string>();
      } else {
        check_keys(h, {"expr", "builtin", "params"}, where);
        read(h, "expr", s.expr, where);
        read(h, "builtin", s.builtin, where);
        read(h, "params", s.params, where);
      }
      if (s.expr.has_value() == s.builtin.has_value()) config_error(where + " needs exactly one of expr, builtin");
      c.hamiltonians[name] = s;
    }
  }

  if (root.contains("flow")) {
    const json& f = root["flow"];
    check_keys(f, {"dt", "t_samples", "richardson_probes", "min_steps_per_piece"}, "flow");
    read(f, "dt", c.flow.dt, "flow");
    read(f, "t_samples", c.flow.t_samples, "flow");
    read(f, "richardson_probes", c.flow.richardson_probes, "flow");
    read(f, "min_steps_per_piece", c.flow.min_steps_per_piece, "flow");
    if (!(c.flow.dt > 0.0) || c.flow.t_samples < 1) config_error("flow.dt and flow.t_samples must be positive");
  }

  if (root.contains("grid")) {
    const json& g = root["grid"];
    check_keys(g, {"resolution", "eta_range"}, "grid");
    read(g, "resolution", c.grid, "grid");
    read(g, "eta_range", c.eta_range, "grid");
  }

  if (root.contains("norm")) {
    const json& n = root["norm"];
    check_keys(n, {"t_samples", "refine", "refine_iterations", "max_refinement_delta"}, "norm");
    read(n, "t_samples", c.norm.t_samples, "norm");
    read(n, "refine", c.norm.refine, "norm");
    read(n, "refine_iterations", c.norm.refine_iterations, "norm");
    read(n, "max_refinement_delta", c.norm.max_refinement_delta, "norm");
  }

  read(root, "seeds", c.seeds, "config");

  if (root.contains("params")) {
    const json& p = root["params"];
    check_keys(p,
               {"hamiltonian", "a", "b", "phi", "zeta", "dzeta", "theta0", "lower", "upper", "experiment", "k",
                "ks", "time"},
               "params");
    VerbParams& v = c.params;
    read(p, "hamiltonian", v.hamiltonian, "params");
    read(p, "a", v.a, "params");
    read(p, "b", v.b, "params");
    read(p, "phi", v.phi, "params");
    read(p, "zeta", v.zeta, "params");
    read(p, "dzeta", v.dzeta, "params");
    read(p, "theta0", v.theta0, "params");
    read(p, "lower", v.lower, "params");
    read(p, "upper", v.upper, "params");
    read(p, "experiment", v.experiment, "params");
    read(p, "k", v.k, "params");
    read(p, "ks", v.ks, "params");
    read(p, "time", v.time, "params");
  }

  read(root, "format", c.format, "config");
  if (c.format != "json" && c.format != "csv") config_error("format must be json or csv");

  json canon = root;
  canon["verb"] = verb;
  c.canonical = canon.dump();
  return c;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(source + ": " + e.what());
  }
}

// ---- execution helpers

ChartedManifold build_manifold(const ManifoldSpec& s) {
  if (s.kind == "hopf") return ChartedManifold::hopf(s.pole_margin);
  if (s.box_lo) {
    const auto to_vec = [](const std::vector<double>& v) {
      Vec r(static_cast<Eigen::Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) r[static_cast<Eigen::Index>(i)] = v[i];
      return r;
    };
    return ChartedManifold::darboux(s.n, to_vec(*s.box_lo), to_vec(*s.box_hi));
  }
  return ChartedManifold::darboux(s.n, s.half_width);
}

TimeScalarField build_field(const RunConfig& c, const ChartedManifold& M, const std::string& name) {
  auto it = c.hamiltonians.find(name);
  if (it == c.hamiltonians.end()) config_error("no hamiltonian named '" + name + "'");
  const HamiltonianSpec& s = it->second;
  if (s.expr) return parse_hamiltonian(M, *s.expr);
  return make_builtin(M, *s.builtin, s.params);
}

std::vector<Point> build_seeds(const RunConfig& c, const ChartedManifold& M) {
  std::vector<Point> out;
  if (c.seeds) {
    for (const auto& s : *c.seeds) {
      if (static_cast<int>(s.size()) != M.dim()) config_error("seed has wrong dimension");
      Point p(M.dim());
      for (int i = 0; i < M.dim(); ++i) p[i] = s[static_cast<std::size_t>(i)];
      M.check_domain(p);
      out.push_back(M.wrap(p));
    }
    return out;
  }
  if (M.kind() == ManifoldKind::HopfSphere) return sphere_seeds();
  // 3 points per axis on the middle half of the box
  const int d = M.dim();
  int count = 1;
  for (int i = 0; i < d; ++i) count *= 3;
  for (int idx = 0; idx < count; ++idx) {
    Point p(d);
    int r = idx;
    for (int i = d - 1; i >= 0; --i) {
      const double mid = 0.5 * (M.box_lo()[i] + M.box_hi()[i]);
      const double q = 0.25 * (M.box_hi()[i] - M.box_lo()[i]);
      p[i] = mid + q * (r % 3 - 1);
      r /= 3;
    }
    out.push_back(p);
  }
  return out;
}

QuadratureGrid build_grid(const RunConfig& c, const ChartedManifold& M) {
  // Darboux nodes are cell midpoints, so an extremum on the box edge is missed by
  // 1/N of the range; about 2e4 nodes keeps that under the refinement threshold in R^3.
  const int per_axis = std::max(4, static_cast<int>(std::pow(2e4, 1.0 / M.dim())));
  std::vector<int> res = c.grid.value_or(M.kind() == ManifoldKind::HopfSphere ? std::vector<int>{16, 8, 8}
                                                                              : std::vector<int>(M.dim(), per_axis));
  GridOptions go;
  go.eta_range = c.eta_range;
  return quadrature_grid(M, res, go);
}

Reparameterization build_zeta(const VerbParams& p) {
  if (!p.zeta) config_error("reparam needs params.zeta");
  const auto z = std::make_shared<Expr>(Expr::parse(*p.zeta, {"t"}));
  Reparameterization r;
  r.description = "zeta(t) = " + *p.zeta;
  r.zeta = [z](double t) { return z->eval(&t); };
  if (p.dzeta) {
    const auto dz = std::make_shared<Expr>(Expr::parse(*p.dzeta, {"t"}));
    r.dzeta = [dz](double t) { return dz->eval(&t); };
  } else {
    r.dzeta = [z](double t) {
      const Jet v = Jet::variable(t, 0);
      return z->eval(&v).d[0];
    };
  }
  if (std::abs(r.zeta(0.0)) > 1e-12) config_error("zeta(0) must be 0");
  return r;
}

void add_trajectories(Report& r, const ContactDynamicalSystem& A) {
  Series s;
  s.columns = {"seed", "t"};
  for (const std::string& n : A.manifold.coordinate_names()) s.columns.push_back(n);
  s.columns.push_back("h");
  for (std::size_t i = 0; i < A.seeds.size(); ++i)
    for (std::size_t q = 0; q < A.times.size(); ++q) {
      std::vector<double> row = {static_cast<double>(i), A.times[q]};
      for (int c = 0; c < A.manifold.dim(); ++c) row.push_back(A.trajectories[i][q][c]);
      row.push_back(A.conformal[i][q]);
      s.rows.push_back(std::move(row));
    }
  r.series["trajectories"] = std::move(s);
}

void add_system_scalars(Report& r, const ContactDynamicalSystem& A) {
  r.info("richardson_error", A.meta.richardson_error);
  r.info("sup_abs_h", sup_norm(A));
  r.info("box_leavers", static_cast<double>(A.meta.box_leavers.size()));
  if (A.meta.route_residual) r.info("route_residual", *A.meta.route_residual);
  if (A.meta.route_factor_residual) r.info("route_factor_residual", *A.meta.route_factor_residual);
  r.text_params["seed_route"] = A.meta.seed_route;
}

void add_norm(Report& r, const NormReport& n, const std::string& prefix) {
  r.info(prefix + "norm", n.total);
  r.info(prefix + "osc_integral", n.osc_integral);
  r.info(prefix + "mean_integral", n.mean_integral);
  r.info(prefix + "mean_abs_integral", n.mean_abs_integral);
  r.info(prefix + "sup_variant", n.sup_variant);
  r.info(prefix + "refinement_delta", n.refinement_delta);
  Series s;
  s.columns = {"t", "max", "min", "mean", "osc"};
  for (const TimeSlice& sl : n.series) s.rows.push_back({sl.t, sl.max, sl.min, sl.mean, sl.osc()});
  r.series[prefix + "slices"] = std::move(s);
}

AlgebraOptions algebra_options(const RunConfig& c, const std::vector<Point>& seeds) {
  AlgebraOptions ao;
  ao.flow = c.flow;
  ao.seeds = seeds;
  return ao;
}

ExperimentOptions experiment_options(const RunConfig& c) {
  ExperimentOptions eo;
  eo.dt = c.flow.dt;
  eo.flow_samples = c.flow.t_samples;
  eo.t_samples = c.norm.t_samples;
  eo.grid = c.grid;
  return eo;
}

void stamp(Report& r, const RunConfig& c) {
  r.config_hash = fnv1a_hex(c.canonical);
  if (!r.params.count("dt")) r.params["dt"] = c.flow.dt;
  r.text_params["verb"] = c.verb;
}

}  // namespace

RunConfig parse_config(const std::string& verb, const std::string& text) {
  return parse_document(verb, parse_json(text, "config"));
}

std::vector<Report> execute(const RunConfig& c) {
  std::vector<Report> out;
  if (c.verb == "experiment") {
    if (!c.params.experiment) config_error("experiment needs a name");
    out.push_back(run_experiment(*c.params.experiment, c.params.k, experiment_options(c)));
  } else if (c.verb == "cauchy") {
    const std::string fam = c.params.experiment.value_or("divergent_factors");
    const ExperimentOptions eo = experiment_options(c);
    if (fam == "divergent_factors")
      out.push_back(cauchy_divergent_factors(c.params.ks.empty() ? std::vector<int>{2, 4, 8, 16} : c.params.ks, eo));
    else if (fam == "divergent_isotopies")
      out.push_back(
          cauchy_divergent_isotopies(c.params.ks.empty() ? std::vector<int>{2, 4, 8, 16, 32} : c.params.ks, eo));
    else if (fam == "cantor")
      out.push_back(cauchy_cantor(c.params.ks.empty() ? std::vector<int>{2, 3, 4, 5} : c.params.ks, eo));
    else
      config_error("unknown cauchy family '" + fam + "'");
  } else {
    const ChartedManifold M = build_manifold(c.manifold);
    const std::vector<Point> seeds = build_seeds(c, M);
    Report r;
    r.name = c.verb;
    r.text_params["manifold"] = M.name();
    r.params["flow_samples"] = c.flow.t_samples;
    auto system = [&](const std::string& name) {
      return integrate_system(M, build_field(c, M, name), seeds, c.flow);
    };
    if (c.verb == "flow") {
      const ContactDynamicalSystem A = system(c.params.hamiltonian);
      r.text_params["hamiltonian"] = A.hamiltonian.describe();
      add_system_scalars(r, A);
      add_trajectories(r, A);
    } else if (c.verb == "norm") {
      const TimeScalarField H = build_field(c, M, c.params.hamiltonian);
      const QuadratureGrid G = build_grid(c, M);
      r.text_params["hamiltonian"] = H.describe();
      add_norm(r, contact_norm(M, H, G, c.norm), "");
    } else if (c.verb == "distance") {
      const ContactDynamicalSystem A = system(c.params.a), B = system(c.params.b);
      DistanceOptions dopt;
      dopt.norm = c.norm;
      const DistanceReport d = contact_distance(A, B, build_grid(c, M), dopt);
      r.info("d_M", d.d_M);
      r.info("d_bar_M", d.d_bar_M);
      r.info("conformal_sup", d.conf_sup);
      r.info("hamiltonian_norm", d.ham_norm);
      r.info("d_alpha", d.d_alpha);
    } else if (c.verb == "compose" || c.verb == "invert" || c.verb == "conjugate" || c.verb == "reparam") {
      const AlgebraOptions ao = algebra_options(c, seeds);
      const ContactDynamicalSystem A = system(c.verb == "compose" ? c.params.a : c.params.hamiltonian);
      ContactDynamicalSystem C = A;
      if (c.verb == "compose") {
        C = compose(A, system(c.params.b), ao);
      } else if (c.verb == "invert") {
        C = inverse(A, ao);
      } else if (c.verb == "conjugate") {
        if (!c.params.phi) config_error("conjugate needs params.phi");
        FlowOptions fo = c.flow;
        fo.richardson_probes = 0;
        const ContactDynamicalSystem P = integrate_system(M, build_field(c, M, *c.params.phi), {}, fo);
        C = conjugate(A, ContactDiffeo::time_slice(P, c.params.time), ao);
      } else {
        C = reparameterize(A, build_zeta(c.params), ao);
      }
      r.text_params["hamiltonian"] = C.hamiltonian.describe();
      add_system_scalars(r, C);
      add_trajectories(r, C);
    } else if (c.verb == "lift") {
      const AdmissibleSystem L = lift_system(system(c.params.hamiltonian));
      const LiftCheck lc = verify_lift(L, std::vector<double>(seeds.size(), c.params.theta0), c.flow.dt);
      r.info("lift_max_error", lc.max_error);
      const AdmissibleNorm an = admissible_norm(L, build_grid(c, M), c.params.lower, c.params.upper, c.norm);
      r.params["lower"] = c.params.lower;
      r.params["upper"] = c.params.upper;
      r.info("admissible_norm", an.norm);
      r.info("contact_norm", an.contact);
      r.at_least("admissible_norm_vs_lower_bound", an.norm, an.lower - 1e-9 * (1.0 + an.lower),
                 Provenance::Consistency);
      r.at_most("admissible_norm_vs_upper_bound", an.norm, an.upper + 1e-9 * (1.0 + an.upper),
                Provenance::Consistency);
    }
    out.push_back(std::move(r));
  }
  for (Report& r : out) stamp(r, c);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contact Hamiltonian dynamics toolkit", "contactdyn"};
  app.require_subcommand(1);
  std::string config_path, out_path, format, hamiltonian, manifold, grid, ks;
  std::optional<int> k;
  std::optional<double> dt;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--k", k, "family parameter");
  app.add_option("--ks", ks, "comma-separated family parameters (cauchy)");
  app.add_option("--dt", dt, "RK4 step");
  app.add_option("--grid", grid, "comma-separated grid resolution");
  app.add_option("--hamiltonian", hamiltonian, "expression for the Hamiltonian named H");
  app.add_option("--manifold", manifold, "hopf, darboux or darboux:N");
  app.fallthrough();
  std::string positional;
  for (std::size_t i = 0; i < kVerbs.size(); ++i) {
    CLI::App* sub = app.add_subcommand(kVerbs[i], kVerbHelp[i]);
    if (kVerbs[i] == "experiment" || kVerbs[i] == "cauchy")
      sub->add_option("name", positional, "experiment or family name");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const std::string verb = app.get_subcommands().front()->get_name();
    json root = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) config_error("cannot read config " + config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      root = parse_json(ss.str(), config_path);
      if (!root.is_object()) config_error("config must be an object");
    }
    if (!format.empty()) root["format"] = format;
    if (dt) root["flow"]["dt"] = *dt;
    if (!grid.empty()) root["grid"]["resolution"] = parse_int_list(grid, "--grid");
    if (!hamiltonian.empty()) root["hamiltonians"]["H"] = {{"expr", hamiltonian}};
    if (!manifold.empty()) {
      if (manifold == "hopf") {
        root["manifold"]["kind"] = "hopf";
      } else if (manifold.rfind("darboux", 0) == 0) {
        root["manifold"]["kind"] = "darboux";
        if (manifold.size() > 7) {
          if (manifold[7] != ':') config_error("--manifold expects hopf, darboux or darboux:N");
          root["manifold"]["n"] = parse_int_list(manifold.substr(8), "--manifold").front();
        }
      } else {
        config_error("--manifold expects hopf, darboux or darboux:N");
      }
    }
    if (!positional.empty()) root["params"]["experiment"] = positional;
    if (k) root["params"]["k"] = *k;
    if (!ks.empty()) root["params"]["ks"] = parse_int_list(ks, "--ks");

    const RunConfig cfg = parse_document(verb, root);
    const std::vector<Report> reports = execute(cfg);
    std::string text;
    if (cfg.format == "csv") {
      for (const Report& r : reports) text += to_csv(r);
    } else {
      text = reports.size() == 1 ? to_json(reports.front()) : to_json(reports);
    }
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) config_error("cannot write " + out_path);
      f << text;
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::ConfigError:
      case ErrorKind::ParseError:
      case ErrorKind::UnknownIdentifier:
      case ErrorKind::DomainError:
        return 2;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace contactdyn::cli
