#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "contactdyn/cli.hpp"
#include "contactdyn/errors.hpp"
#include "json.hpp"

using namespace contactdyn;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("contactdyn_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

double scalar(const json& report, const std::string& name) {
  for (const json& s : report["scalars"])
    if (s["name"] == name) return s["value"].get<double>();
  FAIL("missing scalar " << name);
  return 0.0;
}

const char* kConfig = R"cfg({
  "manifold": {"kind": "darboux"},
  "hamiltonians": {"H": "0.2*sin(x1)", "F": {"expr": "0.1*cos(y1)*t"}, "P": "0.1*x1*y1"},
  "flow": {"dt": 0.01, "t_samples": 10},
  "seeds": [[0.1, 0.2, 0.3]],
  "params": {"phi": "P", "zeta": "t^2", "upper": 0.5}
})cfg";

}  // namespace

TEST_CASE("norm of the constant 1 on the sphere") {
  const Outcome o = invoke({"norm", "--manifold", "hopf", "--hamiltonian", "1"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["name"] == "norm");
  CHECK(scalar(j, "norm") == 1.0);
  CHECK(j["params"]["manifold"] == "hopf");
  CHECK(j["config_hash"].get<std::string>().size() == 16u);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"norm", "--format", "xml"}).code == 2);
  const Outcome parse = invoke({"norm", "--hamiltonian", "x1 + * y1"});
  CHECK(parse.code == 2);
  CHECK(parse.err.find("position 5") != std::string::npos);
  CHECK(invoke({"norm", "--hamiltonian", "q"}).code == 2);
  CHECK(invoke({"norm", "--manifold", "darboux:7", "--hamiltonian", "1"}).code == 2);
  CHECK(invoke({"norm", "--manifold", "torus"}).code == 2);
  CHECK(invoke({"norm", "--config", "/nonexistent/config.json"}).code == 2);
  CHECK(invoke({"norm", "--config", write_temp("unknown.json", R"({"flow": {"dtt": 0.1}})")}).code == 2);
  CHECK(invoke({"experiment", "nope"}).code == 2);
  const Outcome blow = invoke({"flow", "--hamiltonian", "exp(z)"});
  CHECK(blow.code == 3);
  CHECK(blow.err.find("StepExplosion") != std::string::npos);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(cli::parse_config("compose", kConfig));
  const auto expect_config_error = [](const std::string& verb, const std::string& text) {
    try {
      cli::parse_config(verb, text);
      FAIL("expected ConfigError for " << text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ConfigError);
    }
  };
  expect_config_error("norm", R"({"colour": 1})");
  expect_config_error("norm", R"({"manifold": {"kind": "klein"}})");
  expect_config_error("norm", R"({"hamiltonians": {"H": {"expr": "1", "builtin": "reeb"}}})");
  expect_config_error("norm", R"({"flow": {"dt": "small"}})");
  expect_config_error("nope", "{}");
  expect_config_error("norm", "[1, 2");
  const cli::RunConfig c = cli::parse_config("lift", kConfig);
  CHECK(c.flow.dt == 0.01);
  CHECK(c.hamiltonians.at("H").expr == "0.2*sin(x1)");
  CHECK(c.params.upper == 0.5);
  CHECK(c.seeds->size() == 1u);
  const cli::RunConfig b = cli::parse_config("flow", R"({"hamiltonians": {"H": {"builtin": "reeb"}}})");
  CHECK(b.hamiltonians.at("H").builtin == "reeb");
  // key order does not change the canonical form
  CHECK(cli::parse_config("norm", R"({"flow": {"dt": 0.01, "t_samples": 10}})").canonical ==
        cli::parse_config("norm", R"({"flow": {"t_samples": 10, "dt": 0.01}})").canonical);
}

TEST_CASE("every verb runs from a config") {
  const std::string cfg = write_temp("verbs.json", kConfig);
  for (const std::string verb : {"flow", "norm", "distance", "compose", "invert", "conjugate", "reparam", "lift"}) {
    CAPTURE(verb);
    const Outcome o = invoke({verb, "--config", cfg});
    CHECK(o.code == 0);
    CHECK(o.err.empty());
    if (o.code == 0) CHECK(json::parse(o.out)["all_pass"] == true);
  }
  const json d = json::parse(invoke({"distance", "--config", cfg}).out);
  CHECK(scalar(d, "d_alpha") ==
        doctest::Approx(scalar(d, "d_bar_M") + scalar(d, "conformal_sup") + scalar(d, "hamiltonian_norm")));
  const json l = json::parse(invoke({"lift", "--config", cfg}).out);
  CHECK(scalar(l, "lift_max_error") < 1e-4);
}

TEST_CASE("output is deterministic and configs are hashed") {
  const std::vector<std::string> args = {"flow", "--manifold", "hopf", "--hamiltonian", "0.5*cos(xi1)", "--dt", "0.01"};
  const Outcome a = invoke(args), b = invoke(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> other = args;
  other.back() = "0.005";
  const Outcome c = invoke(other);
  CHECK(json::parse(a.out)["config_hash"] != json::parse(c.out)["config_hash"]);

  const auto path = (std::filesystem::temp_directory_path() / "contactdyn_test_out.csv").string();
  std::vector<std::string> to_file = args;
  to_file.insert(to_file.end(), {"--format", "csv", "--out", path});
  const Outcome f = invoke(to_file);
  CHECK(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "report,name,value,target,tol,relation,provenance,pass");
  std::remove(path.c_str());
}

TEST_CASE("experiment and cauchy verbs") {
  const Outcome e = invoke({"experiment", "cantor", "--k", "3"});
  REQUIRE(e.code == 0);
  const json j = json::parse(e.out);
  CHECK(j["name"] == "cantor");
  CHECK(j["all_pass"] == true);
  const Outcome c = invoke({"cauchy", "divergent_isotopies", "--ks", "2,4,8"});
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out).contains("series"));
}
