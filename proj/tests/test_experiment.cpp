#include "waist/experiment.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace waist;

TEST_CASE("grid specs") {
  const auto g = GridSpec::parse("0.1:0.5:0.1");
  const auto v = g.values();
  REQUIRE(v.size() == 5);
  CHECK(v.back() == doctest::Approx(0.5));
  CHECK(GridSpec::parse(g.to_string()).values() == v);
  CHECK(GridSpec::parse("0.3:0.3:1").values().size() == 1);
  CHECK_THROWS_AS(GridSpec::parse("0.5:0.1:0.1"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("0:1"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:0"), ConfigError);
  CHECK_THROWS_AS(GridSpec::parse("a:1:0.1"), ConfigError);
}

TEST_CASE("config round-trips through JSON") {
  ExperimentConfig c;
  c.command = Command::verify_iso;
  c.norm = "lp:4:3";
  c.k = 1;
  c.eps = 0.3;
  c.samples = 12345;
  c.z_grid = GridSpec::parse("-0.5:0.5:0.25");
  c.seed = 77;
  c.f_upper = "halfpi";
  c.cap_mass = 0.4;
  c.format = OutputFormat::csv;
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);
  ExperimentConfig g;
  g.eps_grid = GridSpec::parse("0.1:1:0.1");
  CHECK(to_json(config_from_json(to_json(g))) == to_json(g));
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"n", "three"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
}

TEST_CASE("config validation") {
  auto run = [](ExperimentConfig c) { c.validate(); return c; };
  ExperimentConfig c;
  c.command = Command::bound;
  c.n = 2;
  c.eps = 0.5;
  const auto ok = run(c);
  CHECK(ok.norm == "euclidean:3");

  auto bad = c;
  bad.norm = "lp:1:3";
  try {
    run(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("1 < p < inf") != std::string::npos);
  }
  bad = c;
  bad.norm = "euclidean:5";
  CHECK_THROWS_AS(run(bad), ConfigError);  // n mismatch
  bad = c;
  bad.k = 3;
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = c;
  bad.eps = 2.5;
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = c;
  bad.eps.reset();
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = c;
  bad.command = Command::verify_waist;
  bad.eps.reset();
  bad.eps_grid = GridSpec::parse("0.1:0.2:0.1");
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = c;
  bad.cap_mass = 1.0;
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = c;
  bad.f_upper = "tau";
  CHECK_THROWS_AS(run(bad), ConfigError);
  bad = ExperimentConfig{};
  CHECK_THROWS_AS(run(bad), ConfigError);  // neither n nor norm
}

TEST_CASE("bound and compare reports") {
  ExperimentConfig c;
  c.command = Command::compare;
  c.n = 2;
  c.eps_grid = GridSpec::parse("0.1:2:0.1");
  const auto r = run_experiment(c);
  CHECK(r.passed);
  CHECK(r.json["version"] == kVersion);
  CHECK(r.json["results"]["rows"].size() == 20);
  const auto csv = render(r, OutputFormat::csv);
  CHECK(csv.rfind("eps,w,w2,gm,b_exponent,n,k,f_upper\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);

  c.command = Command::bound;
  c.eps_grid.reset();
  c.eps = 0.5;
  const auto b = run_experiment(c);
  CHECK(b.json["results"]["rows"][0]["w"].get<double>() == doctest::Approx(0.007518).epsilon(1e-4));
}

TEST_CASE("modulus report") {
  ExperimentConfig c;
  c.command = Command::modulus;
  c.norm = "lp:4:3";
  c.eps_grid = GridSpec::parse("0.5:1:0.5");
  const auto r = run_experiment(c);
  CHECK(render(r, OutputFormat::csv).rfind("eps,delta\n", 0) == 0);
  c.norm = "reg:lp:1.5:2:w=0.05:d=0.01";
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  c.modulus = "numeric";
  c.modulus_budget = 500;
  CHECK(run_experiment(c).json["results"]["values"].size() == 2);
}

TEST_CASE("verify-waist on the round sphere passes and is deterministic") {
  ExperimentConfig c;
  c.command = Command::verify_waist;
  c.norm = "euclidean:3";
  c.eps = 0.5;
  c.samples = 50000;
  c.fiber_points = 5000;
  c.seed = 7;
  const auto a = run_experiment(c), b = run_experiment(c);
  CHECK(a.passed);
  CHECK(render(a, OutputFormat::json) == render(b, OutputFormat::json));
  CHECK(render(a, OutputFormat::csv) == render(b, OutputFormat::csv));
  CHECK(a.json["results"]["best_index"] == 4);
}

TEST_CASE("verify-iso with a half-mass cap") {
  ExperimentConfig c;
  c.command = Command::verify_iso;
  c.norm = "lp:4:3";
  c.eps = 0.3;
  c.samples = 20000;
  c.fiber_points = 5000;
  const auto r = run_experiment(c);
  CHECK(r.passed);
  CHECK(r.json["results"]["cap_mass"]["mean"].get<double>() == doctest::Approx(0.5).epsilon(0.01));
  CHECK(r.json["results"]["cap_neighborhood"]["mean"].get<double>() >= 0.5);
}

TEST_CASE("needle-suite report is an array of per-lemma objects") {
  ExperimentConfig c;
  c.command = Command::needle_suite;
  c.trials = 30;
  c.n = 4;
  const auto r = run_experiment(c);
  CHECK(r.passed);
  const auto& res = r.json["results"];
  REQUIRE(res.is_array());
  CHECK(res.size() == 6);
  for (const auto& item : res) {
    CHECK(item.contains("lemma"));
    CHECK(item.contains("trials"));
    CHECK(item.contains("violations"));
    CHECK(item.contains("worst_margin"));
    CHECK(item.contains("seed"));
  }
}

TEST_CASE("emit_report writes byte-identical files") {
  ExperimentConfig c;
  c.command = Command::bound;
  c.n = 3;
  c.eps_grid = GridSpec::parse("0.2:1:0.2");
  const auto r = run_experiment(c);
  const std::string p1 = "emit_test_a.json", p2 = "emit_test_b.json";
  emit_report(r, p1, OutputFormat::json);
  emit_report(run_experiment(c), p2, OutputFormat::json);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(p1) == slurp(p2));
  CHECK(nlohmann::json::parse(slurp(p1)).is_object());
  std::remove(p1.c_str());
  std::remove(p2.c_str());
  CHECK_THROWS_AS(emit_report(r, "/nonexistent-dir/x.json", OutputFormat::json), std::runtime_error);
}
