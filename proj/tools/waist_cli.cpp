#include "waist/experiment.hpp"
#include "waist/format.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

namespace {

struct Flags {
  std::string config, norm, eps_grid, z_grid, f_upper, modulus, out, format;
  int n = 0, k = 1;
  std::string eps, samples, fiber_points, seed, modulus_budget, trials;
  double cap_mass = 0.5;
};

// Registers the shared flags on a subcommand and returns the option handles.
std::map<std::string, CLI::Option*> add_flags(CLI::App* sub, Flags& f) {
  std::map<std::string, CLI::Option*> o;
  o["config"] = sub->add_option("--config", f.config, "JSON config file; flags override it");
  o["norm"] = sub->add_option("--norm", f.norm, "euclidean:D, lp:P:D or reg:<base>:w=W:d=D");
  o["n"] = sub->add_option("--n", f.n, "sphere dimension (ambient dimension n+1)");
  o["k"] = sub->add_option("--k", f.k, "target dimension");
  o["eps"] = sub->add_option("--eps", f.eps, "neighborhood radius");
  o["eps_grid"] = sub->add_option("--eps-grid", f.eps_grid, "lo:hi:step");
  o["samples"] = sub->add_option("--samples", f.samples, "Monte Carlo samples (1e6 accepted)");
  o["fiber_points"] = sub->add_option("--fiber-points", f.fiber_points, "fiber / cloud points (0: automatic)");
  o["z_grid"] = sub->add_option("--z-grid", f.z_grid, "lo:hi:step per target coordinate");
  o["seed"] = sub->add_option("--seed", f.seed, "random seed");
  o["f_upper"] = sub->add_option("--f-upper", f.f_upper, "pi or halfpi");
  o["modulus"] = sub->add_option("--modulus", f.modulus, "analytic or numeric");
  o["modulus_budget"] = sub->add_option("--modulus-budget", f.modulus_budget, "evaluations per numeric modulus point");
  o["cap_mass"] = sub->add_option("--cap-mass", f.cap_mass, "mass of the cap set A (verify-iso)");
  o["trials"] = sub->add_option("--trials", f.trials, "randomized trials (needle-suite)");
  o["out"] = sub->add_option("--out", f.out, "output path (default stdout)");
  o["format"] = sub->add_option("--format", f.format, "json or csv");
  return o;
}

waist::ExperimentConfig build_config(const std::string& command, const Flags& f,
                                     const std::map<std::string, CLI::Option*>& o) {
  using waist::ConfigError;
  waist::ExperimentConfig c;
  if (o.at("config")->count()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config file '" + f.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config file: ") + e.what());
    }
    c = waist::config_from_json(j);
  }
  c.command = waist::parse_command(command);
  auto given = [&](const char* name) { return o.at(name)->count() > 0; };
  auto integer = [](const std::string& text, const char* flag) {
    try {
      const auto v = waist::parse_integer(text);
      if (v < 0) throw std::invalid_argument("negative");
      return static_cast<std::uint64_t>(v);
    } catch (const std::invalid_argument&) {
      throw ConfigError(std::string(flag) + " expects a nonnegative integer (got '" + text + "')");
    }
  };
  if (given("norm")) c.norm = f.norm;
  if (given("n")) c.n = f.n;
  if (given("k")) c.k = f.k;
  if (given("eps")) {
    try {
      c.eps = waist::parse_double(f.eps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--eps: ") + e.what());
    }
    c.eps_grid.reset();
  }
  if (given("eps_grid")) c.eps_grid = waist::GridSpec::parse(f.eps_grid);
  if (given("samples")) c.samples = integer(f.samples, "--samples");
  if (given("fiber_points")) c.fiber_points = integer(f.fiber_points, "--fiber-points");
  if (given("z_grid")) c.z_grid = waist::GridSpec::parse(f.z_grid);
  if (given("seed")) c.seed = integer(f.seed, "--seed");
  if (given("f_upper")) c.f_upper = f.f_upper;
  if (given("modulus")) c.modulus = f.modulus;
  if (given("modulus_budget")) c.modulus_budget = integer(f.modulus_budget, "--modulus-budget");
  if (given("cap_mass")) c.cap_mass = f.cap_mass;
  if (given("trials")) c.trials = integer(f.trials, "--trials");
  if (given("out")) c.out = f.out;
  if (given("format")) c.format = waist::parse_format(f.format);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Waist and isoperimetric bounds for spheres of uniformly convex norms"};
  app.set_version_flag("--version", waist::kVersion);
  app.require_subcommand(1);
  Flags flags;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"bound", "lower bounds w, w2 and the Gromov-Milman bound on an eps grid"},
      {"modulus", "modulus of convexity of a norm"},
      {"verify-waist", "Monte Carlo check of the waist bound on the best fiber"},
      {"verify-iso", "Monte Carlo check of the isoperimetric consequence on cap sets"},
      {"needle-suite", "randomized checks of the needle lemma chain"},
      {"compare", "bound comparison table"},
  };
  for (const auto& [name, help] : commands) options[name] = add_flags(app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    auto config = build_config(command, flags, options.at(command));
    const auto start = std::chrono::steady_clock::now();
    const auto report = waist::run_experiment(config);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    waist::emit_report(report, report.json["config"]["out"].get<std::string>(), config.format);
    std::cerr << (report.passed ? "PASS " : "FAIL ") << command << " (" << waist::format_double(seconds) << " s)\n";
    return report.passed ? 0 : 1;
  } catch (const waist::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
