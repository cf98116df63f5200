#include "waist/experiment.hpp"

#include "waist/bounds.hpp"
#include "waist/conical.hpp"
#include "waist/format.hpp"
#include "waist/localization.hpp"
#include "waist/modulus.hpp"
#include "waist/norm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace waist {

namespace {

const std::vector<std::pair<Command, std::string>> kCommands{
    {Command::bound, "bound"},           {Command::modulus, "modulus"},
    {Command::verify_waist, "verify-waist"}, {Command::verify_iso, "verify-iso"},
    {Command::needle_suite, "needle-suite"}, {Command::compare, "compare"},
};

std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

ModulusCurve make_modulus(const ExperimentConfig& c, const Norm& norm) {
  if (c.modulus == "numeric") {
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(0.05 * i);
    return ModulusCurve::numeric(norm, grid, c.modulus_budget, c.seed);
  }
  if (norm.kind() == NormKind::regularized)
    throw ConfigError("no closed-form modulus for regularized norms; use --modulus numeric");
  return ModulusCurve::analytic(norm);
}

// Product grid over the k target coordinates.
std::vector<Eigen::VectorXd> z_points(const GridSpec& spec, int k) {
  const auto axis = spec.values();
  std::vector<Eigen::VectorXd> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Eigen::VectorXd z(k);
    for (int i = 0; i < k; ++i) z(i) = axis[idx[static_cast<std::size_t>(i)]];
    out.push_back(z);
    int pos = k - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == axis.size()) idx[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return out;
}

nlohmann::json vec_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

Report bound_report(const ExperimentConfig& c, const Norm& norm, bool compare) {
  const auto modulus = make_modulus(c, norm);
  const FUpper fu = parse_f_upper(c.f_upper);
  const auto rows = bound_table(c.n, c.k, c.eps_values(), modulus, fu);
  Report report;
  report.csv = bound_table_csv(rows, c.n, c.k, fu);
  nlohmann::json arr = nlohmann::json::array();
  bool b_beats_a = true;
  for (const auto& r : rows) {
    nlohmann::json row = {{"eps", r.eps}, {"w", r.w}, {"w2", r.w2}, {"gm", r.gm}, {"b_exponent", r.b_exponent},
                          {"a_exponent", r.a_exponent}};
    if (compare) {
      row["round_sphere"] = round_sphere_waist(c.n, c.k, r.eps).value;
      if (r.a_exponent > 0.0 && !(r.b_exponent > r.a_exponent)) b_beats_a = false;
    }
    arr.push_back(row);
  }
  report.json["results"] = {{"modulus", modulus.label()}, {"rows", arr}};
  if (compare) {
    report.json["results"]["b_exceeds_a"] = verdict(b_beats_a);
    report.passed = b_beats_a;
  }
  return report;
}

Report modulus_report(const ExperimentConfig& c, const Norm& norm) {
  const auto curve = make_modulus(c, norm);
  Report report;
  std::ostringstream csv;
  csv << "eps,delta\n";
  nlohmann::json arr = nlohmann::json::array();
  for (double e : c.eps_values()) {
    const double d = curve(e);
    csv << format_double(e) << ',' << format_double(d) << '\n';
    arr.push_back({{"eps", e}, {"delta", d}});
  }
  report.csv = csv.str();
  report.json["results"] = {{"modulus", curve.label()}, {"values", arr}};
  return report;
}

Report verify_waist_report(const ExperimentConfig& c, const Norm& norm) {
  const double eps = *c.eps;
  const auto modulus = make_modulus(c, norm);
  const FUpper fu = parse_f_upper(c.f_upper);
  const double w = waist_bound_w({c.n, c.k, eps, modulus, fu}).value;
  const auto f = last_coordinates_map(norm.dim(), c.k);
  const std::size_t fiber = c.fiber_points ? c.fiber_points : default_fiber_budget(eps, c.k);
  const auto zs = z_points(c.z_grid, c.k);
  const auto best = best_fiber(norm, f, eps, zs, c.samples, fiber, c.seed);
  const bool pass = best.estimate.mean >= w - 3.0 * best.estimate.std_error;

  Report report;
  report.passed = pass;
  std::ostringstream csv;
  for (int i = 0; i < c.k; ++i) csv << 'z' << i << ',';
  csv << "mean,std_error\n";
  nlohmann::json per_z = nlohmann::json::array();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (!best.per_z[i]) {
      per_z.push_back({{"z", vec_json(zs[i])}, {"estimate", nullptr}});
      continue;
    }
    per_z.push_back({{"z", vec_json(zs[i])}, {"estimate", to_json(*best.per_z[i])}});
    for (Eigen::Index j = 0; j < zs[i].size(); ++j) csv << format_double(zs[i](j)) << ',';
    csv << format_double(best.per_z[i]->mean) << ',' << format_double(best.per_z[i]->std_error) << '\n';
  }
  report.csv = csv.str();
  report.json["results"] = {{"w", w},
                            {"modulus", modulus.label()},
                            {"fiber_points", fiber},
                            {"best_z", vec_json(best.z)},
                            {"best_index", best.index},
                            {"estimate", to_json(best.estimate)},
                            {"per_z", per_z},
                            {"verdict", verdict(pass)}};
  return report;
}

Report verify_iso_report(const ExperimentConfig& c, const Norm& norm) {
  const double eps = *c.eps;
  const auto modulus = make_modulus(c, norm);
  const FUpper fu = parse_f_upper(c.f_upper);
  const double w = waist_bound_w({c.n, c.k, eps, modulus, fu}).value;
  const int last = norm.dim() - 1;

  // Cap {x_last >= q} with q the empirical (1 - cap_mass)-quantile.
  const auto batch = sample_conical(norm, c.samples, c.seed);
  std::vector<double> coord(batch.count());
  for (std::size_t i = 0; i < batch.count(); ++i) coord[i] = batch.point(i)[static_cast<std::size_t>(last)];
  const auto pos = static_cast<std::size_t>(std::floor((1.0 - c.cap_mass) * static_cast<double>(coord.size())));
  std::nth_element(coord.begin(), coord.begin() + static_cast<std::ptrdiff_t>(std::min(pos, coord.size() - 1)), coord.end());
  const double q = coord[std::min(pos, coord.size() - 1)];
  const Indicator cap = [q, last](std::span<const double> x) { return x[static_cast<std::size_t>(last)] >= q; };
  const Indicator rest = [q, last](std::span<const double> x) { return x[static_cast<std::size_t>(last)] < q; };
  const auto cap_mass = set_measure(batch, cap);
  const auto grown = neighborhood_measure(norm, cap, eps, c.samples, c.fiber_points, c.seed);
  const auto grown_rest = neighborhood_measure(norm, rest, eps, c.samples, c.fiber_points, c.seed);
  const auto& larger = grown.mean >= grown_rest.mean ? grown : grown_rest;
  const bool waist_pass = larger.mean >= w - 3.0 * larger.std_error;

  Report report;
  nlohmann::json res = {{"w", w},
                        {"modulus", modulus.label()},
                        {"threshold", q},
                        {"cap_mass", to_json(cap_mass)},
                        {"cap_neighborhood", to_json(grown)},
                        {"complement_neighborhood", to_json(grown_rest)},
                        {"waist_verdict", verdict(waist_pass)}};
  bool pass = waist_pass;
  std::ostringstream csv;
  csv << "eps,threshold,cap_mass,cap_neighborhood,complement_neighborhood,w,gm\n";
  double gm = 0.0;
  if (cap_mass.mean >= 0.5 && c.n >= 2) {
    gm = gromov_milman_bound(c.n, eps, modulus).value;
    const bool gm_pass = grown.mean >= gm - 3.0 * grown.std_error;
    res["gm"] = gm;
    res["gm_verdict"] = verdict(gm_pass);
    pass = pass && gm_pass;
  }
  res["verdict"] = verdict(pass);
  csv << format_double(eps) << ',' << format_double(q) << ',' << format_double(cap_mass.mean) << ','
      << format_double(grown.mean) << ',' << format_double(grown_rest.mean) << ',' << format_double(w) << ','
      << format_double(gm) << '\n';
  report.csv = csv.str();
  report.json["results"] = res;
  report.passed = pass;
  return report;
}

Report needle_report(const ExperimentConfig& c, const Norm& norm) {
  NeedleSuiteOptions opt;
  opt.trials = c.trials;
  opt.seed = c.seed;
  opt.n_max = std::max(2, c.n);
  if (c.eps || c.eps_grid) opt.eps_values = c.eps_values();
  opt.concavity_stride = 10;
  if (norm.kind() == NormKind::lp) opt.norms = {Norm::lp(norm.p(), 2)};
  else if (norm.kind() != NormKind::euclidean) throw ConfigError("needle-suite supports euclidean and lp norms");
  auto reports = run_needle_suite(opt);

  PolygonDensity tent;
  tent.vertices = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  tent.affine = {{1.0, 1.0, 0.0}, {-1.0, 1.0, 1.0}, {1.0, -1.0, 1.0}, {-1.0, -1.0, 2.0}};
  tent.m = 1;
  reports.push_back(prekopa_concavity_check(tent, 0.1, std::max<std::uint64_t>(1, c.trials / 10), c.seed));

  Report report;
  nlohmann::json arr = nlohmann::json::array();
  std::ostringstream csv;
  csv << "lemma,trials,violations,worst_margin,seed\n";
  for (const auto& r : reports) {
    arr.push_back(to_json(r));
    report.passed = report.passed && r.violations == 0;
    csv << r.lemma << ',' << r.trials << ',' << r.violations << ','
        << (std::isfinite(r.worst_margin) ? format_double(r.worst_margin) : "") << ',' << r.seed << '\n';
  }
  report.csv = csv.str();
  report.json["results"] = arr;
  return report;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands)
    if (cmd == c) return name;
  return "?";
}

Command parse_command(const std::string& text) {
  for (const auto& [cmd, name] : kCommands)
    if (name == text) return cmd;
  throw ConfigError("unknown command '" + text + "'");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

OutputFormat parse_format(const std::string& text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  throw ConfigError("format must be json or csv (got '" + text + "')");
}

GridSpec GridSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw ConfigError("grid must be lo:hi:step (got '" + text + "')");
  GridSpec g;
  try {
    g.lo = parse_double(parts[0]);
    g.hi = parse_double(parts[1]);
    g.step = parse_double(parts[2]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("grid '" + text + "': " + e.what());
  }
  if (!(g.step > 0.0) || !(g.hi >= g.lo)) throw ConfigError("grid needs hi >= lo and step > 0 (got '" + text + "')");
  if ((g.hi - g.lo) / g.step > 1e6) throw ConfigError("grid '" + text + "' has too many points");
  return g;
}

std::string GridSpec::to_string() const {
  return format_double(lo) + ":" + format_double(hi) + ":" + format_double(step);
}

std::vector<double> GridSpec::values() const {
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

void ExperimentConfig::validate() {
  if (norm.empty()) {
    if (n == 0 && command == Command::needle_suite) n = 8;
    if (n < 1) throw ConfigError("--n or --norm is required");
    norm = "euclidean:" + std::to_string(n + 1);
  }
  Norm parsed = Norm::euclidean(2);
  try {
    parsed = Norm::parse(norm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n == 0) n = parsed.dim() - 1;
  if (command != Command::needle_suite && n != parsed.dim() - 1)
    throw ConfigError("n must equal the norm dimension minus one (n=" + std::to_string(n) + ", norm " + norm + ")");
  if (command == Command::needle_suite && n < 2) throw ConfigError("needle-suite needs n >= 2");
  if (k < 1 || k > n) throw ConfigError("k must satisfy 1 <= k <= n");
  if (f_upper != "pi" && f_upper != "halfpi") throw ConfigError("--f-upper must be pi or halfpi");
  if (modulus != "analytic" && modulus != "numeric") throw ConfigError("--modulus must be analytic or numeric");
  if (samples < 1) throw ConfigError("--samples must be >= 1");
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  if (!(cap_mass > 0.0 && cap_mass < 1.0)) throw ConfigError("--cap-mass must be in (0, 1)");
  if (z_grid.values().size() > 10000) throw ConfigError("z grid too large");
  const bool needs_eps = command != Command::needle_suite;
  const bool single = command == Command::verify_waist || command == Command::verify_iso;
  if (single && !eps) throw ConfigError("--eps is required for " + waist::to_string(command));
  if (needs_eps && !eps && !eps_grid) throw ConfigError("--eps or --eps-grid is required");
  if (eps || eps_grid) {
    for (double e : eps_values())
      if (!(e > 0.0 && e <= 2.0)) throw ConfigError("eps values must lie in (0, 2] (got " + format_double(e) + ")");
  }
  if (command == Command::verify_iso && fiber_points == 0) fiber_points = 10'000;
}

std::vector<double> ExperimentConfig::eps_values() const {
  if (eps_grid) return eps_grid->values();
  if (eps) return {*eps};
  return {};
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = to_string(c.command);
  j["norm"] = c.norm;
  j["n"] = c.n;
  j["k"] = c.k;
  j["eps"] = c.eps ? nlohmann::json(*c.eps) : nlohmann::json(nullptr);
  j["eps_grid"] = c.eps_grid ? nlohmann::json(c.eps_grid->to_string()) : nlohmann::json(nullptr);
  j["samples"] = c.samples;
  j["fiber_points"] = c.fiber_points;
  j["z_grid"] = c.z_grid.to_string();
  j["seed"] = c.seed;
  j["f_upper"] = c.f_upper;
  j["modulus"] = c.modulus;
  j["modulus_budget"] = c.modulus_budget;
  j["cap_mass"] = c.cap_mass;
  j["trials"] = c.trials;
  j["out"] = c.out;
  j["format"] = to_string(c.format);
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known{"command", "norm", "n", "k", "eps", "eps_grid", "samples",
                                              "fiber_points", "z_grid", "seed", "f_upper", "modulus",
                                              "modulus_budget", "cap_mass", "trials", "out", "format"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key '" + key + "'");
  ExperimentConfig c;
  try {
    if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("norm")) c.norm = j.at("norm").get<std::string>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("eps") && !j.at("eps").is_null()) c.eps = j.at("eps").get<double>();
    if (j.contains("eps_grid") && !j.at("eps_grid").is_null())
      c.eps_grid = GridSpec::parse(j.at("eps_grid").get<std::string>());
    if (j.contains("samples")) c.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("fiber_points")) c.fiber_points = j.at("fiber_points").get<std::uint64_t>();
    if (j.contains("z_grid")) c.z_grid = GridSpec::parse(j.at("z_grid").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("f_upper")) c.f_upper = j.at("f_upper").get<std::string>();
    if (j.contains("modulus")) c.modulus = j.at("modulus").get<std::string>();
    if (j.contains("modulus_budget")) c.modulus_budget = j.at("modulus_budget").get<std::uint64_t>();
    if (j.contains("cap_mass")) c.cap_mass = j.at("cap_mass").get<double>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

Report run_experiment(ExperimentConfig config) {
  config.validate();
  const Norm norm = Norm::parse(config.norm);
  Report report;
  switch (config.command) {
    case Command::bound: report = bound_report(config, norm, false); break;
    case Command::compare: report = bound_report(config, norm, true); break;
    case Command::modulus: report = modulus_report(config, norm); break;
    case Command::verify_waist: report = verify_waist_report(config, norm); break;
    case Command::verify_iso: report = verify_iso_report(config, norm); break;
    case Command::needle_suite: report = needle_report(config, norm); break;
  }
  nlohmann::json head = {{"version", kVersion}, {"command", to_string(config.command)}, {"config", to_json(config)}};
  head["results"] = std::move(report.json["results"]);
  head["passed"] = report.passed;
  report.json = std::move(head);
  return report;
}

std::string render(const Report& report, OutputFormat format) {
  if (format == OutputFormat::csv) return report.csv;
  return report.json.dump(2) + "\n";
}

void emit_report(const Report& report, const std::string& path, OutputFormat format) {
  const std::string text = render(report, format);
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace waist
