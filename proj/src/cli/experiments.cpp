#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nlgauge/cli.hpp"
#include "nlgauge/ensembles.hpp"
#include "nlgauge/equivalence.hpp"
#include "nlgauge/errors.hpp"

namespace nlgauge::cli {

using nlohmann::json;

namespace {

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

template <class... Values>
void row(std::string& out, Values... values) {
  bool first = true;
  ((out += first ? "" : ",", put(out, values), first = false), ...);
  out += '\n';
}

std::string series_csv(const std::vector<SeriesPoint>& series) {
  std::string out = "t,value\n";
  for (const auto& p : series) row(out, p.t, p.value);
  return out;
}

std::string frames_csv(const Trajectory& traj) {
  const Grid& grid = traj.frames.front().psi.grid();
  const int n = grid.points_per_axis();
  std::string out = grid.dimension() == 1 ? "t,x,re,im,rho\n" : "t,x,y,re,im,rho\n";
  for (const auto& f : traj.frames) {
    if (grid.dimension() == 1) {
      for (int i = 0; i < n; ++i) {
        const Complex v = f.psi[i];
        row(out, f.t, grid.coordinate(i), v.real(), v.imag(), std::norm(v));
      }
    } else {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const Complex v = f.psi.at(i, j);
          row(out, f.t, grid.coordinate(i), grid.coordinate(j), v.real(), v.imag(), std::norm(v));
        }
      }
    }
  }
  return out;
}

Potential build_potential(const PotentialBlock& p, const Grid& grid) {
  if (p.type == "none") return Potential::zero(grid);
  if (p.type == "harmonic") {
    const double k = 0.5 * p.omega * p.omega;
    if (grid.dimension() == 1) {
      return {sample<double>(grid, [&](double x) { return k * (x - p.center) * (x - p.center); })};
    }
    return {sample<double>(grid, [&](double x, double y) {
      return k * ((x - p.center) * (x - p.center) + (y - p.center) * (y - p.center));
    })};
  }
  std::ifstream in(p.path);
  if (!in) throw ConfigError("cannot read potential file " + p.path);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (!in.eof()) throw ConfigError("potential file " + p.path + " has a non-numeric entry");
  if (values.size() != grid.size()) {
    std::ostringstream msg;
    msg << "potential file " << p.path << " has " << values.size() << " values, grid needs "
        << grid.size();
    throw ConfigError(msg.str());
  }
  RealField field(grid, std::move(values));
  if (!all_finite(field)) throw ConfigError("potential file " + p.path + " has non-finite values");
  return {std::move(field)};
}

SimulationConfig simulation(const ExperimentConfig& cfg) {
  SimulationConfig sim;
  sim.dt = cfg.run.dt;
  sim.t_final = cfg.run.t_final;
  sim.output_every = cfg.run.output_every;
  sim.policy.rho_floor_rel = cfg.run.rho_floor_rel;
  sim.force_dt = cfg.run.force_dt;
  return sim;
}

json trajectory_diagnostics(const Trajectory& traj) {
  return {{"norm_drift", traj.max_norm_drift()},
          {"max_regularized_fraction", traj.max_regularized_fraction()},
          {"frames", traj.frames.size()},
          {"final_time", traj.final().t}};
}

double series_sup(const std::vector<SeriesPoint>& s) {
  double m = 0.0;
  for (const auto& p : s) m = std::max(m, p.value);
  return m;
}

ExperimentOutput run_evolve(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const ComplexField psi0 = make_state(*cfg.initial_state, grid, cfg.run.seed);
  const Potential v = build_potential(cfg.potential, grid);
  const SimulationConfig sim = simulation(cfg);
  sim.validate(grid, c);
  const Trajectory traj = evolve(c, v, psi0, sim);
  ExperimentOutput out;
  out.files["frames.csv"] = frames_csv(traj);
  out.diagnostics = trajectory_diagnostics(traj);
  out.diagnostics["stability_bound"] = SimulationConfig::stability_bound(grid, c);
  return out;
}

ExperimentOutput run_gauge_check(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const GaugeTransform g(cfg.gauge->gamma, cfg.gauge->lambda, cfg.gauge->theta_const);
  const ComplexField psi0 = make_state(*cfg.initial_state, grid, cfg.run.seed);
  const Potential v = build_potential(cfg.potential, grid);
  const SimulationConfig sim = simulation(cfg);
  sim.validate(grid, c);
  const Trajectory traj = evolve(c, v, psi0, sim);

  std::vector<SeriesPoint> series;
  double worst_relative = 0.0;
  std::size_t regularized = 0;
  for (const auto& f : traj.frames) {
    const GaugedField gauged = apply_gauge(g, f.psi, sim.policy, f.phase_anchor);
    regularized = std::max(regularized, gauged.regularized_points);
    double dev = 0.0, rho_max = 0.0;
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
      const double rho = std::norm(f.psi[i]);
      dev = std::max(dev, std::abs(std::norm(gauged.field[i]) - rho));
      rho_max = std::max(rho_max, rho);
    }
    series.push_back({f.t, dev});
    if (rho_max > 0.0) worst_relative = std::max(worst_relative, dev / rho_max);
  }
  ExperimentOutput out;
  out.files["series.csv"] = series_csv(series);
  out.diagnostics = trajectory_diagnostics(traj);
  out.diagnostics["max_density_deviation"] = series_sup(series);
  out.diagnostics["max_relative_density_deviation"] = worst_relative;
  out.diagnostics["max_gauge_regularized_points"] = regularized;
  return out;
}

ExperimentOutput run_equivalence(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const GaugeTransform g(cfg.gauge->gamma, cfg.gauge->lambda);
  const NLSECoefficients pushed = push_forward_family(g, c);
  const ComplexField psi0 = make_state(*cfg.initial_state, grid, cfg.run.seed);
  const Potential v = build_potential(cfg.potential, grid);
  const SimulationConfig sim = simulation(cfg);
  sim.validate(grid, c);
  sim.validate(grid, pushed);
  const EquivalenceReport report = commuting_residual(g, c, psi0, v, sim);

  ExperimentOutput out;
  out.files["series.csv"] = series_csv(report.residual_series);
  json coeffs = json::object();
  const auto values = pushed.as_array();
  for (std::size_t i = 0; i < values.size(); ++i) {
    coeffs[std::string(NLSECoefficients::names[i])] = values[i];
  }
  out.diagnostics = {{"residual_sup", report.residual_sup},
                     {"refined_residual_sup", report.refined_residual_sup},
                     {"refinement_order", report.refinement_order},
                     {"density_sup", report.density_sup},
                     {"max_regularized_fraction", report.max_regularized_fraction},
                     {"near_node", report.near_node()},
                     {"pushed_coefficients", coeffs}};
  return out;
}

ExperimentOutput run_separability(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const Grid axis = grid.with_dimension(1);
  const ComplexField psi1 = make_state(*cfg.initial_state, axis, cfg.run.seed);
  const ComplexField psi2 =
      make_state(cfg.initial_state_y ? *cfg.initial_state_y : *cfg.initial_state, axis,
                 cfg.run.seed + 1);
  const Potential v = build_potential(cfg.potential, axis);
  const SimulationConfig sim = simulation(cfg);
  sim.validate(axis, c);
  const SeparabilityReport report = separability_residual(c, v, v, psi1, psi2, sim);

  ExperimentOutput out;
  out.files["series.csv"] = series_csv(report.residual);
  out.diagnostics = {{"residual_sup", report.residual_sup()},
                     {"marginal_density_sup", report.marginal_density_sup}};
  return out;
}

ExperimentOutput run_mixprobe(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const auto& p = cfg.initial_state->params;
  const auto [a, b] = two_gaussian_pair(grid, p.at("separation"), p.at("width"));
  const auto [first, second] = equivalent_decompositions(a, b, cfg.mixprobe_angle);
  const Potential v = build_potential(cfg.potential, grid);
  const SimulationConfig sim = simulation(cfg);
  sim.validate(grid, c);
  const std::vector<SeriesPoint> series = mixed_divergence(c, v, first, second, sim);

  ExperimentOutput out;
  out.files["series.csv"] = series_csv(series);
  out.diagnostics = {{"peak_divergence", series_sup(series)},
                     {"final_divergence", series.back().value}};
  return out;
}

ExperimentOutput run_convergence(const ExperimentConfig& cfg, const Grid& grid) {
  const NLSECoefficients& c = *cfg.coefficients;
  const ComplexField psi0 = make_state(*cfg.initial_state, grid, cfg.run.seed);
  const Potential v = build_potential(cfg.potential, grid);
  SimulationConfig sim = simulation(cfg);
  sim.validate(grid, c);
  sim.output_every = INT_MAX;

  std::vector<ComplexField> finals;
  std::vector<double> steps;
  double worst_drift = 0.0;
  for (int k = 0; k < 3; ++k) {
    SimulationConfig level = sim;
    level.dt = cfg.run.dt / std::pow(2.0, k);
    const Trajectory traj = evolve(c, v, psi0, level);
    worst_drift = std::max(worst_drift, traj.max_norm_drift());
    finals.push_back(traj.final().psi);
    steps.push_back(level.dt);
  }
  const double e1 = l2_distance(finals[0], finals[1]);
  const double e2 = l2_distance(finals[1], finals[2]);
  const double order = std::log2(e1 / e2);

  ExperimentOutput out;
  std::string csv = "dt,error,observed_order\n";
  row(csv, steps[0], e1, std::nan(""));
  row(csv, steps[1], e2, order);
  out.files["convergence.csv"] = csv;
  out.diagnostics = {{"observed_order", order}, {"norm_drift", worst_drift}};
  return out;
}

std::string one_line(std::string text) {
  for (auto& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return text;
}

int report(std::ostream& err, const char* kind, const std::string& message, int status) {
  err << "error kind=" << kind << " message=\"" << one_line(message) << "\"\n";
  return status;
}

}  // namespace

ExperimentOutput execute(const ExperimentConfig& cfg) {
  const Grid grid = Grid::make(cfg.grid.dimension, cfg.grid.n, cfg.grid.length);
  if (cfg.experiment == "evolve") return run_evolve(cfg, grid);
  if (cfg.experiment == "gauge-check") return run_gauge_check(cfg, grid);
  if (cfg.experiment == "equivalence") return run_equivalence(cfg, grid);
  if (cfg.experiment == "separability") return run_separability(cfg, grid);
  if (cfg.experiment == "mixprobe") return run_mixprobe(cfg, grid);
  if (cfg.experiment == "convergence") return run_convergence(cfg, grid);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

json make_manifest(const ExperimentConfig& cfg, const ExperimentOutput& output) {
  const Grid grid = Grid::make(cfg.grid.dimension, cfg.grid.n, cfg.grid.length);
  json files = json::array();
  for (const auto& [name, contents] : output.files) files.push_back(name);
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"config", to_json(cfg)},
          {"grid",
           {{"dimension", grid.dimension()},
            {"n", grid.points_per_axis()},
            {"length", grid.length()},
            {"spacing", grid.spacing()},
            {"points", grid.size()}}},
          {"outputs", files},
          {"diagnostics", output.diagnostics}};
}

int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        bool force_dt, std::ostream& err) {
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file " + config_path.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    const ExperimentConfig cfg = resolve_config(doc, force_dt, config_path.parent_path());
    const ExperimentOutput output = execute(cfg);

    std::filesystem::create_directories(out_dir);
    for (const auto& [name, contents] : output.files) {
      std::ofstream file(out_dir / name, std::ios::binary);
      file << contents;
      if (!file) throw ConfigError("cannot write " + (out_dir / name).string());
    }
    std::ofstream manifest(out_dir / "manifest.json", std::ios::binary);
    manifest << make_manifest(cfg, output).dump(2) << '\n';
    if (!manifest) throw ConfigError("cannot write manifest.json");
    return kOk;
  } catch (const ConfigError& e) {
    return report(err, "config", e.what(), kConfigFailure);
  } catch (const NumericalError& e) {
    return report(err, "numerical", e.what(), kNumericalFailure);
  } catch (const InvariantError& e) {
    return report(err, "invariant", e.what(), kInvariantFailure);
  } catch (const std::invalid_argument& e) {
    return report(err, "config", e.what(), kConfigFailure);
  } catch (const std::filesystem::filesystem_error& e) {
    return report(err, "config", e.what(), kConfigFailure);
  } catch (const std::exception& e) {
    return report(err, "numerical", e.what(), kNumericalFailure);
  }
}

}  // namespace nlgauge::cli
