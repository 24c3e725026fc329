#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "nlgauge/cli.hpp"
#include "nlgauge/ensembles.hpp"
#include "nlgauge/errors.hpp"

namespace nlgauge::cli {

using nlohmann::json;

namespace {

struct PresetParam {
  std::string_view name;
  std::string_view default_text;
  // Default value for a box of length L and n points per axis.
  double (*fallback)(double length, int n);
};

struct Preset {
  std::string_view kind;
  std::string_view name;
  std::vector<PresetParam> params;
};

const std::vector<Preset>& state_presets() {
  static const std::vector<Preset> presets{
      {"initial-state",
       "gaussian",
       {{"center", "L/2", [](double l, int) { return 0.5 * l; }},
        {"width", "1", [](double, int) { return 1.0; }},
        {"momentum", "0", [](double, int) { return 0.0; }}}},
      {"initial-state",
       "periodic-gaussian",
       {{"center", "L/2", [](double l, int) { return 0.5 * l; }},
        {"width", "1", [](double, int) { return 1.0; }},
        {"mode", "0", [](double, int) { return 0.0; }}}},
      {"initial-state", "plane-wave", {{"mode", "1", [](double, int) { return 1.0; }}}},
      {"initial-state",
       "random",
       {{"modes", "4", [](double, int) { return 4.0; }},
        {"amplitude", "0.3", [](double, int) { return 0.3; }}}},
      {"initial-state",
       "two-gaussian",
       {{"separation", "L/4", [](double l, int) { return 0.25 * l; }},
        {"width", "L/32", [](double l, int) { return l / 32.0; }}}},
  };
  return presets;
}

const std::vector<Preset>& potential_presets() {
  static const std::vector<Preset> presets{
      {"potential", "none", {}},
      {"potential",
       "harmonic",
       {{"omega", "1", nullptr}, {"center", "L/2", nullptr}}},
      {"potential", "file", {{"path", "required", nullptr}}},
  };
  return presets;
}

const Preset* find_state_preset(const std::string& name) {
  for (const auto& p : state_presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

[[noreturn]] void fail(const std::string& message) { throw ConfigError(message); }

std::string where(std::string_view block, std::string_view key) {
  return std::string(block) + "." + std::string(key);
}

void reject_unknown(const json& obj, std::string_view block,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail("unknown key " + where(block, key));
    }
  }
}

const json* block(const json& doc, std::string_view key) {
  auto it = doc.find(std::string(key));
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) fail(std::string(key) + " must be an object");
  return &*it;
}

const json& required_block(const json& doc, std::string_view key, const std::string& experiment) {
  const json* b = block(doc, key);
  if (!b) fail("missing " + std::string(key) + " block for experiment " + experiment);
  return *b;
}

double number(const json& obj, std::string_view blk, std::string_view key,
              std::optional<double> fallback = std::nullopt) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    if (!fallback) fail("missing " + where(blk, key));
    return *fallback;
  }
  if (!it->is_number()) fail(where(blk, key) + " must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) fail(where(blk, key) + " must be finite");
  return v;
}

long long integer(const json& obj, std::string_view blk, std::string_view key,
                  std::optional<long long> fallback = std::nullopt) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    if (!fallback) fail("missing " + where(blk, key));
    return *fallback;
  }
  if (!it->is_number_integer()) fail(where(blk, key) + " must be an integer");
  return it->get<long long>();
}

GridBlock parse_grid(const json& g) {
  reject_unknown(g, "grid", {"dimension", "n", "length"});
  GridBlock out;
  out.dimension = static_cast<int>(integer(g, "grid", "dimension", 1));
  out.n = static_cast<int>(integer(g, "grid", "n"));
  out.length = number(g, "grid", "length");
  Grid::make(out.dimension, out.n, out.length);
  return out;
}

NLSECoefficients parse_coefficients(const json& c) {
  std::array<double, 10> values = NLSECoefficients().as_array();
  for (const auto& [key, value] : c.items()) {
    const auto& names = NLSECoefficients::names;
    if (std::find(names.begin(), names.end(), key) == names.end()) {
      fail("unknown key " + where("coefficients", key));
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = number(c, "coefficients", NLSECoefficients::names[i], values[i]);
  }
  return NLSECoefficients::from_array(values);
}

GaugeBlock parse_gauge(const json& g) {
  reject_unknown(g, "gauge", {"gamma", "lambda", "theta_const"});
  GaugeBlock out;
  out.gamma = number(g, "gauge", "gamma");
  out.lambda = number(g, "gauge", "lambda");
  out.theta_const = number(g, "gauge", "theta_const", 0.0);
  if (out.lambda == 0.0) fail("gauge.lambda must be nonzero");
  return out;
}

StateBlock parse_state(const json& s, std::string_view blk, const GridBlock& grid) {
  auto it = s.find("preset");
  if (it == s.end() || !it->is_string()) fail(where(blk, "preset") + " must be a preset name");
  StateBlock out;
  out.preset = it->get<std::string>();
  const Preset* preset = find_state_preset(out.preset);
  if (!preset) fail("unknown initial-state preset '" + out.preset + "'");
  for (const auto& [key, value] : s.items()) {
    if (key == "preset") continue;
    const bool known = std::any_of(preset->params.begin(), preset->params.end(),
                                   [&](const PresetParam& p) { return p.name == key; });
    if (!known) fail("unknown parameter " + where(blk, key) + " for preset " + out.preset);
  }
  for (const auto& p : preset->params) {
    out.params[std::string(p.name)] = number(s, blk, p.name, p.fallback(grid.length, grid.n));
  }
  auto positive = [&](const char* key) {
    if (!(out.params.at(key) > 0.0)) fail(where(blk, key) + " must be positive");
  };
  auto whole = [&](const char* key) {
    if (out.params.at(key) != std::round(out.params.at(key))) {
      fail(where(blk, key) + " must be a whole number");
    }
  };
  if (out.preset == "gaussian" || out.preset == "periodic-gaussian") positive("width");
  if (out.preset == "periodic-gaussian" || out.preset == "plane-wave") whole("mode");
  if (out.preset == "two-gaussian") {
    positive("width");
    positive("separation");
    if (out.params.at("separation") >= grid.length) fail(where(blk, "separation") + " exceeds L");
  }
  if (out.preset == "random") {
    whole("modes");
    const double modes = out.params.at("modes");
    if (modes < 1 || modes >= grid.n / 2) fail(where(blk, "modes") + " must be in [1, n/2)");
    if (out.params.at("amplitude") < 0.0) fail(where(blk, "amplitude") + " must be >= 0");
  }
  return out;
}

PotentialBlock parse_potential(const json* p, const GridBlock& grid,
                               const std::filesystem::path& base_dir) {
  PotentialBlock out;
  out.center = 0.5 * grid.length;
  if (!p) return out;
  auto it = p->find("type");
  if (it == p->end() || !it->is_string()) fail("potential.type must be a string");
  out.type = it->get<std::string>();
  if (out.type == "none") {
    reject_unknown(*p, "potential", {"type"});
  } else if (out.type == "harmonic") {
    reject_unknown(*p, "potential", {"type", "omega", "center"});
    out.omega = number(*p, "potential", "omega", 1.0);
    out.center = number(*p, "potential", "center", out.center);
  } else if (out.type == "file") {
    reject_unknown(*p, "potential", {"type", "path"});
    auto path = p->find("path");
    if (path == p->end() || !path->is_string()) fail("potential.path must be a string");
    std::filesystem::path file = path->get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    out.path = std::filesystem::absolute(file).lexically_normal().string();
  } else {
    fail("unknown potential type '" + out.type + "'");
  }
  return out;
}

RunBlock parse_run(const json& r, bool force_dt) {
  reject_unknown(r, "run", {"dt", "t_final", "output_every", "rho_floor_rel", "seed", "force_dt"});
  RunBlock out;
  out.dt = number(r, "run", "dt");
  out.t_final = number(r, "run", "t_final");
  out.output_every = static_cast<int>(integer(r, "run", "output_every", 1));
  out.rho_floor_rel = number(r, "run", "rho_floor_rel", 1e-12);
  const long long seed = integer(r, "run", "seed", 0);
  if (seed < 0) fail("run.seed must be non-negative");
  out.seed = static_cast<std::uint64_t>(seed);
  bool config_force = false;
  if (auto it = r.find("force_dt"); it != r.end()) {
    if (!it->is_boolean()) fail("run.force_dt must be a boolean");
    config_force = it->get<bool>();
  }
  out.force_dt = force_dt || config_force;
  if (!(out.dt > 0.0)) fail("run.dt must be positive");
  if (!(out.t_final > 0.0)) fail("run.t_final must be positive");
  if (out.output_every < 1) fail("run.output_every must be at least 1");
  RegularizationPolicy{out.rho_floor_rel}.validate();
  return out;
}

constexpr std::string_view kExperiments[] = {"convergence",  "equivalence", "evolve",
                                             "gauge-check", "mixprobe",    "separability"};

ExperimentConfig resolve_checked(const json& input, bool force_dt,
                                 const std::filesystem::path& base_dir) {
  const json* doc = &input;
  if (!doc->is_object()) fail("config must be a JSON object");
  if (doc->contains("tool") && doc->contains("config")) doc = &(*doc)["config"];
  if (!doc->is_object()) fail("manifest config must be a JSON object");
  reject_unknown(*doc, "config",
                 {"experiment", "grid", "coefficients", "gauge", "initial_state",
                  "initial_state_y", "potential", "run", "mixprobe"});

  ExperimentConfig cfg;
  auto exp = doc->find("experiment");
  if (exp == doc->end() || !exp->is_string()) fail("missing experiment name");
  cfg.experiment = exp->get<std::string>();
  if (std::find(std::begin(kExperiments), std::end(kExperiments), cfg.experiment) ==
      std::end(kExperiments)) {
    fail("unknown experiment '" + cfg.experiment + "'");
  }
  const std::string& e = cfg.experiment;

  cfg.grid = parse_grid(required_block(*doc, "grid", e));
  cfg.run = parse_run(required_block(*doc, "run", e), force_dt);
  cfg.potential = parse_potential(block(*doc, "potential"), cfg.grid, base_dir);

  const bool needs_coefficients = e != "gauge-check";
  if (const json* c = block(*doc, "coefficients")) {
    cfg.coefficients = parse_coefficients(*c);
  } else if (needs_coefficients) {
    fail("missing coefficients block for experiment " + e);
  } else {
    cfg.coefficients = NLSECoefficients::linear();
  }

  if (e == "gauge-check" || e == "equivalence") {
    cfg.gauge = parse_gauge(required_block(*doc, "gauge", e));
  } else if (block(*doc, "gauge")) {
    fail("gauge block is not used by experiment " + e);
  }

  if (const json* s = block(*doc, "initial_state")) {
    cfg.initial_state = parse_state(*s, "initial_state", cfg.grid);
  } else if (e == "gauge-check") {
    cfg.initial_state = parse_state(json{{"preset", "random"}}, "initial_state", cfg.grid);
  } else if (e == "mixprobe") {
    cfg.initial_state = parse_state(json{{"preset", "two-gaussian"}}, "initial_state", cfg.grid);
  } else {
    fail("missing initial_state block for experiment " + e);
  }

  if (const json* s = block(*doc, "initial_state_y")) {
    if (e != "separability") fail("initial_state_y is only used by separability");
    cfg.initial_state_y = parse_state(*s, "initial_state_y", cfg.grid);
  }

  if (e == "mixprobe") {
    cfg.mixprobe_angle = std::numbers::pi / 4.0;
    if (const json* m = block(*doc, "mixprobe")) {
      reject_unknown(*m, "mixprobe", {"angle"});
      cfg.mixprobe_angle = number(*m, "mixprobe", "angle", cfg.mixprobe_angle);
    }
    if (cfg.initial_state->preset != "two-gaussian") {
      fail("mixprobe needs the two-gaussian initial state");
    }
    if (cfg.grid.dimension != 1) fail("mixprobe needs a 1D grid");
  } else if (block(*doc, "mixprobe")) {
    fail("mixprobe block is not used by experiment " + e);
  }

  if (e == "separability" && cfg.grid.dimension != 2) fail("separability needs a 2D grid");
  if (e == "equivalence" && cfg.gauge->theta_const != 0.0) {
    fail("equivalence supports theta_const = 0 only");
  }
  return cfg;
}

json state_json(const StateBlock& s) {
  json out{{"preset", s.preset}};
  for (const auto& [k, v] : s.params) out[k] = v;
  return out;
}

void append_line(std::vector<std::string>& lines, const Preset& p) {
  std::ostringstream line;
  line << p.kind << ' ' << p.name << '(';
  for (std::size_t i = 0; i < p.params.size(); ++i) line << (i ? ", " : "") << p.params[i].name;
  line << ')';
  if (!p.params.empty()) {
    line << "  defaults:";
    for (std::size_t i = 0; i < p.params.size(); ++i) {
      line << (i ? ", " : " ") << p.params[i].name << '=' << p.params[i].default_text;
    }
  }
  lines.push_back(line.str());
}

ComplexField sample_axis(const StateBlock& s, const Grid& grid, std::mt19937_64& rng) {
  const double length = grid.length();
  const auto& p = s.params;
  if (s.preset == "gaussian") {
    const double c = p.at("center"), w = p.at("width"), k = p.at("momentum");
    return sample<Complex>(grid, [&](double x) {
      const double d = (x - c) / w;
      return std::exp(-0.5 * d * d) * std::polar(1.0, k * x);
    });
  }
  if (s.preset == "periodic-gaussian") {
    const double c = p.at("center"), w = p.at("width");
    const double a = std::pow(length / (2.0 * std::numbers::pi * w), 2);
    const double k = 2.0 * std::numbers::pi * p.at("mode") / length;
    return sample<Complex>(grid, [&](double x) {
      return std::exp(a * (std::cos(2.0 * std::numbers::pi * (x - c) / length) - 1.0)) *
             std::polar(1.0, k * x);
    });
  }
  if (s.preset == "plane-wave") {
    const double k = 2.0 * std::numbers::pi * p.at("mode") / length;
    return sample<Complex>(grid, [&](double x) { return std::polar(1.0, k * x); });
  }
  if (s.preset == "two-gaussian") {
    auto [a, b] = two_gaussian_pair(grid, p.at("separation"), p.at("width"));
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
  }
  // random: exp of a few low Fourier modes with complex coefficients, so the
  // modulus never vanishes.
  const int modes = static_cast<int>(p.at("modes"));
  const double amp = p.at("amplitude");
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<Complex> cos_coef(modes), sin_coef(modes);
  for (int m = 0; m < modes; ++m) {
    cos_coef[m] = {u(rng), u(rng)};
    sin_coef[m] = {u(rng), u(rng)};
  }
  return sample<Complex>(grid, [&](double x) {
    Complex exponent = 0.0;
    for (int m = 0; m < modes; ++m) {
      const double arg = 2.0 * std::numbers::pi * (m + 1) * x / length;
      exponent += cos_coef[m] * std::cos(arg) + sin_coef[m] * std::sin(arg);
    }
    return std::exp(exponent);
  });
}

}  // namespace

ExperimentConfig resolve_config(const json& doc, bool force_dt,
                                const std::filesystem::path& base_dir) {
  try {
    return resolve_checked(doc, force_dt, base_dir);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const ExperimentConfig& cfg) {
  json out;
  out["experiment"] = cfg.experiment;
  out["grid"] = {{"dimension", cfg.grid.dimension}, {"n", cfg.grid.n}, {"length", cfg.grid.length}};
  if (cfg.coefficients) {
    json c = json::object();
    const auto values = cfg.coefficients->as_array();
    for (std::size_t i = 0; i < values.size(); ++i) {
      c[std::string(NLSECoefficients::names[i])] = values[i];
    }
    out["coefficients"] = c;
  }
  if (cfg.gauge) {
    out["gauge"] = {{"gamma", cfg.gauge->gamma},
                    {"lambda", cfg.gauge->lambda},
                    {"theta_const", cfg.gauge->theta_const}};
  }
  if (cfg.initial_state) out["initial_state"] = state_json(*cfg.initial_state);
  if (cfg.initial_state_y) out["initial_state_y"] = state_json(*cfg.initial_state_y);
  json pot{{"type", cfg.potential.type}};
  if (cfg.potential.type == "harmonic") {
    pot["omega"] = cfg.potential.omega;
    pot["center"] = cfg.potential.center;
  } else if (cfg.potential.type == "file") {
    pot["path"] = cfg.potential.path;
  }
  out["potential"] = pot;
  out["run"] = {{"dt", cfg.run.dt},
                {"t_final", cfg.run.t_final},
                {"output_every", cfg.run.output_every},
                {"rho_floor_rel", cfg.run.rho_floor_rel},
                {"seed", cfg.run.seed},
                {"force_dt", cfg.run.force_dt}};
  if (cfg.experiment == "mixprobe") out["mixprobe"] = {{"angle", cfg.mixprobe_angle}};
  return out;
}

std::string list_presets() {
  std::vector<std::string> lines;
  for (const auto& p : state_presets()) append_line(lines, p);
  for (const auto& p : potential_presets()) append_line(lines, p);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

ComplexField make_state(const StateBlock& state, const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Grid axis = grid.with_dimension(1);
  ComplexField psi = sample_axis(state, axis, rng);
  if (grid.dimension() == 2) psi = tensor_product(psi, sample_axis(state, axis, rng));
  const double norm = l2_norm(psi);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ConfigError("initial state has zero norm");
  for (auto& v : psi) v /= norm;
  return psi;
}

}  // namespace nlgauge::cli
