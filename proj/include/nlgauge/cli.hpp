#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nlgauge/dynamics.hpp"
#include "nlgauge/gauge.hpp"
#include "nlgauge/grid.hpp"

namespace nlgauge::cli {

inline constexpr std::string_view kToolName = "nlgauge";
inline constexpr std::string_view kToolVersion = "0.1.0";

enum ExitStatus : int {
  kOk = 0,
  kConfigFailure = 2,
  kNumericalFailure = 3,
  kInvariantFailure = 4,
};

struct GridBlock {
  int dimension = 1;
  int n = 0;
  double length = 0.0;
};

struct GaugeBlock {
  double gamma = 0.0;
  double lambda = 1.0;
  double theta_const = 0.0;
};

/// Named initial-state preset with every parameter resolved (defaults filled
/// in from the grid).
struct StateBlock {
  std::string preset;
  std::map<std::string, double> params;
};

struct PotentialBlock {
  std::string type = "none";
  double omega = 1.0;
  double center = 0.0;
  /// Absolute path for type "file".
  std::string path;
};

struct RunBlock {
  double dt = 0.0;
  double t_final = 0.0;
  int output_every = 1;
  double rho_floor_rel = 1e-12;
  std::uint64_t seed = 0;
  bool force_dt = false;
};

/// Fully resolved experiment description. Echoed verbatim in manifest.json.
struct ExperimentConfig {
  std::string experiment;
  GridBlock grid;
  std::optional<NLSECoefficients> coefficients;
  std::optional<GaugeBlock> gauge;
  std::optional<StateBlock> initial_state;
  std::optional<StateBlock> initial_state_y;
  PotentialBlock potential;
  RunBlock run;
  /// Rotation angle between the two decompositions (mixprobe only).
  double mixprobe_angle = 0.0;
};

/// Validates a config document and fills in defaults. A manifest written by
/// a previous run is accepted too; its "config" member is used. Relative
/// potential file paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig resolve_config(const nlohmann::json& doc, bool force_dt,
                                const std::filesystem::path& base_dir = {});

nlohmann::json to_json(const ExperimentConfig& config);

/// Output of one experiment held in memory until it is written out.
struct ExperimentOutput {
  /// File name -> contents.
  std::map<std::string, std::string> files;
  nlohmann::json diagnostics = nlohmann::json::object();
};

/// Builds the grid, states and potential, then runs the experiment. Throws
/// ConfigError, NumericalError or InvariantError.
ExperimentOutput execute(const ExperimentConfig& config);

nlohmann::json make_manifest(const ExperimentConfig& config, const ExperimentOutput& output);

/// Reads `config_path`, runs it and writes CSV files plus manifest.json to
/// `out_dir`. Nothing is written unless the experiment succeeds. Failures
/// print one line to `err` of the form
///   error kind=<config|numerical|invariant> message="..."
/// and return the matching exit status.
int run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
        bool force_dt, std::ostream& err);

/// Sorted listing of initial-state and potential presets with parameters and
/// defaults, one per line.
std::string list_presets();

/// Samples a resolved initial-state preset on `grid`, normalized.
ComplexField make_state(const StateBlock& state, const Grid& grid, std::uint64_t seed);

}  // namespace nlgauge::cli
