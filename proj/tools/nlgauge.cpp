#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nlgauge/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear gauge family experiments"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool force_dt = false;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config or manifest");
  run->add_option("config", config, "Config or manifest.json path")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--force-dt", force_dt, "Allow dt above the stability bound");

  app.add_subcommand("presets", "List initial-state and potential presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error kind=usage message=\"" << e.what() << "\"\n";
    return nlgauge::cli::kConfigFailure;
  }

  if (*run) return nlgauge::cli::run(config, out_dir, force_dt, std::cerr);
  std::cout << nlgauge::cli::list_presets();
  return nlgauge::cli::kOk;
}
