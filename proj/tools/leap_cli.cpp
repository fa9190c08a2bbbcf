// Command-line front end for the LeAP pipeline: synthesize a network
// snapshot, derive measurement statistics, compute power-control parameters
// with the stochastic or certainty-equivalent solver, score against the
// fixed-alpha FPC baseline, and sweep design parameters.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "leap/baseline.hpp"
#include "leap/evaluate.hpp"
#include "leap/io.hpp"
#include "leap/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

leap::RunConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return leap::RunConfig{};
  return leap::parse_run_config(leap::io::read_file(config_path));
}

fs::path artifacts_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("LEAP_ARTIFACTS")) return env;
  return "artifacts";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LeAP uplink power-control pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::string artifacts_flag;
  int jobs = 1;
  app.add_option("--config", config_path, "run configuration (JSON)");
  app.add_option("--artifacts", artifacts_flag,
                 "artifact directory (default $LEAP_ARTIFACTS or ./artifacts)");
  app.add_option("--jobs", jobs, "parallel sweep grid points");

  auto* gen = app.add_subcommand("generate", "synthesize a network snapshot");
  double area_km2 = -1;
  int macros = -1, picos = -1;
  double density = -1;
  std::int64_t seed_flag = -1;
  gen->add_option("--area-km2", area_km2);
  gen->add_option("--macros", macros);
  gen->add_option("--picos", picos);
  gen->add_option("--density", density);
  gen->add_option("--seed", seed_flag);

  auto* measure = app.add_subcommand("measure", "build measurement statistics");
  double bin_size = -1;
  measure->add_option("--bin-size-db", bin_size, "histogram bin size (default 1 dB)");

  auto* solve = app.add_subcommand("solve", "compute power-control parameters");
  std::string algorithm;
  std::int64_t iterations = -1;
  double zeta = -1;
  solve->add_option("--algorithm", algorithm, "sl | ce | both");
  solve->add_option("--iterations", iterations);
  solve->add_option("--zeta", zeta);
  solve->add_option("--seed", seed_flag);

  auto* baseline = app.add_subcommand("baseline", "best fixed-alpha FPC reference");
  double fa_alpha = -1;
  std::vector<double> i_nominal;
  baseline->add_option("--alpha", fa_alpha);
  baseline->add_option("--i-nominal-db", i_nominal)->delimiter(',');

  auto* evaluate = app.add_subcommand("evaluate", "per-UE rates and gain tables");
  auto* report = app.add_subcommand("report", "CDF plot-data bundle");
  auto* run = app.add_subcommand("run", "full pipeline");

  auto* sweep = app.add_subcommand("sweep", "bin-size / IoT-cap parameter sweep");
  std::vector<double> sweep_bins, sweep_caps;
  sweep->add_option("--bin-sizes-db", sweep_bins)->delimiter(',');
  sweep->add_option("--iot-caps-db", sweep_caps)->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    leap::RunConfig config = load_config(config_path);
    if (area_km2 > 0) config.netmodel.area_km2 = area_km2;
    if (macros >= 0) config.netmodel.macro_count = macros;
    if (picos >= 0) config.netmodel.pico_count = picos;
    if (density > 0) config.netmodel.density_per_km2 = density;
    if (seed_flag >= 0) {
      config.seed = static_cast<std::uint64_t>(seed_flag);
      config.netmodel.seed = config.seed;
      config.solver.seed = config.seed;
    }
    if (bin_size > 0) config.measurements.bin_width_db = bin_size;
    if (!algorithm.empty()) config.algorithm = algorithm;
    if (iterations > 0) config.solver.iterations = iterations;
    if (zeta > 0) config.solver.zeta = zeta;
    if (fa_alpha >= 0) config.baseline.alpha = fa_alpha;
    if (!i_nominal.empty()) config.baseline.i_nominal_db_above_n0 = i_nominal;

    const fs::path dir = artifacts_dir(artifacts_flag);
    leap::Pipeline pipeline(config, dir);

    if (gen->parsed()) {
      pipeline.generate();
    } else if (measure->parsed()) {
      pipeline.generate();
      pipeline.measure();
    } else if (solve->parsed()) {
      pipeline.generate();
      pipeline.measure();
      pipeline.solve();
    } else if (baseline->parsed()) {
      pipeline.generate();
      pipeline.measure();
      pipeline.baseline();
    } else if (evaluate->parsed()) {
      pipeline.generate();
      pipeline.measure();
      pipeline.solve();
      pipeline.baseline();
      pipeline.evaluate();
    } else if (report->parsed()) {
      pipeline.generate();
      pipeline.measure();
      pipeline.solve();
      pipeline.baseline();
      pipeline.evaluate();
      pipeline.report();
    } else if (run->parsed()) {
      pipeline.run();
    } else if (sweep->parsed()) {
      if (sweep_bins.empty()) sweep_bins = {config.measurements.bin_width_db};
      if (sweep_caps.empty()) sweep_caps = {config.constants.iot_cap_db};
      const auto rows = leap::sweep(config, sweep_bins, sweep_caps, dir, jobs);
      const std::string csv = leap::sweep_to_csv(rows);
      leap::io::atomic_write(dir / "sweep_table.csv", csv);
      std::cout << csv;
    }
    std::cout << "artifacts in " << dir.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
