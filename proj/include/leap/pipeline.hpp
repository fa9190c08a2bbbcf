#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leap/measurements.hpp"
#include "leap/netmodel.hpp"
#include "leap/optcore.hpp"
#include "leap/solver_ce.hpp"
#include "leap/solver_sl.hpp"

namespace leap {

inline constexpr const char* kToolVersion = "leap 0.1.0";

struct MeasureConfig {
  double bin_width_db = 1.0;
  double subsample_fraction = 1.0;
};

struct ConstantsConfig {
  double n0_dbm_per_rb = -116.4;
  double p_max_w_per_rb = 0.1;
  double iot_cap_db = 20.0;
  double gamma_min_db = -10.0;
};

struct BaselineConfig {
  double alpha = 0.8;
  std::vector<double> i_nominal_db_above_n0 = {5.0, 10.0, 15.0};
};

struct EvaluationConfig {
  double dominance_threshold = 0.05;
};

struct RunConfig {
  std::uint64_t seed = 1;
  GeneratorConfig netmodel;
  MeasureConfig measurements;
  ConstantsConfig constants;
  std::string algorithm = "sl";  // sl | ce | both
  SolverConfig solver;
  CeConfig ce;
  BaselineConfig baseline;
  EvaluationConfig evaluation;
};

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Schema-validated parse: unknown keys are rejected with their path.
RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);
Constants constants_of(const RunConfig& config);

struct StageTiming {
  std::string stage;
  double wall_ms = 0.0;
  bool cache_hit = false;
};

struct RunManifest {
  std::string tool_version;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;   // per stage
  std::vector<std::string> artifacts;
  std::vector<StageTiming> timings;
  std::string failure_stage;  // empty on success
};

class Pipeline {
 public:
  Pipeline(RunConfig config, std::filesystem::path artifacts_dir);

  // Executes generate -> measure -> solve -> baseline -> evaluate -> report,
  // skipping stages whose inputs and config hash are unchanged. Writes the
  // manifest on exit (also on stage failure, marking the stage).
  RunManifest run();

  void generate();
  void measure();
  void solve();
  void baseline();
  void evaluate();
  void report();

  // Overrides the generate stage output with an existing snapshot file
  // (used by sweeps to share the expensive snapshot).
  void use_snapshot(const std::filesystem::path& path);

  const std::filesystem::path& dir() const { return dir_; }
  const RunConfig& config() const { return config_; }

  std::filesystem::path snapshot_path() const;
  std::filesystem::path statistics_path() const;
  std::filesystem::path solution_path(const std::string& provenance) const;

 private:
  bool stage_fresh(const std::string& stage, const std::string& stamp,
                   const std::vector<std::filesystem::path>& outputs);
  void commit_stage(const std::string& stage, const std::string& stamp);
  std::string file_hash(const std::filesystem::path& path) const;
  void record(const std::string& stage, double ms, bool cache_hit);

  RunConfig config_;
  std::filesystem::path dir_;
  std::optional<std::filesystem::path> snapshot_override_;
  RunManifest manifest_;
};

struct SweepRow {
  double bin_width_db = 0.0;
  double iot_cap_db = 0.0;
  double leap_median = 0.0;
  double fa_fpc_median = 0.0;
  double median_gain = 0.0;
};

// Cartesian product over bin widths and IoT caps with a shared snapshot;
// the FA-FPC reference comes from the base configuration and stays fixed.
std::vector<SweepRow> sweep(const RunConfig& base_config,
                            const std::vector<double>& bin_widths_db,
                            const std::vector<double>& iot_caps_db,
                            const std::filesystem::path& artifacts_dir, int jobs = 1);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string manifest_to_json(const RunManifest& manifest);

}  // namespace leap
