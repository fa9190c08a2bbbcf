#include "leap/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"
#include "leap/baseline.hpp"
#include "leap/evaluate.hpp"
#include "leap/io.hpp"
#include "leap/parallel.hpp"

namespace leap {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& path) {
  if (!j.is_object()) throw config_error(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw config_error("unknown config key " + path + "/" + key);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config parse error: ") + e.what());
  }
  reject_unknown_keys(j, {"schema_version", "seed", "netmodel", "measurements",
                          "constants", "solver", "ce", "baseline", "evaluation"},
                      "");
  RunConfig cfg;
  read_field(j, "seed", cfg.seed);

  if (j.contains("netmodel")) {
    const json& n = j.at("netmodel");
    reject_unknown_keys(n,
                        {"area_km2", "macros", "picos", "density_per_km2",
                         "hotspot_factor", "hotspot_radius_m", "shadow_sigma_db",
                         "shadow_corr", "macro_tx_w", "pico_tx_w",
                         "audible_rsrp_dbm"},
                        "/netmodel");
    read_field(n, "area_km2", cfg.netmodel.area_km2);
    read_field(n, "macros", cfg.netmodel.macro_count);
    read_field(n, "picos", cfg.netmodel.pico_count);
    read_field(n, "density_per_km2", cfg.netmodel.density_per_km2);
    read_field(n, "hotspot_factor", cfg.netmodel.hotspot_factor);
    read_field(n, "hotspot_radius_m", cfg.netmodel.hotspot_radius_m);
    read_field(n, "shadow_sigma_db", cfg.netmodel.shadow_sigma_db);
    read_field(n, "shadow_corr", cfg.netmodel.shadow_corr);
    read_field(n, "macro_tx_w", cfg.netmodel.macro_tx_w);
    read_field(n, "pico_tx_w", cfg.netmodel.pico_tx_w);
    read_field(n, "audible_rsrp_dbm", cfg.netmodel.audible_rsrp_dbm);
  }
  cfg.netmodel.seed = cfg.seed;

  if (j.contains("measurements")) {
    const json& m = j.at("measurements");
    reject_unknown_keys(m, {"bin_width_db", "subsample_fraction"}, "/measurements");
    read_field(m, "bin_width_db", cfg.measurements.bin_width_db);
    read_field(m, "subsample_fraction", cfg.measurements.subsample_fraction);
  }

  if (j.contains("constants")) {
    const json& c = j.at("constants");
    reject_unknown_keys(
        c, {"n0_dbm_per_rb", "p_max_w_per_rb", "iot_cap_db", "gamma_min_db"},
        "/constants");
    read_field(c, "n0_dbm_per_rb", cfg.constants.n0_dbm_per_rb);
    read_field(c, "p_max_w_per_rb", cfg.constants.p_max_w_per_rb);
    read_field(c, "iot_cap_db", cfg.constants.iot_cap_db);
    read_field(c, "gamma_min_db", cfg.constants.gamma_min_db);
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    reject_unknown_keys(s,
                        {"algorithm", "iterations", "zeta", "step_scale",
                         "step_offset", "averaging_start_fraction",
                         "diagnostics_every", "mc_samples_diag", "threads"},
                        "/solver");
    read_field(s, "algorithm", cfg.algorithm);
    read_field(s, "iterations", cfg.solver.iterations);
    read_field(s, "zeta", cfg.solver.zeta);
    read_field(s, "step_scale", cfg.solver.step_scale);
    read_field(s, "step_offset", cfg.solver.step_offset);
    read_field(s, "averaging_start_fraction", cfg.solver.averaging_start_fraction);
    read_field(s, "diagnostics_every", cfg.solver.diagnostics_every);
    read_field(s, "mc_samples_diag", cfg.solver.mc_samples_diag);
    read_field(s, "threads", cfg.solver.threads);
    if (cfg.algorithm != "sl" && cfg.algorithm != "ce" && cfg.algorithm != "both") {
      throw config_error("/solver/algorithm must be sl, ce or both");
    }
  }
  cfg.solver.seed = cfg.seed;

  if (j.contains("ce")) {
    const json& c = j.at("ce");
    reject_unknown_keys(c, {"max_iterations", "kkt_tolerance"}, "/ce");
    read_field(c, "max_iterations", cfg.ce.max_iterations);
    read_field(c, "kkt_tolerance", cfg.ce.kkt_tolerance);
  }

  if (j.contains("baseline")) {
    const json& b = j.at("baseline");
    reject_unknown_keys(b, {"alpha", "i_nominal_db_above_n0"}, "/baseline");
    read_field(b, "alpha", cfg.baseline.alpha);
    read_field(b, "i_nominal_db_above_n0", cfg.baseline.i_nominal_db_above_n0);
  }

  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    reject_unknown_keys(e, {"dominance_threshold"}, "/evaluation");
    read_field(e, "dominance_threshold", cfg.evaluation.dominance_threshold);
  }
  return cfg;
}

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["seed"] = c.seed;
  j["netmodel"] = {{"area_km2", c.netmodel.area_km2},
                   {"macros", c.netmodel.macro_count},
                   {"picos", c.netmodel.pico_count},
                   {"density_per_km2", c.netmodel.density_per_km2},
                   {"hotspot_factor", c.netmodel.hotspot_factor},
                   {"hotspot_radius_m", c.netmodel.hotspot_radius_m},
                   {"shadow_sigma_db", c.netmodel.shadow_sigma_db},
                   {"shadow_corr", c.netmodel.shadow_corr},
                   {"macro_tx_w", c.netmodel.macro_tx_w},
                   {"pico_tx_w", c.netmodel.pico_tx_w},
                   {"audible_rsrp_dbm", c.netmodel.audible_rsrp_dbm}};
  j["measurements"] = {{"bin_width_db", c.measurements.bin_width_db},
                       {"subsample_fraction", c.measurements.subsample_fraction}};
  j["constants"] = {{"n0_dbm_per_rb", c.constants.n0_dbm_per_rb},
                    {"p_max_w_per_rb", c.constants.p_max_w_per_rb},
                    {"iot_cap_db", c.constants.iot_cap_db},
                    {"gamma_min_db", c.constants.gamma_min_db}};
  j["solver"] = {{"algorithm", c.algorithm},
                 {"iterations", c.solver.iterations},
                 {"zeta", c.solver.zeta},
                 {"step_scale", c.solver.step_scale},
                 {"step_offset", c.solver.step_offset},
                 {"averaging_start_fraction", c.solver.averaging_start_fraction},
                 {"diagnostics_every", c.solver.diagnostics_every},
                 {"mc_samples_diag", c.solver.mc_samples_diag},
                 {"threads", c.solver.threads}};
  j["ce"] = {{"max_iterations", c.ce.max_iterations},
             {"kkt_tolerance", c.ce.kkt_tolerance}};
  j["baseline"] = {{"alpha", c.baseline.alpha},
                   {"i_nominal_db_above_n0", c.baseline.i_nominal_db_above_n0}};
  j["evaluation"] = {{"dominance_threshold", c.evaluation.dominance_threshold}};
  return j.dump(1, '\t') + "\n";
}

Constants constants_of(const RunConfig& config) {
  return make_constants(config.constants.n0_dbm_per_rb,
                        config.constants.p_max_w_per_rb, config.constants.iot_cap_db,
                        config.constants.gamma_min_db,
                        config.measurements.bin_width_db);
}

Pipeline::Pipeline(RunConfig config, std::filesystem::path artifacts_dir)
    : config_(std::move(config)), dir_(std::move(artifacts_dir)) {
  std::filesystem::create_directories(dir_ / ".stamps");
  manifest_.tool_version = kToolVersion;
  manifest_.config_hash = io::fnv1a_hex(run_config_to_json(config_));
}

std::filesystem::path Pipeline::snapshot_path() const {
  return snapshot_override_.value_or(dir_ / "snapshot.json");
}
std::filesystem::path Pipeline::statistics_path() const {
  return dir_ / "statistics.json";
}
std::filesystem::path Pipeline::solution_path(const std::string& provenance) const {
  return dir_ / ("solution_" + provenance + ".json");
}

void Pipeline::use_snapshot(const std::filesystem::path& path) {
  snapshot_override_ = path;
}

std::string Pipeline::file_hash(const std::filesystem::path& path) const {
  return io::fnv1a_hex(io::read_file(path));
}

bool Pipeline::stage_fresh(const std::string& stage, const std::string& stamp,
                           const std::vector<std::filesystem::path>& outputs) {
  for (const auto& out : outputs) {
    if (!std::filesystem::exists(out)) return false;
  }
  const auto stamp_path = dir_ / ".stamps" / (stage + ".stamp");
  if (!std::filesystem::exists(stamp_path)) return false;
  return io::read_file(stamp_path) == stamp;
}

void Pipeline::commit_stage(const std::string& stage, const std::string& stamp) {
  io::atomic_write(dir_ / ".stamps" / (stage + ".stamp"), stamp);
  manifest_.input_hashes[stage] = io::fnv1a_hex(stamp);
}

void Pipeline::record(const std::string& stage, double ms, bool cache_hit) {
  manifest_.timings.push_back({stage, ms, cache_hit});
}

void Pipeline::generate() {
  const double t0 = now_ms();
  if (snapshot_override_) {
    record("generate", now_ms() - t0, true);
    return;
  }
  const GeneratorConfig& n = config_.netmodel;
  const std::string stamp =
      std::string(kToolVersion) + "|generate|" +
      json({{"seed", config_.seed},
            {"area_km2", n.area_km2},
            {"macros", n.macro_count},
            {"picos", n.pico_count},
            {"density_per_km2", n.density_per_km2},
            {"hotspot_factor", n.hotspot_factor},
            {"hotspot_radius_m", n.hotspot_radius_m},
            {"shadow_sigma_db", n.shadow_sigma_db},
            {"shadow_corr", n.shadow_corr},
            {"macro_tx_w", n.macro_tx_w},
            {"pico_tx_w", n.pico_tx_w},
            {"audible_rsrp_dbm", n.audible_rsrp_dbm}})
          .dump();
  const auto out = dir_ / "snapshot.json";
  if (stage_fresh("generate", stamp, {out})) {
    manifest_.input_hashes["generate"] = io::fnv1a_hex(stamp);
    record("generate", now_ms() - t0, true);
    return;
  }
  NetworkSnapshot snap = generate_snapshot(config_.netmodel);
  io::atomic_write(out, io::snapshot_to_json(snap));
  manifest_.artifacts.push_back(out.filename().string());
  commit_stage("generate", stamp);
  record("generate", now_ms() - t0, false);
}

void Pipeline::measure() {
  const double t0 = now_ms();
  const std::string stamp = std::string(kToolVersion) + "|measure|" +
                            file_hash(snapshot_path()) + "|" +
                            json({{"bin_width_db", config_.measurements.bin_width_db},
                                  {"subsample_fraction",
                                   config_.measurements.subsample_fraction},
                                  {"seed", config_.seed}})
                                .dump();
  const auto out = statistics_path();
  if (stage_fresh("measure", stamp, {out})) {
    manifest_.input_hashes["measure"] = io::fnv1a_hex(stamp);
    record("measure", now_ms() - t0, true);
    return;
  }
  NetworkSnapshot snap = io::snapshot_from_json(io::read_file(snapshot_path()));
  if (config_.measurements.subsample_fraction < 1.0) {
    snap = subsample(snap, config_.measurements.subsample_fraction, config_.seed);
  }
  const MeasurementStatistics stats =
      build_statistics(snap, config_.measurements.bin_width_db);
  io::atomic_write(out, io::statistics_to_json(stats));
  manifest_.artifacts.push_back(out.filename().string());
  commit_stage("measure", stamp);
  record("measure", now_ms() - t0, false);
}

void Pipeline::solve() {
  const double t0 = now_ms();
  const bool want_sl = config_.algorithm == "sl" || config_.algorithm == "both";
  const bool want_ce = config_.algorithm == "ce" || config_.algorithm == "both";

  const std::string stamp =
      std::string(kToolVersion) + "|solve|" + file_hash(statistics_path()) + "|" +
      json({{"algorithm", config_.algorithm},
            {"iterations", config_.solver.iterations},
            {"zeta", config_.solver.zeta},
            {"step_scale", config_.solver.step_scale},
            {"step_offset", config_.solver.step_offset},
            {"avg_start", config_.solver.averaging_start_fraction},
            {"diagnostics_every", config_.solver.diagnostics_every},
            {"mc_samples_diag", config_.solver.mc_samples_diag},
            {"seed", config_.seed},
            {"ce_iters", config_.ce.max_iterations},
            {"ce_tol", config_.ce.kkt_tolerance},
            {"n0", config_.constants.n0_dbm_per_rb},
            {"pmax", config_.constants.p_max_w_per_rb},
            {"iot_cap", config_.constants.iot_cap_db},
            {"gamma_min", config_.constants.gamma_min_db}})
          .dump();
  std::vector<std::filesystem::path> outputs;
  if (want_sl) {
    outputs.push_back(solution_path("sl"));
    outputs.push_back(dir_ / "trace_sl.csv");
  }
  if (want_ce) {
    outputs.push_back(solution_path("ce"));
    outputs.push_back(dir_ / "trace_ce.csv");
    outputs.push_back(dir_ / "fit_ce.json");
  }
  if (stage_fresh("solve", stamp, outputs)) {
    manifest_.input_hashes["solve"] = io::fnv1a_hex(stamp);
    record("solve", now_ms() - t0, true);
    return;
  }

  const MeasurementStatistics stats =
      io::statistics_from_json(io::read_file(statistics_path()));
  const ProblemInstance inst = build_instance(stats, constants_of(config_));

  if (want_sl) {
    const SolveResult result = leap::solve(inst, config_.solver);
    io::atomic_write(solution_path("sl"), io::solution_to_json(result.solution));
    io::atomic_write(dir_ / "trace_sl.csv", io::trace_to_csv(result.trace));
    manifest_.artifacts.push_back("solution_sl.json");
    manifest_.artifacts.push_back("trace_sl.csv");
  }
  if (want_ce) {
    const GaussianFit fit = fit_gaussians(stats);
    const CeResult result = solve_ce(inst, fit, config_.ce);
    io::atomic_write(solution_path("ce"), io::solution_to_json(result.solution));
    io::atomic_write(dir_ / "trace_ce.csv", io::trace_to_csv(result.trace));
    io::atomic_write(dir_ / "fit_ce.json", io::fit_to_json(fit));
    manifest_.artifacts.push_back("solution_ce.json");
    manifest_.artifacts.push_back("trace_ce.csv");
    manifest_.artifacts.push_back("fit_ce.json");
  }
  commit_stage("solve", stamp);
  record("solve", now_ms() - t0, false);
}

void Pipeline::baseline() {
  const double t0 = now_ms();
  const std::string stamp = std::string(kToolVersion) + "|baseline|" +
                            file_hash(statistics_path()) + "|" +
                            file_hash(snapshot_path()) + "|" +
                            json({{"alpha", config_.baseline.alpha},
                                  {"sweep", config_.baseline.i_nominal_db_above_n0},
                                  {"n0", config_.constants.n0_dbm_per_rb},
                                  {"pmax", config_.constants.p_max_w_per_rb},
                                  {"gamma_min", config_.constants.gamma_min_db}})
                                .dump();
  const auto out = solution_path("fa_fpc");
  const auto sweep_out = dir_ / "fa_fpc_sweep.csv";
  if (stage_fresh("baseline", stamp, {out, sweep_out})) {
    manifest_.input_hashes["baseline"] = io::fnv1a_hex(stamp);
    record("baseline", now_ms() - t0, true);
    return;
  }
  const MeasurementStatistics stats =
      io::statistics_from_json(io::read_file(statistics_path()));
  const NetworkSnapshot snap = io::snapshot_from_json(io::read_file(snapshot_path()));
  const Constants constants = constants_of(config_);

  FaFpcConfig fa;
  fa.alpha = config_.baseline.alpha;
  fa.i_nominal_db_above_n0 = config_.baseline.i_nominal_db_above_n0;
  const BestFaFpc best =
      best_fa_fpc(stats, fa, constants, [&](const PowerControlSolution& s) {
        return evaluate_snapshot(s, snap, constants.p_max_w);
      });
  io::atomic_write(out, io::solution_to_json(best.best.solution));
  std::string csv = "i_nominal_db_above_n0,median_rate_bps_hz\n";
  for (const auto& [i_db, median] : best.sweep) {
    csv += std::to_string(i_db) + "," + std::to_string(median) + "\n";
  }
  io::atomic_write(sweep_out, csv);
  manifest_.artifacts.push_back(out.filename().string());
  manifest_.artifacts.push_back(sweep_out.filename().string());
  commit_stage("baseline", stamp);
  record("baseline", now_ms() - t0, false);
}

void Pipeline::evaluate() {
  const double t0 = now_ms();
  std::vector<std::string> provenances;
  if (config_.algorithm == "sl" || config_.algorithm == "both") provenances.push_back("sl");
  if (config_.algorithm == "ce" || config_.algorithm == "both") provenances.push_back("ce");

  std::string inputs = file_hash(snapshot_path()) + file_hash(statistics_path()) +
                       file_hash(solution_path("fa_fpc"));
  for (const auto& p : provenances) inputs += file_hash(solution_path(p));
  const std::string stamp =
      std::string(kToolVersion) + "|evaluate|" + inputs + "|" +
      json({{"dominance", config_.evaluation.dominance_threshold}}).dump();

  std::vector<std::filesystem::path> outputs = {dir_ / "report_fa_fpc.csv",
                                                dir_ / "gains.json"};
  for (const auto& p : provenances) {
    outputs.push_back(dir_ / ("report_" + p + ".csv"));
    outputs.push_back(dir_ / ("percentiles_" + p + ".csv"));
  }
  if (stage_fresh("evaluate", stamp, outputs)) {
    manifest_.input_hashes["evaluate"] = io::fnv1a_hex(stamp);
    record("evaluate", now_ms() - t0, true);
    return;
  }

  const NetworkSnapshot snap = io::snapshot_from_json(io::read_file(snapshot_path()));
  const MeasurementStatistics stats =
      io::statistics_from_json(io::read_file(statistics_path()));
  const Constants constants = constants_of(config_);

  const PowerControlSolution fa_solution =
      io::solution_from_json(io::read_file(solution_path("fa_fpc")));
  const EvaluationReport fa_report =
      evaluate_snapshot(fa_solution, snap, constants.p_max_w);
  io::atomic_write(dir_ / "report_fa_fpc.csv", io::report_to_csv(fa_report));
  manifest_.artifacts.push_back("report_fa_fpc.csv");

  EvaluationReport primary_report;
  bool have_primary = false;
  for (const auto& p : provenances) {
    const PowerControlSolution solution =
        io::solution_from_json(io::read_file(solution_path(p)));
    const EvaluationReport report = evaluate_snapshot(solution, snap, constants.p_max_w);
    io::atomic_write(dir_ / ("report_" + p + ".csv"), io::report_to_csv(report));
    io::atomic_write(dir_ / ("percentiles_" + p + ".csv"),
                     io::percentiles_to_csv(report));
    manifest_.artifacts.push_back("report_" + p + ".csv");
    manifest_.artifacts.push_back("percentiles_" + p + ".csv");
    if (!have_primary) {
      primary_report = report;
      have_primary = true;
    }
  }

  if (have_primary) {
    const auto gains = percentile_gains(primary_report, fa_report);
    const auto rows = gain_by_interferer_count(primary_report, fa_report, stats,
                                               config_.evaluation.dominance_threshold);
    io::atomic_write(dir_ / "gains.json", io::gains_to_json(gains, rows));
    manifest_.artifacts.push_back("gains.json");
  }
  commit_stage("evaluate", stamp);
  record("evaluate", now_ms() - t0, false);
}

void Pipeline::report() {
  const double t0 = now_ms();
  std::vector<std::string> names = {"fa_fpc"};
  if (config_.algorithm == "sl" || config_.algorithm == "both") names.push_back("sl");
  if (config_.algorithm == "ce" || config_.algorithm == "both") names.push_back("ce");

  std::string inputs;
  for (const auto& n : names) inputs += file_hash(dir_ / ("report_" + n + ".csv"));
  const std::string stamp = std::string(kToolVersion) + "|report|" + inputs;
  std::vector<std::filesystem::path> outputs;
  for (const auto& n : names) outputs.push_back(dir_ / ("cdf_" + n + ".csv"));
  if (stage_fresh("report", stamp, outputs)) {
    manifest_.input_hashes["report"] = io::fnv1a_hex(stamp);
    record("report", now_ms() - t0, true);
    return;
  }

  const NetworkSnapshot snap = io::snapshot_from_json(io::read_file(snapshot_path()));
  const Constants constants = constants_of(config_);
  for (const auto& n : names) {
    const PowerControlSolution solution =
        io::solution_from_json(io::read_file(solution_path(n)));
    const EvaluationReport rep = evaluate_snapshot(solution, snap, constants.p_max_w);
    io::atomic_write(dir_ / ("cdf_" + n + ".csv"), io::cdf_to_csv(rep));
    manifest_.artifacts.push_back("cdf_" + n + ".csv");
  }
  commit_stage("report", stamp);
  record("report", now_ms() - t0, false);
}

RunManifest Pipeline::run() {
  struct Stage {
    const char* name;
    void (Pipeline::*fn)();
  };
  const Stage stages[] = {{"generate", &Pipeline::generate},
                          {"measure", &Pipeline::measure},
                          {"solve", &Pipeline::solve},
                          {"baseline", &Pipeline::baseline},
                          {"evaluate", &Pipeline::evaluate},
                          {"report", &Pipeline::report}};
  for (const Stage& stage : stages) {
    try {
      (this->*stage.fn)();
    } catch (...) {
      manifest_.failure_stage = stage.name;
      io::atomic_write(dir_ / "run_manifest.json", manifest_to_json(manifest_));
      throw;
    }
  }
  io::atomic_write(dir_ / "run_manifest.json", manifest_to_json(manifest_));
  return manifest_;
}

std::vector<SweepRow> sweep(const RunConfig& base_config,
                            const std::vector<double>& bin_widths_db,
                            const std::vector<double>& iot_caps_db,
                            const std::filesystem::path& artifacts_dir, int jobs) {
  if (bin_widths_db.empty() || iot_caps_db.empty()) {
    throw config_error("sweep grid must not be empty");
  }

  // Base run supplies the shared snapshot and the fixed FA-FPC reference.
  Pipeline base(base_config, artifacts_dir);
  base.generate();
  base.measure();
  base.baseline();
  const NetworkSnapshot snap =
      io::snapshot_from_json(io::read_file(base.snapshot_path()));
  const Constants base_constants = constants_of(base_config);
  const PowerControlSolution fa_solution =
      io::solution_from_json(io::read_file(base.solution_path("fa_fpc")));
  const EvaluationReport fa_report =
      evaluate_snapshot(fa_solution, snap, base_constants.p_max_w);
  const double fa_median = fa_report.median();

  struct GridPoint {
    double bin;
    double cap;
  };
  std::vector<GridPoint> grid;
  for (double bin : bin_widths_db) {
    for (double cap : iot_caps_db) grid.push_back({bin, cap});
  }

  std::vector<SweepRow> rows(grid.size());
  parallel_for(static_cast<int>(grid.size()), jobs, [&](int g) {
    RunConfig cfg = base_config;
    cfg.measurements.bin_width_db = grid[g].bin;
    cfg.constants.iot_cap_db = grid[g].cap;
    char name[64];
    std::snprintf(name, sizeof(name), "sweep_bin%g_cap%g", grid[g].bin, grid[g].cap);
    Pipeline point(cfg, artifacts_dir / name);
    point.use_snapshot(base.snapshot_path());
    point.measure();
    point.solve();
    const PowerControlSolution solution = io::solution_from_json(io::read_file(
        point.solution_path(cfg.algorithm == "ce" ? "ce" : "sl")));
    const EvaluationReport report =
        evaluate_snapshot(solution, snap, constants_of(cfg).p_max_w);
    SweepRow row;
    row.bin_width_db = grid[g].bin;
    row.iot_cap_db = grid[g].cap;
    row.leap_median = report.median();
    row.fa_fpc_median = fa_median;
    row.median_gain = row.leap_median / fa_median;
    rows[g] = row;
  });
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = "bin_width_db,iot_cap_db,leap_median,fa_fpc_median,median_gain\n";
  char buf[160];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%g,%.12g,%.12g,%.12g\n", r.bin_width_db,
                  r.iot_cap_db, r.leap_median, r.fa_fpc_median, r.median_gain);
    out += buf;
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["schema_version"] = 1;
  j["tool_version"] = m.tool_version;
  j["config_hash"] = m.config_hash;
  j["input_hashes"] = m.input_hashes;
  j["artifacts"] = m.artifacts;
  json timings = json::array();
  for (const StageTiming& t : m.timings) {
    timings.push_back(json{{"stage", t.stage},
                           {"wall_ms", t.wall_ms},
                           {"cache_hit", t.cache_hit}});
  }
  j["timings"] = std::move(timings);
  j["failure_stage"] = m.failure_stage;
  return j.dump(1, '\t') + "\n";
}

}  // namespace leap
