#include "leap/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "leap/units.hpp"

namespace leap::io {

using nlohmann::json;

namespace {

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json config_to_json(const GeneratorConfig& cfg) {
  return json{{"area_km2", cfg.area_km2},
              {"macros", cfg.macro_count},
              {"picos", cfg.pico_count},
              {"density_per_km2", cfg.density_per_km2},
              {"hotspot_factor", cfg.hotspot_factor},
              {"hotspot_radius_m", cfg.hotspot_radius_m},
              {"shadow_sigma_db", cfg.shadow_sigma_db},
              {"shadow_corr", cfg.shadow_corr},
              {"macro_tx_w", cfg.macro_tx_w},
              {"pico_tx_w", cfg.pico_tx_w},
              {"pl0_db", cfg.pl0_db},
              {"macro_exponent", cfg.macro_exponent},
              {"pico_exponent", cfg.pico_exponent},
              {"min_macro_spacing_m", cfg.min_macro_spacing_m},
              {"pico_clearance_m", cfg.pico_clearance_m},
              {"audible_rsrp_dbm", cfg.audible_rsrp_dbm},
              {"seed", cfg.seed}};
}

GeneratorConfig config_from_json(const json& j) {
  GeneratorConfig cfg;
  cfg.area_km2 = j.at("area_km2");
  cfg.macro_count = j.at("macros");
  cfg.pico_count = j.at("picos");
  cfg.density_per_km2 = j.at("density_per_km2");
  cfg.hotspot_factor = j.at("hotspot_factor");
  cfg.hotspot_radius_m = j.at("hotspot_radius_m");
  cfg.shadow_sigma_db = j.at("shadow_sigma_db");
  cfg.shadow_corr = j.at("shadow_corr");
  cfg.macro_tx_w = j.at("macro_tx_w");
  cfg.pico_tx_w = j.at("pico_tx_w");
  cfg.pl0_db = j.at("pl0_db");
  cfg.macro_exponent = j.at("macro_exponent");
  cfg.pico_exponent = j.at("pico_exponent");
  cfg.min_macro_spacing_m = j.at("min_macro_spacing_m");
  cfg.pico_clearance_m = j.at("pico_clearance_m");
  cfg.audible_rsrp_dbm = j.at("audible_rsrp_dbm");
  cfg.seed = j.at("seed");
  return cfg;
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string snapshot_to_json(const NetworkSnapshot& snapshot) {
  json j;
  j["schema_version"] = 1;
  j["config"] = config_to_json(snapshot.config_echo);
  j["coverage_holes"] = snapshot.coverage_holes;
  json cells = json::array();
  for (const Cell& c : snapshot.cells) {
    cells.push_back(json{{"id", c.id},
                         {"kind", c.kind == CellKind::macro ? "macro" : "pico"},
                         {"x_m", round_to(c.x_m, 0.001)},
                         {"y_m", round_to(c.y_m, 0.001)},
                         {"tx_power_w", c.tx_power_w}});
  }
  j["cells"] = std::move(cells);
  json ues = json::array();
  for (const UESample& u : snapshot.ues) {
    json losses = json::array();
    for (const auto& [cell, loss] : u.losses) {
      losses.push_back(json::array({cell, round_to(linear_to_db(loss), 0.01)}));
    }
    ues.push_back(json{{"id", u.id},
                       {"x_m", round_to(u.x_m, 0.001)},
                       {"y_m", round_to(u.y_m, 0.001)},
                       {"serving", u.serving_cell},
                       {"loss_db", std::move(losses)}});
  }
  j["ues"] = std::move(ues);
  return j.dump(1, '\t') + "\n";
}

NetworkSnapshot snapshot_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version") != 1) throw std::runtime_error("unknown snapshot schema");
  NetworkSnapshot snap;
  snap.config_echo = config_from_json(j.at("config"));
  snap.coverage_holes = j.at("coverage_holes");
  for (const auto& c : j.at("cells")) {
    Cell cell;
    cell.id = c.at("id");
    cell.kind = c.at("kind") == "macro" ? CellKind::macro : CellKind::pico;
    cell.x_m = c.at("x_m");
    cell.y_m = c.at("y_m");
    cell.tx_power_w = c.at("tx_power_w");
    snap.cells.push_back(cell);
  }
  for (const auto& u : j.at("ues")) {
    UESample ue;
    ue.id = u.at("id");
    ue.x_m = u.at("x_m");
    ue.y_m = u.at("y_m");
    ue.serving_cell = u.at("serving");
    for (const auto& l : u.at("loss_db")) {
      ue.losses.emplace_back(l.at(0).get<int>(), db_to_linear(l.at(1).get<double>()));
    }
    snap.ues.push_back(std::move(ue));
  }
  return snap;
}

std::string statistics_to_json(const MeasurementStatistics& stats) {
  json j;
  j["schema_version"] = 1;
  j["bin_width_db"] = stats.bin_width_db;
  j["snapshot_hash"] = stats.snapshot_hash;
  json serving = json::array();
  for (const auto& [cell, hist] : stats.serving) {
    json bins = json::array();
    for (const auto& b : hist.bins) {
      bins.push_back(json::array({b.index, b.count, round_to(b.probability, 1e-9)}));
    }
    serving.push_back(json{{"cell", cell},
                           {"total", hist.total_samples},
                           {"bins", std::move(bins)}});
  }
  j["serving"] = std::move(serving);
  json joint = json::array();
  for (const auto& [key, hist] : stats.joint) {
    json bins = json::array();
    for (const auto& b : hist.bins) {
      bins.push_back(json::array({b.i, b.j, b.count, round_to(b.probability, 1e-9)}));
    }
    joint.push_back(json{{"source", key.source},
                         {"target", key.target},
                         {"occupancy", round_to(stats.graph.occupancy.at(key), 1e-9)},
                         {"total", hist.total_samples},
                         {"bins", std::move(bins)}});
  }
  j["joint"] = std::move(joint);
  json load = json::array();
  for (const auto& [cell, rho] : stats.load) load.push_back(json::array({cell, rho}));
  j["load"] = std::move(load);
  j["empty_cells"] = stats.empty_cells;
  return j.dump(1, '\t') + "\n";
}

MeasurementStatistics statistics_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version") != 1) throw std::runtime_error("unknown statistics schema");
  MeasurementStatistics stats;
  stats.bin_width_db = j.at("bin_width_db");
  stats.snapshot_hash = j.at("snapshot_hash");
  for (const auto& s : j.at("serving")) {
    Histogram1D hist;
    hist.bin_width_db = stats.bin_width_db;
    hist.total_samples = s.at("total");
    for (const auto& b : s.at("bins")) {
      hist.bins.push_back(Hist1DBin{b.at(0).get<int>(), b.at(1).get<std::uint64_t>(), 0.0});
    }
    hist.finalize();
    stats.serving[s.at("cell").get<int>()] = std::move(hist);
  }
  for (const auto& e : j.at("joint")) {
    Histogram2D hist;
    hist.bin_width_db = stats.bin_width_db;
    hist.total_samples = e.at("total");
    for (const auto& b : e.at("bins")) {
      hist.bins.push_back(Hist2DBin{b.at(0).get<int>(), b.at(1).get<int>(),
                                    b.at(2).get<std::uint64_t>(), 0.0});
    }
    hist.finalize();
    const EdgeKey key{e.at("source").get<int>(), e.at("target").get<int>()};
    stats.joint[key] = std::move(hist);
    stats.graph.occupancy[key] = e.at("occupancy");
    stats.graph.interferers[key.target].push_back(key.source);
  }
  for (auto& [cell, sources] : stats.graph.interferers) {
    std::sort(sources.begin(), sources.end());
  }
  for (const auto& l : j.at("load")) {
    stats.load[l.at(0).get<int>()] = l.at(1).get<double>();
  }
  stats.empty_cells = j.at("empty_cells").get<std::vector<int>>();
  return stats;
}

std::string solution_to_json(const PowerControlSolution& solution) {
  json j;
  j["schema_version"] = 1;
  j["provenance"] = solution.provenance;
  j["objective"] = solution.objective;
  json cells = json::array();
  for (const CellParameters& c : solution.cells) {
    cells.push_back(json{{"cell", c.cell_id},
                         {"p0_w_per_rb", c.p0_w_per_rb},
                         {"alpha", c.alpha},
                         {"i_star_w", c.i_star_w}});
  }
  j["cells"] = std::move(cells);
  return j.dump(1, '\t') + "\n";
}

PowerControlSolution solution_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("schema_version") != 1) throw std::runtime_error("unknown solution schema");
  PowerControlSolution solution;
  solution.provenance = j.at("provenance");
  solution.objective = j.at("objective");
  for (const auto& c : j.at("cells")) {
    solution.cells.push_back(CellParameters{c.at("cell").get<int>(),
                                            c.at("p0_w_per_rb").get<double>(),
                                            c.at("alpha").get<double>(),
                                            c.at("i_star_w").get<double>()});
  }
  std::sort(solution.cells.begin(), solution.cells.end(),
            [](const CellParameters& a, const CellParameters& b) {
              return a.cell_id < b.cell_id;
            });
  return solution;
}

std::string fit_to_json(const GaussianFit& fit) {
  json j;
  j["schema_version"] = 1;
  j["regularization"] = fit.regularization;
  json edges = json::array();
  for (const auto& [key, e] : fit.edges) {
    edges.push_back(json{{"source", key.source},
                         {"target", key.target},
                         {"mean", {e.mean[0], e.mean[1]}},
                         {"cov", {e.cov[0], e.cov[1], e.cov[2]}},
                         {"degenerate", e.degenerate}});
  }
  j["edges"] = std::move(edges);
  return j.dump(1, '\t') + "\n";
}

std::string trace_to_csv(const SolverTrace& trace) {
  std::string out = "iteration,objective,max_violation,violation_se,dual_norm,step_size\n";
  for (const TracePoint& p : trace.points) {
    out += std::to_string(p.iteration) + "," + format_double(p.objective) + "," +
           format_double(p.max_violation) + "," + format_double(p.violation_se) +
           "," + format_double(p.dual_norm) + "," + format_double(p.step_size) + "\n";
  }
  return out;
}

std::string report_to_csv(const EvaluationReport& report) {
  std::string out = "ue_id,serving_cell,sinr_target,rate_bps_hz\n";
  for (const UEResult& r : report.per_ue) {
    out += std::to_string(r.ue_id) + "," + std::to_string(r.serving_cell) + "," +
           format_double(r.sinr_target) + "," + format_double(r.rate_bps_hz) + "\n";
  }
  return out;
}

std::string percentiles_to_csv(const EvaluationReport& report) {
  std::string out = "percentile,rate_bps_hz\n";
  for (const auto& [p, rate] : report.percentiles) {
    out += format_double(p) + "," + format_double(rate) + "\n";
  }
  return out;
}

std::string gains_to_json(const std::vector<std::pair<double, double>>& percentile_gains,
                          const std::vector<GainRow>& gain_rows) {
  json j;
  j["schema_version"] = 1;
  json pg = json::array();
  for (const auto& [p, g] : percentile_gains) pg.push_back(json::array({p, g}));
  j["percentile_gains"] = std::move(pg);
  json rows = json::array();
  for (const GainRow& r : gain_rows) {
    rows.push_back(json{{"interferer_count", r.interferer_count},
                        {"cells", r.cell_count},
                        {"median_gain", r.median_gain},
                        {"gain_stddev", r.gain_stddev}});
  }
  j["by_interferer_count"] = std::move(rows);
  return j.dump(1, '\t') + "\n";
}

std::string cdf_to_csv(const EvaluationReport& report) {
  std::vector<double> rates;
  rates.reserve(report.per_ue.size());
  for (const UEResult& r : report.per_ue) rates.push_back(r.rate_bps_hz);
  std::sort(rates.begin(), rates.end());
  std::string out = "rate_bps_hz,cdf\n";
  const double n = static_cast<double>(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out += format_double(rates[i]) + "," +
           format_double(static_cast<double>(i + 1) / n) + "\n";
  }
  return out;
}

}  // namespace leap::io
