#include "leap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leap {

bool PowerControlSolution::has_cell(int cell_id) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell_id,
                             [](const CellParameters& c, int id) { return c.cell_id < id; });
  return it != cells.end() && it->cell_id == cell_id;
}

const CellParameters& PowerControlSolution::for_cell(int cell_id) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell_id,
                             [](const CellParameters& c, int id) { return c.cell_id < id; });
  if (it == cells.end() || it->cell_id != cell_id) {
    throw std::out_of_range("no parameters for cell " + std::to_string(cell_id));
  }
  return *it;
}

double sinr_target(const CellParameters& params, double loss_linear, double p_max_w) {
  const double log_l = std::log(loss_linear);
  const double capped = std::log(p_max_w) - log_l;
  const double fpc = std::log(params.p0_w_per_rb) - (1.0 - params.alpha) * log_l;
  return std::exp(std::min(capped, fpc) - std::log(params.i_star_w));
}

double data_rate(double sinr_linear) { return std::log2(1.0 + sinr_linear); }

double percentile_of(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double rank = (p / 100.0) * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double EvaluationReport::percentile(double p) const {
  for (const auto& [q, rate] : percentiles) {
    if (q == p) return rate;
  }
  throw std::out_of_range("percentile not tabulated");
}

EvaluationReport evaluate_snapshot(const PowerControlSolution& solution,
                                   const NetworkSnapshot& snapshot, double p_max_w) {
  EvaluationReport report;
  report.provenance = solution.provenance;

  std::map<int, std::vector<double>> rates_by_cell;
  std::vector<double> rates;
  rates.reserve(snapshot.ues.size());

  for (const UESample& ue : snapshot.ues) {
    if (!solution.has_cell(ue.serving_cell)) {
      throw std::invalid_argument("solution has no parameters for cell " +
                                  std::to_string(ue.serving_cell));
    }
    const CellParameters& params = solution.for_cell(ue.serving_cell);
    UEResult r;
    r.ue_id = ue.id;
    r.serving_cell = ue.serving_cell;
    r.sinr_target = sinr_target(params, ue.loss_to(ue.serving_cell), p_max_w);
    r.rate_bps_hz = data_rate(r.sinr_target);
    rates.push_back(r.rate_bps_hz);
    rates_by_cell[ue.serving_cell].push_back(r.rate_bps_hz);
    report.per_ue.push_back(r);
  }

  if (!rates.empty()) {
    for (double p : kReportPercentiles) {
      report.percentiles.emplace_back(p, percentile_of(rates, p));
    }
  }
  for (const auto& [cell, cell_rates] : rates_by_cell) {
    report.per_cell_median_rate[cell] = percentile_of(cell_rates, 50.0);
  }
  return report;
}

std::vector<std::pair<double, double>> percentile_gains(
    const EvaluationReport& report, const EvaluationReport& reference) {
  std::vector<std::pair<double, double>> gains;
  for (double p : kReportPercentiles) {
    gains.emplace_back(p, report.percentile(p) / reference.percentile(p));
  }
  return gains;
}

std::vector<GainRow> gain_by_interferer_count(const EvaluationReport& report,
                                              const EvaluationReport& reference,
                                              const MeasurementStatistics& stats,
                                              double dominance_threshold) {
  std::map<int, std::vector<double>> gains_by_count;
  for (const auto& [cell, median_rate] : report.per_cell_median_rate) {
    auto ref = reference.per_cell_median_rate.find(cell);
    if (ref == reference.per_cell_median_rate.end()) continue;
    int dominant = 0;
    auto it = stats.graph.interferers.find(cell);
    if (it != stats.graph.interferers.end()) {
      for (int source : it->second) {
        if (stats.graph.occupancy.at(EdgeKey{source, cell}) >= dominance_threshold) {
          ++dominant;
        }
      }
    }
    gains_by_count[dominant].push_back(median_rate / ref->second);
  }

  std::vector<GainRow> rows;
  for (auto& [count, gains] : gains_by_count) {
    GainRow row;
    row.interferer_count = count;
    row.cell_count = static_cast<int>(gains.size());
    row.median_gain = percentile_of(gains, 50.0);
    if (gains.size() > 1) {
      double mean = 0.0;
      for (double g : gains) mean += g;
      mean /= static_cast<double>(gains.size());
      double ss = 0.0;
      for (double g : gains) ss += (g - mean) * (g - mean);
      row.gain_stddev = std::sqrt(ss / static_cast<double>(gains.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace leap
