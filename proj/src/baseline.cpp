#include "leap/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leap/units.hpp"

namespace leap {

double fa_fpc_p0(double sinr_min_linear, double i_nominal_w, double l_worst_linear,
                 double alpha) {
  return sinr_min_linear * i_nominal_w * std::pow(l_worst_linear, 1.0 - alpha);
}

FaFpcResult fa_fpc_solution(const MeasurementStatistics& stats, double alpha,
                            double i_nominal_db_above_n0, const Constants& constants) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must be in [0, 1]");
  if (stats.serving.empty()) throw std::invalid_argument("statistics are empty");

  FaFpcResult result;
  result.i_nominal_db_above_n0 = i_nominal_db_above_n0;
  result.solution.provenance = "fa_fpc";

  const double i_nominal_w = constants.n0_w * db_to_linear(i_nominal_db_above_n0);
  const double sinr_min_linear = std::exp(constants.gamma_min);

  for (const auto& [cell_id, hist] : stats.serving) {
    const double l_worst = db_to_linear(hist.max_midpoint_db());
    double p0 = fa_fpc_p0(sinr_min_linear, i_nominal_w, l_worst, alpha);
    // pi + alpha * lambda <= ln P_max for every bin; the largest bin binds.
    const double p0_cap = constants.p_max_w / std::pow(l_worst, alpha);
    if (p0 > p0_cap) {
      p0 = p0_cap;
      result.capped_cells.push_back(cell_id);
    }
    result.solution.cells.push_back({cell_id, p0, alpha, i_nominal_w});
  }
  return result;
}

BestFaFpc best_fa_fpc(
    const MeasurementStatistics& stats, const FaFpcConfig& config,
    const Constants& constants,
    const std::function<EvaluationReport(const PowerControlSolution&)>& evaluate_fn) {
  if (config.i_nominal_db_above_n0.empty()) {
    throw std::invalid_argument("empty FA-FPC sweep");
  }
  std::vector<double> sweep = config.i_nominal_db_above_n0;
  std::sort(sweep.begin(), sweep.end());

  BestFaFpc best;
  double best_median = -1.0;
  for (double i_db : sweep) {
    FaFpcResult candidate = fa_fpc_solution(stats, config.alpha, i_db, constants);
    const double median = evaluate_fn(candidate.solution).median();
    best.sweep.emplace_back(i_db, median);
    if (median > best_median) {
      best_median = median;
      best.best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace leap
