#pragma once

#include <functional>
#include <vector>

#include "leap/evaluate.hpp"
#include "leap/measurements.hpp"
#include "leap/optcore.hpp"
#include "leap/solution.hpp"

namespace leap {

struct FaFpcConfig {
  double alpha = 0.8;
  std::vector<double> i_nominal_db_above_n0 = {5.0, 10.0, 15.0};
};

struct FaFpcResult {
  PowerControlSolution solution;
  double i_nominal_db_above_n0 = 0.0;
  std::vector<int> capped_cells;  // P0 clamp hit: some UEs below threshold
};

// P0 per cell clears the decoding threshold for the worst serving-histogram
// bin under the nominal interference level; clamped so the per-bin transmit
// PSD never exceeds P_max.
double fa_fpc_p0(double sinr_min_linear, double i_nominal_w, double l_worst_linear,
                 double alpha);

FaFpcResult fa_fpc_solution(const MeasurementStatistics& stats, double alpha,
                            double i_nominal_db_above_n0, const Constants& constants);

struct BestFaFpc {
  FaFpcResult best;
  std::vector<std::pair<double, double>> sweep;  // (i_nominal_db, median rate)
};

// Evaluates each sweep point and keeps the config with the highest median
// data rate; ties go to the lower nominal interference.
BestFaFpc best_fa_fpc(
    const MeasurementStatistics& stats, const FaFpcConfig& config,
    const Constants& constants,
    const std::function<EvaluationReport(const PowerControlSolution&)>& evaluate_fn);

}  // namespace leap
