#pragma once

#include <map>
#include <string>
#include <vector>

#include "leap/measurements.hpp"
#include "leap/netmodel.hpp"
#include "leap/solution.hpp"

namespace leap {

struct UEResult {
  int ue_id = 0;
  int serving_cell = 0;
  double sinr_target = 0.0;   // linear
  double rate_bps_hz = 0.0;
};

struct EvaluationReport {
  std::string provenance;
  std::vector<UEResult> per_ue;  // snapshot order
  std::vector<std::pair<double, double>> percentiles;  // (p, rate)
  std::map<int, double> per_cell_median_rate;

  double percentile(double p) const;  // from the precomputed table
  double median() const { return percentile(50.0); }
};

inline constexpr double kReportPercentiles[] = {5, 10, 20, 50, 80, 90, 95};

// min(P_max / l, P0 * l^{-(1-alpha)}) / I*, evaluated in the log domain.
double sinr_target(const CellParameters& params, double loss_linear, double p_max_w);

// Shannon rate in bits/s/Hz.
double data_rate(double sinr_linear);

// Type-7 percentile (linear interpolation between order statistics);
// values need not be sorted.
double percentile_of(std::vector<double> values, double p);

EvaluationReport evaluate_snapshot(const PowerControlSolution& solution,
                                   const NetworkSnapshot& snapshot, double p_max_w);

// Percentile-wise ratios report/reference at the standard percentiles.
std::vector<std::pair<double, double>> percentile_gains(
    const EvaluationReport& report, const EvaluationReport& reference);

struct GainRow {
  int interferer_count = 0;  // dominant interferers suffered by the cells
  int cell_count = 0;
  double median_gain = 0.0;
  double gain_stddev = 0.0;  // sample standard deviation within the group
};

// Cells grouped by |{e in J_c : a_{e->c} >= threshold}|; per-group median of
// the per-cell median-rate ratios, with the sample std-dev as error bar.
std::vector<GainRow> gain_by_interferer_count(const EvaluationReport& report,
                                              const EvaluationReport& reference,
                                              const MeasurementStatistics& stats,
                                              double dominance_threshold);

}  // namespace leap
