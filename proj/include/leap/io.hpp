#pragma once

#include <filesystem>
#include <string>

#include "leap/baseline.hpp"
#include "leap/evaluate.hpp"
#include "leap/measurements.hpp"
#include "leap/netmodel.hpp"
#include "leap/solution.hpp"
#include "leap/solver_ce.hpp"
#include "leap/solver_sl.hpp"

namespace leap::io {

// Write-temp-rename so readers never observe partial files.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);
std::string fnv1a_hex(const std::string& bytes);

// All schemas carry schema_version: 1; dB values are rounded to 0.01 dB and
// probabilities to 1e-9 on write.
std::string snapshot_to_json(const NetworkSnapshot& snapshot);
NetworkSnapshot snapshot_from_json(const std::string& text);

std::string statistics_to_json(const MeasurementStatistics& stats);
MeasurementStatistics statistics_from_json(const std::string& text);

std::string solution_to_json(const PowerControlSolution& solution);
PowerControlSolution solution_from_json(const std::string& text);

std::string fit_to_json(const GaussianFit& fit);

std::string trace_to_csv(const SolverTrace& trace);
std::string report_to_csv(const EvaluationReport& report);
std::string percentiles_to_csv(const EvaluationReport& report);
std::string gains_to_json(const std::vector<std::pair<double, double>>& percentile_gains,
                          const std::vector<GainRow>& gain_rows);
std::string cdf_to_csv(const EvaluationReport& report);

}  // namespace leap::io
