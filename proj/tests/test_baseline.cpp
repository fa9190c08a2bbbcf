#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "leap/baseline.hpp"
#include "leap/units.hpp"

using namespace leap;

namespace {

// Cell 0 with bins peaking at l_worst_db, cell 1 with a single bin.
MeasurementStatistics two_cell_stats(double l_worst_db) {
  MeasurementStatistics stats;
  stats.bin_width_db = 1.0;
  Histogram1D h0;
  h0.bin_width_db = 1.0;
  h0.total_samples = 4;
  const int worst = static_cast<int>(std::floor(l_worst_db));
  h0.bins = {Hist1DBin{worst - 20, 1, 0.25}, Hist1DBin{worst - 10, 1, 0.25},
             Hist1DBin{worst, 2, 0.5}};
  stats.serving[0] = h0;
  Histogram1D h1;
  h1.bin_width_db = 1.0;
  h1.total_samples = 1;
  h1.bins = {Hist1DBin{worst - 15, 1, 1.0}};
  stats.serving[1] = h1;
  stats.load[0] = 4.0;
  stats.load[1] = 1.0;
  return stats;
}

Constants test_constants() {
  Constants k;
  k.p_max_w = 0.1;
  k.n0_w = 2.29e-15;
  k.i_max_w = k.n0_w * db_to_linear(18.0);
  k.gamma_min = std::log(0.1);  // SINR_min 0.1 linear
  return k;
}

}  // namespace

TEST_CASE("worked P0 value") {
  // SINR_min 0.1, I_nominal = 10 N0 = 2.29e-14 W, l_worst = 1e10, alpha 0.8
  CHECK(fa_fpc_p0(0.1, 2.29e-14, 1e10, 0.8) ==
        doctest::Approx(2.29e-13).epsilon(1e-9));
  // full compensation drops the loss dependence
  CHECK(fa_fpc_p0(0.1, 2.29e-14, 1e10, 1.0) ==
        doctest::Approx(0.1 * 2.29e-14).epsilon(1e-12));
  CHECK(fa_fpc_p0(0.1, 2.29e-14, 1e3, 1.0) ==
        doctest::Approx(0.1 * 2.29e-14).epsilon(1e-12));
}

TEST_CASE("per-bin targets clear the threshold and respect the cap") {
  const Constants k = test_constants();
  const MeasurementStatistics stats = two_cell_stats(120.0);
  const FaFpcResult result = fa_fpc_solution(stats, 0.8, 10.0, k);
  CHECK(result.capped_cells.empty());

  const double sinr_min = std::exp(k.gamma_min);
  for (const auto& [cell, hist] : stats.serving) {
    const CellParameters& params = result.solution.for_cell(cell);
    for (const auto& bin : hist.bins) {
      const double l = db_to_linear(hist.midpoint_db(bin.index));
      const double target = sinr_target(params, l, k.p_max_w);
      CHECK(target >= sinr_min - 1e-12);
      // implied transmit PSD stays under the cap
      const double psd = target * params.i_star_w * l;
      CHECK(psd <= k.p_max_w * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("single-bin cell hits the threshold exactly when uncapped") {
  const Constants k = test_constants();
  const MeasurementStatistics stats = two_cell_stats(120.0);
  const FaFpcResult result = fa_fpc_solution(stats, 0.8, 5.0, k);
  const Histogram1D& h1 = stats.serving.at(1);
  const double l = db_to_linear(h1.max_midpoint_db());
  const double target = sinr_target(result.solution.for_cell(1), l, k.p_max_w);
  CHECK(target == doctest::Approx(std::exp(k.gamma_min)).epsilon(1e-12));
}

TEST_CASE("cap clamps and flags hopeless cells") {
  const Constants k = test_constants();
  const MeasurementStatistics stats = two_cell_stats(160.0);
  const FaFpcResult result = fa_fpc_solution(stats, 0.8, 15.0, k);
  REQUIRE(result.capped_cells.size() >= 1);
  CHECK(result.capped_cells[0] == 0);
  const CellParameters& params = result.solution.for_cell(0);
  const double l_worst = db_to_linear(stats.serving.at(0).max_midpoint_db());
  CHECK(params.p0_w_per_rb ==
        doctest::Approx(k.p_max_w / std::pow(l_worst, 0.8)).epsilon(1e-12));
}

TEST_CASE("alpha bounds are enforced") {
  const Constants k = test_constants();
  const MeasurementStatistics stats = two_cell_stats(120.0);
  CHECK_THROWS_AS(fa_fpc_solution(stats, 1.2, 5.0, k), std::invalid_argument);
  CHECK_THROWS_AS(fa_fpc_solution(stats, -0.1, 5.0, k), std::invalid_argument);
  MeasurementStatistics empty;
  CHECK_THROWS_AS(fa_fpc_solution(empty, 0.8, 5.0, k), std::invalid_argument);
}

TEST_CASE("best FA-FPC selection") {
  const Constants k = test_constants();
  const MeasurementStatistics stats = two_cell_stats(120.0);

  // Single-element sweep returns that element.
  FaFpcConfig single;
  single.i_nominal_db_above_n0 = {10.0};
  int evals = 0;
  auto fake_eval = [&](const PowerControlSolution&) {
    ++evals;
    EvaluationReport r;
    r.percentiles = {{50.0, 1.0}};
    return r;
  };
  const BestFaFpc one = best_fa_fpc(stats, single, k, fake_eval);
  CHECK(one.best.i_nominal_db_above_n0 == 10.0);
  CHECK(evals == 1);

  // A strictly dominating config wins; exact ties keep the lower nominal.
  FaFpcConfig sweep;
  sweep.i_nominal_db_above_n0 = {15.0, 5.0, 10.0};
  auto scored_eval = [&](const PowerControlSolution& s) {
    EvaluationReport r;
    const double i_db = 10.0 * std::log10(s.cells[0].i_star_w / k.n0_w);
    // peak score at 10 dB
    r.percentiles = {{50.0, 2.0 - std::abs(i_db - 10.0)}};
    return r;
  };
  const BestFaFpc best = best_fa_fpc(stats, sweep, k, scored_eval);
  CHECK(best.best.i_nominal_db_above_n0 == 10.0);
  CHECK(best.sweep.size() == 3);
  CHECK(best.sweep[0].first == 5.0);  // evaluated in ascending order

  auto tie_eval = [&](const PowerControlSolution&) {
    EvaluationReport r;
    r.percentiles = {{50.0, 1.0}};
    return r;
  };
  const BestFaFpc tie = best_fa_fpc(stats, sweep, k, tie_eval);
  CHECK(tie.best.i_nominal_db_above_n0 == 5.0);

  FaFpcConfig empty;
  empty.i_nominal_db_above_n0 = {};
  CHECK_THROWS_AS(best_fa_fpc(stats, empty, k, tie_eval), std::invalid_argument);
}
