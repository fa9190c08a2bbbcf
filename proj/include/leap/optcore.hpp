#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leap/measurements.hpp"
#include "leap/rng.hpp"

namespace leap {

struct Constants {
  double p_max_w = 0.1;      // per RB
  double n0_w = 0.0;         // noise floor per RB
  double i_max_w = 0.0;      // interference cap
  double gamma_min = 0.0;    // natural-log scale
};

// n0 from dBm/RB; I_max sits (iot_cap_db - 2 * bin_width_db) above the noise
// floor as a cushion for histogram binning error.
Constants make_constants(double n0_dbm_per_rb, double p_max_w_per_rb,
                         double iot_cap_db, double gamma_min_db,
                         double bin_width_db);

struct Bounds {
  double pi_min = 0.0, pi_max = 0.0;
  double alpha_min = 0.0, alpha_max = 1.0;
  double theta_min = 0.0, theta_max = 0.0;
  double gamma_min = 0.0, gamma_max = 0.0;
};

// pi_max = ln P_max, pi_min = gamma_min + ln N0, gamma_max = ln P_max - ln N0,
// theta in [ln N0, ln I_max].
Bounds make_bounds(const Constants& constants);

struct JointOutcome {
  double log_serving = 0.0;  // ln L_e midpoint
  double log_cross = 0.0;    // ln L_{e->c} midpoint
  double probability = 0.0;
  double cumulative = 0.0;   // inclusive, last entry exactly 1
};

struct InstanceEdge {
  int source = 0;  // cell index of the interfering cell e
  int target = 0;  // cell index of the interfered cell c
  double occupancy = 0.0;
  std::vector<JointOutcome> outcomes;
};

struct InstanceCell {
  int cell_id = 0;
  double load = 0.0;               // rho_c
  std::vector<double> log_loss;    // lambda_c(b), ascending
  std::vector<double> prob;        // p_c(b)
};

// The optimization view of the measurement statistics: cells with a serving
// histogram, and edges between them. Flat index layout for the solvers.
struct ProblemInstance {
  Constants constants;
  Bounds bounds;
  std::vector<InstanceCell> cells;  // sorted by cell_id
  std::vector<InstanceEdge> edges;  // sorted by (target, source)
  std::vector<std::vector<int>> in_edges;  // per cell index: edges into it

  std::vector<int> gamma_offset;  // per cell, offset into the flat gamma block
  int total_bins = 0;

  int cell_count() const { return static_cast<int>(cells.size()); }
  int bin_count(int cell) const { return static_cast<int>(cells[cell].log_loss.size()); }
  int cell_index(int cell_id) const;  // -1 when absent
  double enumeration_outcomes(int cell) const;  // prod (1 + |outcomes|) over in-edges
};

ProblemInstance build_instance(const MeasurementStatistics& stats,
                               const Constants& constants);

struct PrimalState {
  std::vector<double> pi, alpha, theta;  // per cell
  std::vector<double> gamma;             // flat, per (cell, bin)
};

struct DualState {
  std::vector<double> block1;  // per (cell, bin)
  std::vector<double> block2;  // per cell
  std::vector<double> block3;  // per (cell, bin)
};

PrimalState zero_primal(const ProblemInstance& inst);
DualState zero_dual(const ProblemInstance& inst);

struct EdgeDraw {
  bool active = false;  // chi_{ec}
  int outcome = 0;      // index into edge outcomes, valid when active
};
using DrawSet = std::vector<EdgeDraw>;

DrawSet sample_draws(const ProblemInstance& inst, rng::Stream& stream);

struct ConstraintValues {
  std::vector<double> block1, block2, block3;
  double max_violation() const;
};

// Utility V(gamma) = ln ln(1 + e^gamma) and its derivative, stable for all
// real gamma.
double utility(double gamma);
double utility_derivative(double gamma);

// sum_{c,b} rho_c p_c(b) V(gamma_c(b))
double objective(const ProblemInstance& inst, const PrimalState& primal);

// The sampled constraint function h(z, chi, xi); feasible means every entry
// <= 0. block1: gamma - pi + (1-alpha)lambda + theta; block2: log-interference
// minus theta; block3: per-bin transmit power cap.
ConstraintValues constraint_h(const ProblemInstance& inst, const PrimalState& primal,
                              const DrawSet& draws);

double lagrangian(const ProblemInstance& inst, const PrimalState& primal,
                  const DualState& dual, const DrawSet& draws);

PrimalState lagrangian_gradient_primal(const ProblemInstance& inst,
                                       const PrimalState& primal,
                                       const DualState& dual, const DrawSet& draws);

// Hot-loop variant: writes h and the gradient into preallocated storage and
// reuses a per-edge scratch buffer.
struct LagrangianWorkspace {
  std::vector<double> edge_term;  // exp(pi_e + alpha_e xi1 - xi2) per edge
};
void eval_h_and_gradient(const ProblemInstance& inst, const PrimalState& primal,
                         const DualState& dual, const DrawSet& draws,
                         ConstraintValues& h_out, PrimalState& grad_out,
                         LagrangianWorkspace& ws);

void box_project(const Bounds& bounds, PrimalState& primal);

struct enumeration_infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact E[ln(sum chi e^{pi + a L1 - L2} + N0)] at cell c by enumerating, per
// in-edge, absence (prob 1-a) plus each joint bin (prob a p(b)). Throws
// enumeration_infeasible past outcome_cap combinations.
double expected_log_interference_exact(const ProblemInstance& inst,
                                       const PrimalState& primal, int cell,
                                       double outcome_cap = 1e7);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

McEstimate expected_log_interference_mc(const ProblemInstance& inst,
                                        const PrimalState& primal, int cell,
                                        std::int64_t samples, rng::Stream& stream);

struct CellFeasibility {
  int cell_id = 0;
  double block2_violation = 0.0;  // E[log interference] - theta_c
  double standard_error = 0.0;    // 0 for exact evaluation
  bool exact = false;
};

struct FeasibilityReport {
  double max_block1 = 0.0;  // deterministic slacks (positive = violated)
  double max_block3 = 0.0;
  std::vector<CellFeasibility> block2;
  bool feasible = false;  // block1/block3 <= tol, block2 within 3 SE
};

FeasibilityReport feasibility_check(const ProblemInstance& inst,
                                    const PrimalState& primal,
                                    std::int64_t mc_samples, std::uint64_t seed,
                                    double outcome_cap = 1e7);

// Feasibility-preserving projection: box-clamp, then repair the power cap
// (lower pi), the interference target (raise theta to the expected
// log-interference) and the SINR grid (lower gamma onto the budget). Leaves
// h <= 0 whenever the bounds allow it; residual_after reports what the caps
// made unavoidable.
enum class Block2Repair {
  exact_when_enumerable,  // raise theta via exact enumeration if it fits
  custom,                 // use the supplied rhs function
  skip,                   // leave theta as clamped
};

struct RepairResult {
  PrimalState primal;
  double residual_after = 0.0;
  bool theta_capped = false;
  bool gamma_floored = false;
};

RepairResult feasibility_project(
    const ProblemInstance& inst, PrimalState primal, Block2Repair mode,
    const std::function<double(int cell, const PrimalState&)>& block2_rhs = nullptr,
    double outcome_cap = 1e7);

// Sets every gamma onto its SINR budget at the current (pi, alpha, theta);
// the decoded parameters deliver exactly this grid.
void complete_gamma(const ProblemInstance& inst, PrimalState& primal);

// Step metric for the (pi, alpha) pair. Raw gradient steps are badly
// conditioned: alpha multiplies log losses of ~20 natural units while pi
// couples with coefficient 1, so the saddle dynamics rotate fast in one
// direction and crawl in another. Stepping in the sheared coordinates
// (pi + mean_lambda * alpha, alpha) centers the loss features; alpha then
// couples only through the per-bin spread, and its step is scaled by the
// inverse spread variance. The map is a fixed symmetric positive metric, so
// fixed points are unchanged.
struct StepMetric {
  std::vector<double> lambda_mean;  // per cell
  std::vector<double> alpha_gain;   // 1 / max(1, Var(lambda))
  double alpha_min = 0.0, alpha_max = 1.0;

  // Sheared step with the alpha box handled inside: the pi compensation uses
  // the clamped alpha move, so a pinned alpha never kicks pi.
  void apply_pi_alpha(double step, const PrimalState& grad, PrimalState& z) const {
    for (std::size_t i = 0; i < z.pi.size(); ++i) {
      const double d_alpha =
          step * alpha_gain[i] * (grad.alpha[i] - lambda_mean[i] * grad.pi[i]);
      const double alpha_new =
          std::clamp(z.alpha[i] + d_alpha, alpha_min, alpha_max);
      const double moved = alpha_new - z.alpha[i];
      z.alpha[i] = alpha_new;
      z.pi[i] += step * grad.pi[i] - moved * lambda_mean[i];
    }
  }
};

StepMetric make_step_metric(const ProblemInstance& inst);

}  // namespace leap
