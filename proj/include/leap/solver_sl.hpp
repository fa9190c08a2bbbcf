#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leap/optcore.hpp"
#include "leap/solution.hpp"

namespace leap {

struct SolverConfig {
  std::int64_t iterations = 50000;
  double zeta = 1.0;        // step exponent, a_n = step_scale / (n + offset)^zeta
  double step_scale = 1.0;
  double step_offset = 0.0;  // shifts the schedule so early steps stay moderate
  std::uint64_t seed = 1;
  std::int64_t diagnostics_every = 500;
  std::int64_t mc_samples_diag = 2000;
  // Averaging starts at this fraction of the run (tail averaging); the
  // full-history average keeps the initial transient alive at O(1/n).
  double averaging_start_fraction = 0.5;
  int threads = 0;          // 0 = hardware concurrency, applies to diagnostics
};

struct TracePoint {
  std::int64_t iteration = 0;
  double objective = 0.0;       // at the averaged primal
  double max_violation = 0.0;   // worst block2 estimate at the averaged primal
  double violation_se = 0.0;
  double dual_norm = 0.0;
  double step_size = 0.0;
};

struct SolverTrace {
  std::string algorithm;
  std::vector<TracePoint> points;
};

struct SolveResult {
  PowerControlSolution solution;
  SolverTrace trace;
  PrimalState averaged;       // after the final feasibility projection
  DualState averaged_dual;
  double repair_residual = 0.0;
  bool dual_cap_hit = false;
};

// Stochastic primal-dual saddle-point iteration: per-edge Bernoulli and
// joint-bin draws, projected gradient ascent on the primal, multiplier
// descent on the dual, running averages of both. The averaged primal is
// passed through the feasibility projection before decoding.
SolveResult solve(const ProblemInstance& inst, const SolverConfig& config);

PowerControlSolution decode_solution(const PrimalState& averaged,
                                     const ProblemInstance& inst,
                                     std::string provenance, double objective);

enum class Verdict { converged, not_converged };

struct DiagnosticsVerdict {
  Verdict verdict = Verdict::not_converged;
  double objective_rel_variation = 0.0;
  bool violation_ok = false;
  bool dual_diverging = false;
};

// Converged when, over the last 10 checkpoints, the averaged-primal objective
// varies by < 1e-4 relative, the block2 estimate stays within 3 standard
// errors, and the dual norm is not growing monotonically.
DiagnosticsVerdict convergence_diagnostics(const SolverTrace& trace);

}  // namespace leap
