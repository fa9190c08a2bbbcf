#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "leap/optcore.hpp"
#include "leap/solution.hpp"
#include "leap/solver_sl.hpp"

namespace leap {

struct EdgeFit {
  double mean[2] = {0.0, 0.0};        // (E ln L_e, E ln L_{e->c})
  double cov[3] = {0.0, 0.0, 0.0};    // c11, c12, c22 after regularization
  bool degenerate = false;            // single-bin histogram
};

struct GaussianFit {
  std::map<EdgeKey, EdgeFit> edges;
  double regularization = 1e-6;
};

// Histogram-weighted first and second central moments of the joint
// log-loss distribution, plus +eps on the covariance diagonal.
EdgeFit fit_edge(const Histogram2D& joint, double regularization = 1e-6);
GaussianFit fit_gaussians(const MeasurementStatistics& stats);

// Expected linear interference contribution of one edge under the log-normal
// model: exp(pi + beta' m + 1/2 beta' C beta) with beta = [alpha, -1].
double g_hat(double pi, double alpha, const EdgeFit& fit);
// d g_hat / d alpha at fixed pi, divided by g_hat (the exponent derivative).
double g_hat_alpha_derivative(double alpha, const EdgeFit& fit);

struct CeConfig {
  std::int64_t max_iterations = 200000;
  double kkt_tolerance = 1e-6;
  double initial_step = 1.0;
  std::int64_t checkpoint_every = 1000;
};

struct ce_nonconvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CeResult {
  PowerControlSolution solution;
  SolverTrace trace;
  PrimalState primal;
  double kkt_residual = 0.0;
  std::int64_t iterations = 0;
};

// Deterministic convex program: the stochastic interference constraint is
// replaced by its moment-generating-function closed form, then solved with a
// projected extragradient on the same Lagrangian machinery. Throws
// ce_nonconvergence when the KKT residual misses the tolerance within the
// iteration budget.
CeResult solve_ce(const ProblemInstance& inst, const GaussianFit& fit,
                  const CeConfig& config = {});

// The certainty-equivalent block2 value ln(sum a ghat + N0) - theta for one
// cell; exposed for the convexity and feasibility tests.
double ce_block2(const ProblemInstance& inst, const GaussianFit& fit,
                 const PrimalState& primal, int cell);

}  // namespace leap
