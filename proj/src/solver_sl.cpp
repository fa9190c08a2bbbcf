#include "leap/solver_sl.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "leap/parallel.hpp"

namespace leap {

namespace {

constexpr double kDualCap = 1e9;

void running_mean(std::vector<double>& mean, const std::vector<double>& x, double n) {
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] += (x[i] - mean[i]) / n;
  }
}

void check_finite(const std::vector<double>& v, const char* name, std::int64_t iter) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw numerical_failure(std::string(name) + "[" + std::to_string(i) +
                              "] is not finite at iteration " + std::to_string(iter));
    }
  }
}

double norm2(const DualState& p) {
  double s = 0.0;
  for (double v : p.block1) s += v * v;
  for (double v : p.block2) s += v * v;
  for (double v : p.block3) s += v * v;
  return std::sqrt(s);
}

// Start from a point whose interference targets match its powers: midpoint
// powers pulled under the IoT cap, theta at the estimated expected
// log-interference. A theta far below the real interference leaves block2
// violated for thousands of iterations and pumps the multipliers.
PrimalState initial_primal(const ProblemInstance& inst, std::uint64_t seed) {
  const Bounds& b = inst.bounds;
  PrimalState z = zero_primal(inst);
  for (int c = 0; c < inst.cell_count(); ++c) {
    z.pi[c] = 0.5 * (b.pi_min + b.pi_max);
    z.alpha[c] = 0.8;
    z.theta[c] = b.theta_min;
  }

  auto estimate = [&](int cell) {
    if (inst.enumeration_outcomes(cell) <= 1e5) {
      return expected_log_interference_exact(inst, z, cell);
    }
    auto stream = rng::substream(
        seed, {rng::tag::mc_oracle, 0xc0ull,
               static_cast<std::uint64_t>(inst.cells[cell].cell_id)});
    return expected_log_interference_mc(inst, z, cell, 2000, stream).estimate;
  };

  double worst = b.theta_min;
  for (int c = 0; c < inst.cell_count(); ++c) {
    worst = std::max(worst, estimate(c));
  }
  if (worst > b.theta_max) {
    // Interference scales one-for-one with a uniform power shift while it
    // dominates the noise floor.
    const double shift = (worst - b.theta_max) + 0.5;
    for (int c = 0; c < inst.cell_count(); ++c) {
      z.pi[c] = std::max(b.pi_min, z.pi[c] - shift);
    }
  }
  for (int c = 0; c < inst.cell_count(); ++c) {
    z.theta[c] = std::clamp(estimate(c), b.theta_min, b.theta_max);
  }
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    for (std::size_t bn = 0; bn < cell.log_loss.size(); ++bn) {
      z.gamma[off + bn] = std::clamp(
          z.pi[c] - (1.0 - z.alpha[c]) * cell.log_loss[bn] - z.theta[c],
          b.gamma_min, b.gamma_max);
    }
  }
  return z;
}

TracePoint diagnose(const ProblemInstance& inst, const PrimalState& averaged,
                    const DualState& dual, std::int64_t iteration, double step,
                    std::int64_t mc_samples, std::uint64_t seed, int threads) {
  TracePoint pt;
  pt.iteration = iteration;
  pt.step_size = step;
  pt.dual_norm = norm2(dual);
  PrimalState completed = averaged;

  std::vector<double> violation(inst.cells.size(), 0.0);
  std::vector<double> se(inst.cells.size(), 0.0);
  parallel_for(inst.cell_count(), threads, [&](int c) {
    auto stream = rng::substream(
        seed, {rng::tag::solver_diag, static_cast<std::uint64_t>(iteration),
               static_cast<std::uint64_t>(inst.cells[c].cell_id)});
    const McEstimate est =
        expected_log_interference_mc(inst, averaged, c, mc_samples, stream);
    violation[c] = est.estimate - averaged.theta[c];
    se[c] = est.standard_error;
    // Report the objective of the decoded parameters: theta tied to the
    // estimated interference of the averaged powers.
    completed.theta[c] =
        std::clamp(est.estimate, inst.bounds.theta_min, inst.bounds.theta_max);
  });
  complete_gamma(inst, completed);
  pt.objective = objective(inst, completed);
  pt.max_violation = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < inst.cell_count(); ++c) {
    if (violation[c] > pt.max_violation) {
      pt.max_violation = violation[c];
      pt.violation_se = se[c];
    }
  }
  if (inst.cell_count() == 0) pt.max_violation = 0.0;
  return pt;
}

// Multipliers consistent with the initial primal: p1 at the gamma
// stationarity value and p2 balancing the theta column. Zero-initialized
// duals overshoot by orders of magnitude while block2 stays violated.
DualState initial_dual(const ProblemInstance& inst, const PrimalState& z) {
  DualState p = zero_dual(inst);
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    double total = 0.0;
    for (std::size_t b = 0; b < cell.prob.size(); ++b) {
      const double p1 =
          cell.load * cell.prob[b] * utility_derivative(z.gamma[off + b]);
      p.block1[off + b] = p1;
      total += p1;
    }
    p.block2[c] = total;
  }
  return p;
}

}  // namespace

SolveResult solve(const ProblemInstance& inst, const SolverConfig& config) {
  if (!(config.zeta > 0.5) || config.zeta > 1.0) {
    throw std::invalid_argument("zeta must lie in (0.5, 1]");
  }
  if (config.iterations < 1) throw std::invalid_argument("iterations must be >= 1");

  PrimalState z = initial_primal(inst, config.seed);
  DualState p = initial_dual(inst, z);
  PrimalState z_mean = z;
  DualState p_mean = p;

  SolveResult result;
  result.trace.algorithm = "sl";

  ConstraintValues h;
  PrimalState grad;
  LagrangianWorkspace ws;
  bool dual_cap_hit = false;
  const StepMetric metric = make_step_metric(inst);

  const std::int64_t averaging_start = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(
             static_cast<double>(config.iterations) * config.averaging_start_fraction));

  for (std::int64_t n = 1; n <= config.iterations; ++n) {
    // Average iterates from the averaging window start; earlier iterates are
    // the warm-up transient.
    const double dn = static_cast<double>(std::max<std::int64_t>(
        1, n - averaging_start + 1));
    if (n <= averaging_start) {
      z_mean = z;
      p_mean = p;
    } else {
      running_mean(z_mean.pi, z.pi, dn);
      running_mean(z_mean.alpha, z.alpha, dn);
      running_mean(z_mean.theta, z.theta, dn);
      running_mean(z_mean.gamma, z.gamma, dn);
      running_mean(p_mean.block1, p.block1, dn);
      running_mean(p_mean.block2, p.block2, dn);
      running_mean(p_mean.block3, p.block3, dn);
    }

    const double a_n =
        config.step_scale /
        std::pow(static_cast<double>(n) + config.step_offset, config.zeta);

    auto stream = rng::substream(config.seed,
                                 {rng::tag::solver_draw, static_cast<std::uint64_t>(n)});
    const DrawSet draws = sample_draws(inst, stream);

    eval_h_and_gradient(inst, z, p, draws, h, grad, ws);

    metric.apply_pi_alpha(a_n, grad, z);
    for (std::size_t i = 0; i < z.theta.size(); ++i) z.theta[i] += a_n * grad.theta[i];
    for (std::size_t i = 0; i < z.gamma.size(); ++i) z.gamma[i] += a_n * grad.gamma[i];

    // Flag blow-ups before the projection can mask them.
    check_finite(z.pi, "pi", n);
    check_finite(z.alpha, "alpha", n);
    check_finite(z.theta, "theta", n);
    check_finite(z.gamma, "gamma", n);
    box_project(inst.bounds, z);
#ifndef NDEBUG
    for (double v : z.pi) assert(v >= inst.bounds.pi_min && v <= inst.bounds.pi_max);
    for (double v : z.alpha) assert(v >= 0.0 && v <= 1.0);
    for (double v : z.theta)
      assert(v >= inst.bounds.theta_min && v <= inst.bounds.theta_max);
    for (double v : z.gamma)
      assert(v >= inst.bounds.gamma_min && v <= inst.bounds.gamma_max);
#endif

    auto dual_ascent = [&](std::vector<double>& dual, const std::vector<double>& hv) {
      for (std::size_t i = 0; i < dual.size(); ++i) {
        double v = dual[i] + a_n * hv[i];
        if (v < 0.0) v = 0.0;
        if (v > kDualCap) {
          v = kDualCap;
          dual_cap_hit = true;
        }
        dual[i] = v;
      }
    };
    dual_ascent(p.block1, h.block1);
    dual_ascent(p.block2, h.block2);
    dual_ascent(p.block3, h.block3);
#ifndef NDEBUG
    for (double v : p.block1) assert(v >= 0.0);
    for (double v : p.block2) assert(v >= 0.0);
    for (double v : p.block3) assert(v >= 0.0);
#endif
    check_finite(p.block1, "dual_block1", n);
    check_finite(p.block2, "dual_block2", n);
    check_finite(p.block3, "dual_block3", n);

    if (config.diagnostics_every > 0 && n % config.diagnostics_every == 0) {
      result.trace.points.push_back(diagnose(inst, z_mean, p_mean, n, a_n,
                                             config.mc_samples_diag, config.seed,
                                             config.threads));
    }
  }

  // Tie the averaged iterate back to the constraint surface: exact
  // enumeration of the interference expectation where it fits, Monte Carlo
  // otherwise.
  const std::int64_t polish_samples = std::max<std::int64_t>(
      20000, config.mc_samples_diag);
  auto block2_rhs = [&](int cell, const PrimalState& state) {
    if (inst.enumeration_outcomes(cell) <= 1e7) {
      return expected_log_interference_exact(inst, state, cell);
    }
    auto stream = rng::substream(
        config.seed, {rng::tag::mc_oracle,
                      static_cast<std::uint64_t>(inst.cells[cell].cell_id)});
    return expected_log_interference_mc(inst, state, cell, polish_samples, stream)
        .estimate;
  };
  RepairResult repaired =
      feasibility_project(inst, z_mean, Block2Repair::custom, block2_rhs);
  result.averaged = std::move(repaired.primal);
  result.repair_residual = repaired.residual_after;
  result.averaged_dual = std::move(p_mean);
  result.dual_cap_hit = dual_cap_hit;
  result.solution = decode_solution(result.averaged, inst, "sl",
                                    objective(inst, result.averaged));
  return result;
}

PowerControlSolution decode_solution(const PrimalState& averaged,
                                     const ProblemInstance& inst,
                                     std::string provenance, double objective_value) {
  PowerControlSolution solution;
  solution.provenance = std::move(provenance);
  solution.objective = objective_value;
  for (int c = 0; c < inst.cell_count(); ++c) {
    CellParameters params;
    params.cell_id = inst.cells[c].cell_id;
    params.p0_w_per_rb = std::exp(averaged.pi[c]);
    params.alpha = averaged.alpha[c];
    params.i_star_w = std::exp(averaged.theta[c]);
    solution.cells.push_back(params);
  }
  return solution;
}

DiagnosticsVerdict convergence_diagnostics(const SolverTrace& trace) {
  DiagnosticsVerdict verdict;
  const auto& pts = trace.points;
  if (pts.empty()) return verdict;
  const std::size_t window = std::min<std::size_t>(10, pts.size());
  const std::size_t begin = pts.size() - window;

  double obj_min = pts[begin].objective, obj_max = pts[begin].objective;
  bool violation_ok = true;
  bool dual_monotone_up = window > 1;
  for (std::size_t i = begin; i < pts.size(); ++i) {
    obj_min = std::min(obj_min, pts[i].objective);
    obj_max = std::max(obj_max, pts[i].objective);
    if (pts[i].max_violation > 3.0 * pts[i].violation_se) violation_ok = false;
    if (i > begin && pts[i].dual_norm <= pts[i - 1].dual_norm) {
      dual_monotone_up = false;
    }
  }
  const double scale = std::max(1e-12, std::abs(0.5 * (obj_min + obj_max)));
  verdict.objective_rel_variation = (obj_max - obj_min) / scale;
  verdict.violation_ok = violation_ok;
  verdict.dual_diverging =
      dual_monotone_up &&
      pts.back().dual_norm > 1.25 * pts[begin].dual_norm;

  const bool converged = verdict.objective_rel_variation < 1e-4 && violation_ok &&
                         !verdict.dual_diverging;
  verdict.verdict = converged ? Verdict::converged : Verdict::not_converged;
  return verdict;
}

}  // namespace leap
