#include "leap/solver_ce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leap/units.hpp"

namespace leap {

EdgeFit fit_edge(const Histogram2D& joint, double regularization) {
  if (joint.bins.empty()) throw std::invalid_argument("empty joint histogram");
  EdgeFit fit;
  double m1 = 0.0, m2 = 0.0;
  for (const auto& b : joint.bins) {
    m1 += b.probability * db_to_nat(joint.midpoint_db(b.i));
    m2 += b.probability * db_to_nat(joint.midpoint_db(b.j));
  }
  double c11 = 0.0, c12 = 0.0, c22 = 0.0;
  for (const auto& b : joint.bins) {
    const double l1 = db_to_nat(joint.midpoint_db(b.i));
    const double l2 = db_to_nat(joint.midpoint_db(b.j));
    c11 += b.probability * (l1 - m1) * (l1 - m1);
    c12 += b.probability * (l1 - m1) * (l2 - m2);
    c22 += b.probability * (l2 - m2) * (l2 - m2);
  }
  fit.mean[0] = m1;
  fit.mean[1] = m2;
  fit.cov[0] = c11 + regularization;
  fit.cov[1] = c12;
  fit.cov[2] = c22 + regularization;
  fit.degenerate = joint.bins.size() == 1;
  return fit;
}

GaussianFit fit_gaussians(const MeasurementStatistics& stats) {
  GaussianFit fit;
  for (const auto& [key, joint] : stats.joint) {
    fit.edges[key] = fit_edge(joint, fit.regularization);
  }
  return fit;
}

double g_hat(double pi, double alpha, const EdgeFit& fit) {
  // beta = [alpha, -1]: beta'm = alpha m1 - m2,
  // beta'C beta = alpha^2 c11 - 2 alpha c12 + c22.
  const double quad =
      alpha * alpha * fit.cov[0] - 2.0 * alpha * fit.cov[1] + fit.cov[2];
  return std::exp(pi + alpha * fit.mean[0] - fit.mean[1] + 0.5 * quad);
}

double g_hat_alpha_derivative(double alpha, const EdgeFit& fit) {
  return fit.mean[0] + alpha * fit.cov[0] - fit.cov[1];
}

namespace {

struct CeProblem {
  const ProblemInstance& inst;
  std::vector<const EdgeFit*> edge_fit;  // aligned with inst.edges

  CeProblem(const ProblemInstance& instance, const GaussianFit& fit)
      : inst(instance) {
    edge_fit.reserve(inst.edges.size());
    for (const InstanceEdge& e : inst.edges) {
      const EdgeKey key{inst.cells[e.source].cell_id, inst.cells[e.target].cell_id};
      auto it = fit.edges.find(key);
      if (it == fit.edges.end()) {
        throw std::invalid_argument("no Gaussian fit for edge " +
                                    std::to_string(key.source) + "->" +
                                    std::to_string(key.target));
      }
      edge_fit.push_back(&it->second);
    }
  }

  void eval(const PrimalState& z, const DualState& p, ConstraintValues& h,
            PrimalState& grad, std::vector<double>& edge_term) const {
    const double log_pmax = std::log(inst.constants.p_max_w);
    h.block1.resize(inst.total_bins);
    h.block3.resize(inst.total_bins);
    h.block2.resize(inst.cells.size());
    edge_term.resize(inst.edges.size());

    grad.pi.assign(inst.cells.size(), 0.0);
    grad.alpha.assign(inst.cells.size(), 0.0);
    grad.theta.assign(inst.cells.size(), 0.0);
    grad.gamma.resize(inst.total_bins);

    for (int c = 0; c < inst.cell_count(); ++c) {
      const InstanceCell& cell = inst.cells[c];
      const int off = inst.gamma_offset[c];
      double pi_g = 0.0, alpha_g = 0.0, theta_g = p.block2[c];
      for (std::size_t b = 0; b < cell.log_loss.size(); ++b) {
        const int i = off + static_cast<int>(b);
        const double lam = cell.log_loss[b];
        h.block1[i] = z.gamma[i] - z.pi[c] + (1.0 - z.alpha[c]) * lam + z.theta[c];
        h.block3[i] = z.pi[c] + z.alpha[c] * lam - log_pmax;
        const double p1 = p.block1[i];
        const double p3 = p.block3[i];
        grad.gamma[i] = cell.load * cell.prob[b] * utility_derivative(z.gamma[i]) - p1;
        pi_g += p1 - p3;
        alpha_g += (p1 - p3) * lam;
        theta_g -= p1;
      }
      grad.pi[c] = pi_g;
      grad.alpha[c] = alpha_g;
      grad.theta[c] = theta_g;
    }

    for (std::size_t ei = 0; ei < inst.edges.size(); ++ei) {
      const InstanceEdge& e = inst.edges[ei];
      edge_term[ei] =
          e.occupancy * g_hat(z.pi[e.source], z.alpha[e.source], *edge_fit[ei]);
    }
    for (int c = 0; c < inst.cell_count(); ++c) {
      double denom = inst.constants.n0_w;
      for (int ei : inst.in_edges[c]) denom += edge_term[ei];
      h.block2[c] = std::log(denom) - z.theta[c];
      if (p.block2[c] == 0.0) continue;
      for (int ei : inst.in_edges[c]) {
        const InstanceEdge& e = inst.edges[ei];
        const double w = edge_term[ei] / denom;
        grad.pi[e.source] -= p.block2[c] * w;
        grad.alpha[e.source] -=
            p.block2[c] * w * g_hat_alpha_derivative(z.alpha[e.source], *edge_fit[ei]);
      }
    }
  }

  double block2_rhs(int cell, const PrimalState& z) const {
    double denom = inst.constants.n0_w;
    for (int ei : inst.in_edges[cell]) {
      const InstanceEdge& e = inst.edges[ei];
      denom += e.occupancy * g_hat(z.pi[e.source], z.alpha[e.source], *edge_fit[ei]);
    }
    return std::log(denom);
  }
};

struct FlatView {
  // z and p stacked for the step-size control norms.
  static double diff_norm(const PrimalState& a, const PrimalState& b,
                          const DualState& pa, const DualState& pb) {
    double s = 0.0;
    auto acc = [&s](const std::vector<double>& x, const std::vector<double>& y) {
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    };
    acc(a.pi, b.pi);
    acc(a.alpha, b.alpha);
    acc(a.theta, b.theta);
    acc(a.gamma, b.gamma);
    acc(pa.block1, pb.block1);
    acc(pa.block2, pb.block2);
    acc(pa.block3, pb.block3);
    return std::sqrt(s);
  }

  static double operator_diff_norm(const PrimalState& ga, const PrimalState& gb,
                                   const ConstraintValues& ha,
                                   const ConstraintValues& hb) {
    double s = 0.0;
    auto acc = [&s](const std::vector<double>& x, const std::vector<double>& y) {
      for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    };
    acc(ga.pi, gb.pi);
    acc(ga.alpha, gb.alpha);
    acc(ga.theta, gb.theta);
    acc(ga.gamma, gb.gamma);
    acc(ha.block1, hb.block1);
    acc(ha.block2, hb.block2);
    acc(ha.block3, hb.block3);
    return std::sqrt(s);
  }
};

void primal_step(const ProblemInstance& inst, const StepMetric& metric,
                 const PrimalState& z, const PrimalState& grad, double step,
                 PrimalState& out) {
  out = z;
  metric.apply_pi_alpha(step, grad, out);
  for (std::size_t i = 0; i < z.theta.size(); ++i) out.theta[i] += step * grad.theta[i];
  for (std::size_t i = 0; i < z.gamma.size(); ++i) out.gamma[i] += step * grad.gamma[i];
  box_project(inst.bounds, out);
}

void dual_step(const DualState& p, const ConstraintValues& h, double step,
               DualState& out) {
  out = p;
  auto upd = [step](std::vector<double>& dst, const std::vector<double>& hv) {
    for (std::size_t i = 0; i < dst.size(); ++i) {
      dst[i] = std::max(0.0, dst[i] + step * hv[i]);
    }
  };
  upd(out.block1, h.block1);
  upd(out.block2, h.block2);
  upd(out.block3, h.block3);
}

// Natural residual of the projected dynamics at unit step, measured
// per coordinate of the sheared geometry; zero exactly at its fixed points.
double kkt_residual(const ProblemInstance& inst, const StepMetric& metric,
                    const PrimalState& z, const DualState& p,
                    const PrimalState& grad, const ConstraintValues& h) {
  const Bounds& b = inst.bounds;
  double r = 0.0;
  for (std::size_t i = 0; i < z.pi.size(); ++i) {
    // alpha move in its box under the sheared gradient
    const double d_alpha = metric.alpha_gain[i] *
                           (grad.alpha[i] - metric.lambda_mean[i] * grad.pi[i]);
    const double alpha_moved = std::clamp(z.alpha[i] + d_alpha, 0.0, 1.0);
    r = std::max(r, std::abs(alpha_moved - z.alpha[i]));
    // pi move at fixed alpha (the sheared coordinate moves identically)
    const double pi_moved = std::clamp(z.pi[i] + grad.pi[i], b.pi_min, b.pi_max);
    r = std::max(r, std::abs(pi_moved - z.pi[i]));
    const double theta_moved =
        std::clamp(z.theta[i] + grad.theta[i], b.theta_min, b.theta_max);
    r = std::max(r, std::abs(theta_moved - z.theta[i]));
  }
  for (std::size_t i = 0; i < z.gamma.size(); ++i) {
    const double moved =
        std::clamp(z.gamma[i] + grad.gamma[i], b.gamma_min, b.gamma_max);
    r = std::max(r, std::abs(moved - z.gamma[i]));
  }
  DualState pd;
  dual_step(p, h, 1.0, pd);
  auto acc = [&r](const std::vector<double>& a, const std::vector<double>& x) {
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - x[i]));
  };
  acc(pd.block1, p.block1);
  acc(pd.block2, p.block2);
  acc(pd.block3, p.block3);
  return r;
}

PrimalState ce_initial_primal(const ProblemInstance& inst) {
  const Bounds& b = inst.bounds;
  PrimalState z = zero_primal(inst);
  for (int c = 0; c < inst.cell_count(); ++c) {
    z.pi[c] = 0.5 * (b.pi_min + b.pi_max);
    z.alpha[c] = 0.8;
    z.theta[c] = b.theta_min + 0.5 * (b.theta_max - b.theta_min);
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

double dual_norm2(const DualState& p) {
  double s = 0.0;
  for (double v : p.block1) s += v * v;
  for (double v : p.block2) s += v * v;
  for (double v : p.block3) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double ce_block2(const ProblemInstance& inst, const GaussianFit& fit,
                 const PrimalState& primal, int cell) {
  const CeProblem problem(inst, fit);
  return problem.block2_rhs(cell, primal) - primal.theta[cell];
}

CeResult solve_ce(const ProblemInstance& inst, const GaussianFit& fit,
                  const CeConfig& config) {
  const CeProblem problem(inst, fit);

  PrimalState z = ce_initial_primal(inst);
  DualState p = zero_dual(inst);
  const StepMetric metric = make_step_metric(inst);

  ConstraintValues h, h_half;
  PrimalState grad, grad_half;
  std::vector<double> scratch, scratch_half;
  PrimalState z_half = z, z_next = z;
  DualState p_half = p, p_next = p;

  CeResult result;
  result.trace.algorithm = "ce";

  double step = config.initial_step;
  const double control = 0.95;  // Khobotov contraction requirement
  double residual = std::numeric_limits<double>::infinity();

  std::int64_t n = 0;
  for (; n < config.max_iterations; ++n) {
    problem.eval(z, p, h, grad, scratch);
    residual = kkt_residual(inst, metric, z, p, grad, h);
    if (config.checkpoint_every > 0 && n % config.checkpoint_every == 0) {
      TracePoint pt;
      pt.iteration = n;
      pt.objective = objective(inst, z);
      pt.max_violation = h.max_violation();
      pt.violation_se = 0.0;
      pt.dual_norm = dual_norm2(p);
      pt.step_size = step;
      result.trace.points.push_back(pt);
    }
    if (residual < config.kkt_tolerance) break;

    // Extragradient with adaptive step: shrink until the operator change over
    // the half step is a contraction.
    for (;;) {
      primal_step(inst, metric, z, grad, step, z_half);
      dual_step(p, h, step, p_half);
      problem.eval(z_half, p_half, h_half, grad_half, scratch_half);

      const double point_delta = FlatView::diff_norm(z_half, z, p_half, p);
      const double op_delta =
          FlatView::operator_diff_norm(grad_half, grad, h_half, h);
      if (step * op_delta <= control * point_delta || point_delta == 0.0) break;
      step *= 0.5;
      if (step < 1e-14) {
        throw ce_nonconvergence("step size collapsed; KKT residual " +
                                std::to_string(residual));
      }
    }

    primal_step(inst, metric, z, grad_half, step, z_next);
    dual_step(p, h_half, step, p_next);
    std::swap(z, z_next);
    std::swap(p, p_next);
    step = std::min(step * 1.05, 1e3);
  }

  if (residual >= config.kkt_tolerance) {
    throw ce_nonconvergence("no convergence in " +
                            std::to_string(config.max_iterations) +
                            " iterations; KKT residual " + std::to_string(residual));
  }

  // The closed-form constraint admits an exact repair of the solution.
  RepairResult repaired = feasibility_project(
      inst, z, Block2Repair::custom,
      [&problem](int cell, const PrimalState& state) {
        return problem.block2_rhs(cell, state);
      });
  result.primal = std::move(repaired.primal);
  result.kkt_residual = residual;
  result.iterations = n;
  result.solution =
      decode_solution(result.primal, inst, "ce", objective(inst, result.primal));
  return result;
}

}  // namespace leap
