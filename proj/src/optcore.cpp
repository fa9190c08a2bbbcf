#include "leap/optcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leap/units.hpp"

namespace leap {

Constants make_constants(double n0_dbm_per_rb, double p_max_w_per_rb,
                         double iot_cap_db, double gamma_min_db,
                         double bin_width_db) {
  Constants k;
  k.p_max_w = p_max_w_per_rb;
  k.n0_w = dbm_to_watts(n0_dbm_per_rb);
  k.i_max_w = k.n0_w * db_to_linear(iot_cap_db - 2.0 * bin_width_db);
  k.gamma_min = db_to_nat(gamma_min_db);
  if (k.i_max_w < k.n0_w) throw std::invalid_argument("I_max below the noise floor");
  return k;
}

Bounds make_bounds(const Constants& constants) {
  Bounds b;
  b.pi_max = std::log(constants.p_max_w);
  b.theta_min = std::log(constants.n0_w);
  b.theta_max = std::log(constants.i_max_w);
  b.gamma_min = constants.gamma_min;
  b.gamma_max = b.pi_max - b.theta_min;
  b.pi_min = b.gamma_min + b.theta_min;
  return b;
}

int ProblemInstance::cell_index(int cell_id) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell_id,
                             [](const InstanceCell& c, int id) { return c.cell_id < id; });
  if (it == cells.end() || it->cell_id != cell_id) return -1;
  return static_cast<int>(it - cells.begin());
}

double ProblemInstance::enumeration_outcomes(int cell) const {
  double combos = 1.0;
  for (int e : in_edges[cell]) {
    combos *= static_cast<double>(edges[e].outcomes.size()) + 1.0;
  }
  return combos;
}

ProblemInstance build_instance(const MeasurementStatistics& stats,
                               const Constants& constants) {
  ProblemInstance inst;
  inst.constants = constants;
  inst.bounds = make_bounds(constants);

  for (const auto& [cell_id, hist] : stats.serving) {
    InstanceCell c;
    c.cell_id = cell_id;
    c.load = stats.load.at(cell_id);
    for (const auto& bin : hist.bins) {
      c.log_loss.push_back(db_to_nat(hist.midpoint_db(bin.index)));
      c.prob.push_back(bin.probability);
    }
    inst.cells.push_back(std::move(c));
  }

  inst.gamma_offset.resize(inst.cells.size());
  for (std::size_t i = 0; i < inst.cells.size(); ++i) {
    inst.gamma_offset[i] = inst.total_bins;
    inst.total_bins += static_cast<int>(inst.cells[i].log_loss.size());
  }

  inst.in_edges.resize(inst.cells.size());
  for (const auto& [key, joint] : stats.joint) {
    const int src = inst.cell_index(key.source);
    const int tgt = inst.cell_index(key.target);
    if (src < 0 || tgt < 0) continue;  // edges touching UE-less cells drop out
    InstanceEdge edge;
    edge.source = src;
    edge.target = tgt;
    edge.occupancy = stats.graph.occupancy.at(key);
    double cum = 0.0;
    for (const auto& bin : joint.bins) {
      JointOutcome o;
      o.log_serving = db_to_nat(joint.midpoint_db(bin.i));
      o.log_cross = db_to_nat(joint.midpoint_db(bin.j));
      o.probability = bin.probability;
      cum += bin.probability;
      o.cumulative = cum;
      edge.outcomes.push_back(o);
    }
    if (!edge.outcomes.empty()) edge.outcomes.back().cumulative = 1.0;
    inst.edges.push_back(std::move(edge));
  }
  std::sort(inst.edges.begin(), inst.edges.end(),
            [](const InstanceEdge& a, const InstanceEdge& b) {
              return std::pair(a.target, a.source) < std::pair(b.target, b.source);
            });
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    inst.in_edges[inst.edges[i].target].push_back(static_cast<int>(i));
  }
  return inst;
}

PrimalState zero_primal(const ProblemInstance& inst) {
  PrimalState z;
  z.pi.assign(inst.cells.size(), 0.0);
  z.alpha.assign(inst.cells.size(), 0.0);
  z.theta.assign(inst.cells.size(), 0.0);
  z.gamma.assign(inst.total_bins, 0.0);
  return z;
}

DualState zero_dual(const ProblemInstance& inst) {
  DualState p;
  p.block1.assign(inst.total_bins, 0.0);
  p.block2.assign(inst.cells.size(), 0.0);
  p.block3.assign(inst.total_bins, 0.0);
  return p;
}

DrawSet sample_draws(const ProblemInstance& inst, rng::Stream& stream) {
  DrawSet draws(inst.edges.size());
  for (std::size_t i = 0; i < inst.edges.size(); ++i) {
    const InstanceEdge& e = inst.edges[i];
    EdgeDraw d;
    d.active = stream.next_u01() < e.occupancy;
    if (d.active) {
      const double u = stream.next_u01();
      auto it = std::lower_bound(e.outcomes.begin(), e.outcomes.end(), u,
                                 [](const JointOutcome& o, double v) {
                                   return o.cumulative < v;
                                 });
      d.outcome = static_cast<int>(std::min<std::size_t>(
          it - e.outcomes.begin(), e.outcomes.size() - 1));
    }
    draws[i] = d;
  }
  return draws;
}

double ConstraintValues::max_violation() const {
  double v = 0.0;
  for (double x : block1) v = std::max(v, x);
  for (double x : block2) v = std::max(v, x);
  for (double x : block3) v = std::max(v, x);
  return v;
}

double utility(double gamma) {
  if (gamma > 30.0) {
    // ln(1 + e^g) = g + ln(1 + e^-g)
    return std::log(gamma + std::log1p(std::exp(-gamma)));
  }
  if (gamma < -700.0) {
    // ln(1 + e^g) ~ e^g, so V ~ g
    return gamma;
  }
  return std::log(std::log1p(std::exp(gamma)));
}

double utility_derivative(double gamma) {
  // V'(g) = sigma(g) / ln(1 + e^g)
  if (gamma > 30.0) {
    const double l = gamma + std::log1p(std::exp(-gamma));
    return 1.0 / ((1.0 + std::exp(-gamma)) * l);
  }
  if (gamma < -30.0) {
    // sigma/l -> 1 - e^g/2 as g -> -inf
    return 1.0 - 0.5 * std::exp(gamma);
  }
  const double eg = std::exp(gamma);
  return (eg / (1.0 + eg)) / std::log1p(eg);
}

double objective(const ProblemInstance& inst, const PrimalState& primal) {
  double total = 0.0;
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    for (std::size_t b = 0; b < cell.prob.size(); ++b) {
      total += cell.load * cell.prob[b] * utility(primal.gamma[off + b]);
    }
  }
  return total;
}

namespace {

void eval_h(const ProblemInstance& inst, const PrimalState& z, const DrawSet& draws,
            ConstraintValues& h, std::vector<double>& edge_term) {
  const double log_pmax = std::log(inst.constants.p_max_w);
  h.block1.resize(inst.total_bins);
  h.block3.resize(inst.total_bins);
  h.block2.resize(inst.cells.size());
  edge_term.assign(inst.edges.size(), 0.0);

  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    for (std::size_t b = 0; b < cell.log_loss.size(); ++b) {
      const double lam = cell.log_loss[b];
      h.block1[off + b] =
          z.gamma[off + b] - z.pi[c] + (1.0 - z.alpha[c]) * lam + z.theta[c];
      h.block3[off + b] = z.pi[c] + z.alpha[c] * lam - log_pmax;
    }
  }

  for (int c = 0; c < inst.cell_count(); ++c) {
    double sum = 0.0;
    for (int ei : inst.in_edges[c]) {
      const EdgeDraw& d = draws[ei];
      if (!d.active) continue;
      const InstanceEdge& e = inst.edges[ei];
      const JointOutcome& o = e.outcomes[d.outcome];
      const double term =
          std::exp(z.pi[e.source] + z.alpha[e.source] * o.log_serving - o.log_cross);
      edge_term[ei] = term;
      sum += term;
    }
    h.block2[c] = std::log(sum + inst.constants.n0_w) - z.theta[c];
  }
}

}  // namespace

ConstraintValues constraint_h(const ProblemInstance& inst, const PrimalState& primal,
                              const DrawSet& draws) {
  ConstraintValues h;
  std::vector<double> scratch;
  eval_h(inst, primal, draws, h, scratch);
  return h;
}

double lagrangian(const ProblemInstance& inst, const PrimalState& primal,
                  const DualState& dual, const DrawSet& draws) {
  const ConstraintValues h = constraint_h(inst, primal, draws);
  double value = objective(inst, primal);
  for (std::size_t i = 0; i < h.block1.size(); ++i) value -= dual.block1[i] * h.block1[i];
  for (std::size_t i = 0; i < h.block2.size(); ++i) value -= dual.block2[i] * h.block2[i];
  for (std::size_t i = 0; i < h.block3.size(); ++i) value -= dual.block3[i] * h.block3[i];
  return value;
}

void eval_h_and_gradient(const ProblemInstance& inst, const PrimalState& z,
                         const DualState& p, const DrawSet& draws,
                         ConstraintValues& h_out, PrimalState& grad,
                         LagrangianWorkspace& ws) {
  eval_h(inst, z, draws, h_out, ws.edge_term);

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

  // Softmax weights of the sampled log-interference terms.
  for (int c = 0; c < inst.cell_count(); ++c) {
    if (p.block2[c] == 0.0) continue;
    double denom = inst.constants.n0_w;
    for (int ei : inst.in_edges[c]) {
      if (draws[ei].active) denom += ws.edge_term[ei];
    }
    for (int ei : inst.in_edges[c]) {
      const EdgeDraw& d = draws[ei];
      if (!d.active) continue;
      const InstanceEdge& e = inst.edges[ei];
      const double w = ws.edge_term[ei] / denom;
      grad.pi[e.source] -= p.block2[c] * w;
      grad.alpha[e.source] -= p.block2[c] * w * e.outcomes[d.outcome].log_serving;
    }
  }
}

PrimalState lagrangian_gradient_primal(const ProblemInstance& inst,
                                       const PrimalState& primal,
                                       const DualState& dual, const DrawSet& draws) {
  ConstraintValues h;
  PrimalState grad;
  LagrangianWorkspace ws;
  eval_h_and_gradient(inst, primal, dual, draws, h, grad, ws);
  return grad;
}

void box_project(const Bounds& b, PrimalState& z) {
  for (double& v : z.pi) v = std::clamp(v, b.pi_min, b.pi_max);
  for (double& v : z.alpha) v = std::clamp(v, b.alpha_min, b.alpha_max);
  for (double& v : z.theta) v = std::clamp(v, b.theta_min, b.theta_max);
  for (double& v : z.gamma) v = std::clamp(v, b.gamma_min, b.gamma_max);
}

double expected_log_interference_exact(const ProblemInstance& inst,
                                       const PrimalState& primal, int cell,
                                       double outcome_cap) {
  if (inst.enumeration_outcomes(cell) > outcome_cap) {
    throw enumeration_infeasible("cell " + std::to_string(inst.cells[cell].cell_id) +
                                 ": interferer combinations exceed cap");
  }
  const auto& edge_ids = inst.in_edges[cell];
  const double n0 = inst.constants.n0_w;

  // Depth-first product over per-edge outcome lists; outcome index 0 is the
  // silent branch with probability 1 - a.
  double total = 0.0;
  std::vector<int> state(edge_ids.size(), 0);
  const std::size_t depth = edge_ids.size();

  std::function<void(std::size_t, double, double)> recurse =
      [&](std::size_t level, double prob, double sum) {
        if (prob == 0.0) return;
        if (level == depth) {
          total += prob * std::log(sum + n0);
          return;
        }
        const InstanceEdge& e = inst.edges[edge_ids[level]];
        recurse(level + 1, prob * (1.0 - e.occupancy), sum);
        for (const JointOutcome& o : e.outcomes) {
          const double term = std::exp(primal.pi[e.source] +
                                       primal.alpha[e.source] * o.log_serving -
                                       o.log_cross);
          recurse(level + 1, prob * e.occupancy * o.probability, sum + term);
        }
      };
  recurse(0, 1.0, 0.0);
  return total;
}

McEstimate expected_log_interference_mc(const ProblemInstance& inst,
                                        const PrimalState& primal, int cell,
                                        std::int64_t samples, rng::Stream& stream) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const auto& edge_ids = inst.in_edges[cell];
  const double n0 = inst.constants.n0_w;

  // Per-edge exponent pieces are fixed given the primal point.
  struct Term {
    double occupancy;
    const std::vector<JointOutcome>* outcomes;
    double pi, alpha;
  };
  std::vector<Term> terms;
  terms.reserve(edge_ids.size());
  for (int ei : edge_ids) {
    const InstanceEdge& e = inst.edges[ei];
    terms.push_back({e.occupancy, &e.outcomes, primal.pi[e.source], primal.alpha[e.source]});
  }

  double mean = 0.0, m2 = 0.0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double sum = 0.0;
    for (const Term& t : terms) {
      if (stream.next_u01() >= t.occupancy) continue;
      const double u = stream.next_u01();
      auto it = std::lower_bound(t.outcomes->begin(), t.outcomes->end(), u,
                                 [](const JointOutcome& o, double v) {
                                   return o.cumulative < v;
                                 });
      const JointOutcome& o =
          (it == t.outcomes->end()) ? t.outcomes->back() : *it;
      sum += std::exp(t.pi + t.alpha * o.log_serving - o.log_cross);
    }
    const double x = std::log(sum + n0);
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  McEstimate est;
  est.estimate = mean;
  est.standard_error =
      (samples > 1) ? std::sqrt(m2 / static_cast<double>(samples - 1) /
                                static_cast<double>(samples))
                    : 0.0;
  return est;
}

FeasibilityReport feasibility_check(const ProblemInstance& inst,
                                    const PrimalState& primal,
                                    std::int64_t mc_samples, std::uint64_t seed,
                                    double outcome_cap) {
  FeasibilityReport report;
  DrawSet no_draws(inst.edges.size());  // block1/block3 ignore the draws
  const ConstraintValues h = constraint_h(inst, primal, no_draws);
  report.max_block1 = -std::numeric_limits<double>::infinity();
  report.max_block3 = -std::numeric_limits<double>::infinity();
  for (double v : h.block1) report.max_block1 = std::max(report.max_block1, v);
  for (double v : h.block3) report.max_block3 = std::max(report.max_block3, v);
  if (inst.total_bins == 0) report.max_block1 = report.max_block3 = 0.0;

  bool ok = report.max_block1 <= 1e-9 && report.max_block3 <= 1e-9;
  for (int c = 0; c < inst.cell_count(); ++c) {
    CellFeasibility cf;
    cf.cell_id = inst.cells[c].cell_id;
    if (inst.enumeration_outcomes(c) <= outcome_cap) {
      cf.exact = true;
      cf.block2_violation =
          expected_log_interference_exact(inst, primal, c, outcome_cap) -
          primal.theta[c];
      if (cf.block2_violation > 1e-9) ok = false;
    } else {
      auto stream = rng::substream(seed, {rng::tag::mc_oracle,
                                          static_cast<std::uint64_t>(cf.cell_id)});
      const McEstimate est =
          expected_log_interference_mc(inst, primal, c, mc_samples, stream);
      cf.block2_violation = est.estimate - primal.theta[c];
      cf.standard_error = est.standard_error;
      if (cf.block2_violation > 3.0 * est.standard_error) ok = false;
    }
    report.block2.push_back(cf);
  }
  report.feasible = ok;
  return report;
}

RepairResult feasibility_project(
    const ProblemInstance& inst, PrimalState primal, Block2Repair mode,
    const std::function<double(int cell, const PrimalState&)>& block2_rhs,
    double outcome_cap) {
  RepairResult result;
  const Bounds& b = inst.bounds;
  box_project(b, primal);

  const double log_pmax = std::log(inst.constants.p_max_w);
  for (int c = 0; c < inst.cell_count(); ++c) {
    const auto& lam = inst.cells[c].log_loss;
    if (!lam.empty()) {
      const double cap = log_pmax - primal.alpha[c] * lam.back();
      if (cap < b.pi_min) {
        result.residual_after = std::max(result.residual_after, b.pi_min - cap);
      }
      primal.pi[c] = std::min(primal.pi[c], std::max(cap, b.pi_min));
    }
  }

  // The interference target is defined by the expected log-interference of
  // the power parameters; tie it back to that value where it is computable.
  for (int c = 0; c < inst.cell_count(); ++c) {
    double rhs = 0.0;
    switch (mode) {
      case Block2Repair::exact_when_enumerable:
        if (inst.enumeration_outcomes(c) > outcome_cap) continue;
        rhs = expected_log_interference_exact(inst, primal, c, outcome_cap);
        break;
      case Block2Repair::custom:
        rhs = block2_rhs(c, primal);
        break;
      case Block2Repair::skip:
        continue;
    }
    if (rhs > b.theta_max) {
      primal.theta[c] = b.theta_max;
      result.theta_capped = true;
      result.residual_after = std::max(result.residual_after, rhs - b.theta_max);
    } else {
      primal.theta[c] = std::max(rhs, b.theta_min);
    }
  }

  // SINR grid tight on its budget; every inequality is active at an optimum.
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    for (std::size_t bn = 0; bn < cell.log_loss.size(); ++bn) {
      const double rhs =
          primal.pi[c] - (1.0 - primal.alpha[c]) * cell.log_loss[bn] - primal.theta[c];
      double& g = primal.gamma[off + bn];
      g = std::min(rhs, b.gamma_max);
      if (g < b.gamma_min) {
        g = b.gamma_min;
        result.gamma_floored = true;
        result.residual_after = std::max(result.residual_after, b.gamma_min - rhs);
      }
    }
  }

  result.primal = std::move(primal);
  return result;
}

StepMetric make_step_metric(const ProblemInstance& inst) {
  StepMetric metric;
  metric.lambda_mean.assign(inst.cells.size(), 0.0);
  metric.alpha_gain.assign(inst.cells.size(), 1.0);
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    double mean = 0.0;
    for (std::size_t b = 0; b < cell.log_loss.size(); ++b) {
      mean += cell.prob[b] * cell.log_loss[b];
    }
    metric.lambda_mean[c] = mean;
  }
  // Residual coupling of alpha after centering: serving-bin spread plus the
  // offsets of the interference outcomes it scales.
  std::vector<double> coupling(inst.cells.size(), 0.0);
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    for (double lam : cell.log_loss) {
      coupling[c] = std::max(coupling[c], std::abs(lam - metric.lambda_mean[c]));
    }
  }
  for (const InstanceEdge& e : inst.edges) {
    for (const JointOutcome& o : e.outcomes) {
      coupling[e.source] = std::max(
          coupling[e.source], std::abs(o.log_serving - metric.lambda_mean[e.source]));
    }
  }
  for (int c = 0; c < inst.cell_count(); ++c) {
    metric.alpha_gain[c] = 1.0 / std::max(1e-4, coupling[c] * coupling[c]);
  }
  return metric;
}

void complete_gamma(const ProblemInstance& inst, PrimalState& primal) {
  const Bounds& b = inst.bounds;
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    for (std::size_t bn = 0; bn < cell.log_loss.size(); ++bn) {
      const double rhs =
          primal.pi[c] - (1.0 - primal.alpha[c]) * cell.log_loss[bn] - primal.theta[c];
      primal.gamma[off + bn] = std::clamp(rhs, b.gamma_min, b.gamma_max);
    }
  }
}

}  // namespace leap
