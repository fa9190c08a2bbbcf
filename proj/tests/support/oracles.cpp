#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace leap::oracle {

PrimalState finite_difference_gradient(const ProblemInstance& inst,
                                       const PrimalState& primal,
                                       const DualState& dual, const DrawSet& draws,
                                       double h) {
  PrimalState grad = zero_primal(inst);
  PrimalState probe = primal;
  auto central = [&](double& coord, double& out) {
    const double saved = coord;
    coord = saved + h;
    const double up = lagrangian(inst, probe, dual, draws);
    coord = saved - h;
    const double down = lagrangian(inst, probe, dual, draws);
    coord = saved;
    out = (up - down) / (2.0 * h);
  };
  for (std::size_t i = 0; i < probe.pi.size(); ++i) central(probe.pi[i], grad.pi[i]);
  for (std::size_t i = 0; i < probe.alpha.size(); ++i)
    central(probe.alpha[i], grad.alpha[i]);
  for (std::size_t i = 0; i < probe.theta.size(); ++i)
    central(probe.theta[i], grad.theta[i]);
  for (std::size_t i = 0; i < probe.gamma.size(); ++i)
    central(probe.gamma[i], grad.gamma[i]);
  return grad;
}

double isolated_grid_objective(const ProblemInstance& inst, double alpha_resolution) {
  const Bounds& bounds = inst.bounds;
  const double log_pmax = std::log(inst.constants.p_max_w);
  const double log_n0 = std::log(inst.constants.n0_w);
  double total = 0.0;
  for (int c = 0; c < inst.cell_count(); ++c) {
    const InstanceCell& cell = inst.cells[c];
    const double lam_max = cell.log_loss.back();
    double best = -1e300;
    const int steps = static_cast<int>(std::round(1.0 / alpha_resolution));
    for (int k = 0; k <= steps; ++k) {
      const double alpha = static_cast<double>(k) / steps;
      const double pi = std::min(bounds.pi_max, log_pmax - alpha * lam_max);
      double value = 0.0;
      for (std::size_t b = 0; b < cell.log_loss.size(); ++b) {
        double gamma = pi - (1.0 - alpha) * cell.log_loss[b] - log_n0;
        gamma = std::min(gamma, bounds.gamma_max);
        value += cell.load * cell.prob[b] * utility(gamma);
      }
      best = std::max(best, value);
    }
    total += best;
  }
  return total;
}

double objective_recompute(const ProblemInstance& inst, const PrimalState& primal) {
  // Reverse iteration order on purpose; agreement must not depend on
  // summation order beyond double rounding.
  double total = 0.0;
  for (int c = inst.cell_count() - 1; c >= 0; --c) {
    const InstanceCell& cell = inst.cells[c];
    const int off = inst.gamma_offset[c];
    double cell_total = 0.0;
    for (int b = static_cast<int>(cell.prob.size()) - 1; b >= 0; --b) {
      const double g = primal.gamma[off + b];
      cell_total += cell.prob[b] * std::log(std::log1p(std::exp(g)));
    }
    total += cell.load * cell_total;
  }
  return total;
}

Bivariate bivariate_normal(double mean_x, double mean_y, double sigma,
                           double corr, rng::Stream& stream) {
  const double z1 = stream.next_normal();
  const double z2 = stream.next_normal();
  Bivariate out;
  out.x = mean_x + sigma * z1;
  out.y = mean_y + sigma * (corr * z1 + std::sqrt(1.0 - corr * corr) * z2);
  return out;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace leap::oracle
