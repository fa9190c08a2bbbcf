#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "leap/solver_ce.hpp"
#include "leap/units.hpp"
#include "support/instance_gen.hpp"
#include "support/oracles.hpp"

using namespace leap;


TEST_CASE("point-mass fit is degenerate with the regularized covariance") {
  // Bin midpoints at exactly 80 dB and 100 dB: width 32 dB, indices 2 and...
  Histogram2D h;
  h.bin_width_db = 32.0;
  h.total_samples = 5;
  h.bins = {Hist2DBin{2, 2, 5, 1.0}};  // midpoints (80, 80)
  EdgeFit f = fit_edge(h);
  CHECK(f.degenerate);
  CHECK(f.mean[0] == doctest::Approx(db_to_nat(80.0)).epsilon(1e-12));
  CHECK(f.mean[0] == doctest::Approx(18.4207).epsilon(1e-5));
  CHECK(f.cov[0] == doctest::Approx(1e-6).epsilon(1e-9));
  CHECK(f.cov[1] == 0.0);
  CHECK(f.cov[2] == doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("two equal-mass bins: mean at the center, off-diagonal from spreads") {
  Histogram2D h;
  h.bin_width_db = 1.0;
  h.total_samples = 2;
  // midpoints 90.5/110.5 and 94.5/114.5: perfectly correlated spreads
  h.bins = {Hist2DBin{90, 110, 1, 0.5}, Hist2DBin{94, 114, 1, 0.5}};
  EdgeFit f = fit_edge(h);
  const double c1 = db_to_nat(0.5 * (90.5 + 94.5));
  const double c2 = db_to_nat(0.5 * (110.5 + 114.5));
  CHECK(f.mean[0] == doctest::Approx(c1).epsilon(1e-12));
  CHECK(f.mean[1] == doctest::Approx(c2).epsilon(1e-12));
  const double d1 = db_to_nat(2.0);  // half spread
  CHECK(f.cov[1] == doctest::Approx(d1 * d1).epsilon(1e-9));
  CHECK(f.cov[0] == doctest::Approx(d1 * d1 + 1e-6).epsilon(1e-9));
}

TEST_CASE("fit recovers a known bivariate normal") {
  auto stream = rng::substream(30, {1});
  const double sigma = 1.3816;  // 6 dB log-std per component
  const double corr = 0.5;
  const double m1 = db_to_nat(95.0);
  const double m2 = db_to_nat(120.0);
  Histogram2D h;
  h.bin_width_db = 0.5;
  for (int s = 0; s < 100000; ++s) {
    const auto pt = oracle::bivariate_normal(m1, m2, sigma, corr, stream);
    h.add_sample_db(nat_to_db(pt.x), nat_to_db(pt.y));
  }
  h.finalize();
  const EdgeFit f = fit_edge(h);
  CHECK(std::abs(f.mean[0] - m1) < 0.05);
  CHECK(std::abs(f.mean[1] - m2) < 0.05);
  CHECK(std::abs(f.cov[0] - sigma * sigma) < 0.05 * sigma * sigma);
  CHECK(std::abs(f.cov[2] - sigma * sigma) < 0.05 * sigma * sigma);
  CHECK(std::abs(f.cov[1] - corr * sigma * sigma) < 0.05 * sigma * sigma);
}

TEST_CASE("g_hat worked values") {
  EdgeFit f;
  f.mean[0] = db_to_nat(80.0);   // ln 1e8
  f.mean[1] = db_to_nat(100.0);  // ln 1e10
  f.cov[0] = f.cov[1] = f.cov[2] = 0.0;
  // zero variance reduces to the point evaluation: 1e-3 * 1e8 / 1e10 = 1e-5
  CHECK(g_hat(std::log(1e-3), 1.0, f) == doctest::Approx(1e-5).epsilon(1e-9));

  EdgeFit g = f;
  g.cov[0] = g.cov[2] = 1.9087;
  CHECK(g_hat(std::log(1e-3), 1.0, g) ==
        doctest::Approx(1e-5 * std::exp(1.9087)).epsilon(1e-9));
  CHECK(g_hat(std::log(1e-3), 1.0, g) == doctest::Approx(6.74e-5).epsilon(1e-2));

  // alpha = 0 depends only on the cross-loss moments
  EdgeFit varied = g;
  varied.mean[0] += 123.0;
  varied.cov[0] += 7.0;
  varied.cov[1] += 3.0;
  CHECK(g_hat(std::log(1e-3), 0.0, varied) ==
        doctest::Approx(g_hat(std::log(1e-3), 0.0, g)).epsilon(1e-12));
}

TEST_CASE("certainty-equivalent block2 is midpoint-convex in (pi, alpha)") {
  auto stream = rng::substream(31, {2});
  const ProblemInstance inst = testgen::gaussian_instance(4, stream);
  const GaussianFit fit = testgen::fit_from_instance(inst);
  for (int rep = 0; rep < 200; ++rep) {
    PrimalState z1 = testgen::random_primal_in_bounds(inst, stream);
    PrimalState z2 = testgen::random_primal_in_bounds(inst, stream);
    PrimalState mid = z1;
    for (std::size_t i = 0; i < mid.pi.size(); ++i) {
      mid.pi[i] = 0.5 * (z1.pi[i] + z2.pi[i]);
      mid.alpha[i] = 0.5 * (z1.alpha[i] + z2.alpha[i]);
      mid.theta[i] = 0.5 * (z1.theta[i] + z2.theta[i]);
    }
    for (int c = 0; c < inst.cell_count(); ++c) {
      const double v1 = ce_block2(inst, fit, z1, c);
      const double v2 = ce_block2(inst, fit, z2, c);
      const double vm = ce_block2(inst, fit, mid, c);
      CHECK(vm <= 0.5 * (v1 + v2) + 1e-12);
    }
  }
}

TEST_CASE("no interferers: CE matches the grid-search optimum") {
  auto stream = rng::substream(32, {3});
  const ProblemInstance inst = testgen::isolated_instance(3, 3, stream);
  const GaussianFit fit;  // no edges, nothing to fit
  const CeResult result = solve_ce(inst, fit);
  CHECK(std::abs(result.solution.objective - oracle::isolated_grid_objective(inst)) <
        1e-4);
  CHECK(result.kkt_residual < 1e-6);
}

TEST_CASE("CE is deterministic") {
  auto stream = rng::substream(33, {4});
  const ProblemInstance inst = testgen::point_mass_instance(4, stream, false);
  const GaussianFit fit = testgen::fit_from_instance(inst);
  const CeResult a = solve_ce(inst, fit);
  const CeResult b = solve_ce(inst, fit);
  CHECK(a.iterations == b.iterations);
  CHECK(a.solution.objective == b.solution.objective);
  for (std::size_t i = 0; i < a.solution.cells.size(); ++i) {
    CHECK(a.solution.cells[i].p0_w_per_rb == b.solution.cells[i].p0_w_per_rb);
  }
}

TEST_CASE("CE solutions satisfy the true stochastic constraints") {
  auto stream = rng::substream(34, {5});
  const ProblemInstance inst = testgen::gaussian_instance(5, stream);
  const GaussianFit fit = testgen::fit_from_instance(inst);
  const CeResult result = solve_ce(inst, fit);
  const FeasibilityReport report = feasibility_check(inst, result.primal, 50000, 7);
  CHECK(report.max_block1 <= 1e-9);
  CHECK(report.max_block3 <= 1e-9);
  for (const CellFeasibility& cf : report.block2) {
    CHECK(cf.block2_violation <= 3.0 * cf.standard_error + 1e-9);
  }
}

TEST_CASE("Jensen dominance under the fitted model") {
  auto stream = rng::substream(35, {6});
  const ProblemInstance inst = testgen::gaussian_instance(3, stream);
  const GaussianFit fit = testgen::fit_from_instance(inst);

  for (int rep = 0; rep < 100; ++rep) {
    const PrimalState z = testgen::random_primal_in_bounds(inst, stream);
    for (int c = 0; c < inst.cell_count(); ++c) {
      if (inst.in_edges[c].empty()) continue;
      // CE closed form
      double ce_sum = inst.constants.n0_w;
      for (int ei : inst.in_edges[c]) {
        const InstanceEdge& e = inst.edges[ei];
        const EdgeKey key{inst.cells[e.source].cell_id, inst.cells[e.target].cell_id};
        ce_sum += e.occupancy * g_hat(z.pi[e.source], z.alpha[e.source],
                                      fit.edges.at(key));
      }
      const double ce_value = std::log(ce_sum);

      // Monte Carlo E[ln(.)] with the losses drawn from the fitted normals
      const int samples = 20000;
      double mean = 0.0, m2 = 0.0;
      for (int s = 0; s < samples; ++s) {
        double sum = inst.constants.n0_w;
        for (int ei : inst.in_edges[c]) {
          const InstanceEdge& e = inst.edges[ei];
          if (stream.next_u01() >= e.occupancy) continue;
          const EdgeKey key{inst.cells[e.source].cell_id,
                            inst.cells[e.target].cell_id};
          const EdgeFit& f = fit.edges.at(key);
          const double sd1 = std::sqrt(f.cov[0]);
          const double sd2 = std::sqrt(f.cov[2]);
          const double rho = f.cov[1] / (sd1 * sd2);
          const double z1 = stream.next_normal();
          const double z2 = stream.next_normal();
          const double l1 = f.mean[0] + sd1 * z1;
          const double l2 =
              f.mean[1] + sd2 * (rho * z1 + std::sqrt(1.0 - rho * rho) * z2);
          sum += std::exp(z.pi[e.source] + z.alpha[e.source] * l1 - l2);
        }
        const double x = std::log(sum);
        const double delta = x - mean;
        mean += delta / (s + 1);
        m2 += delta * (x - mean);
      }
      const double se = std::sqrt(m2 / (samples - 1) / samples);
      // 1e-9 absorbs double granularity when both sides sit on the noise
      // floor and the true gap is far below representable resolution.
      CHECK(ce_value >= mean - 3.0 * se - 1e-9);
    }
  }
}

TEST_CASE("nonconvergence raises with the residual") {
  auto stream = rng::substream(36, {7});
  const ProblemInstance inst = testgen::point_mass_instance(4, stream, false);
  const GaussianFit fit = testgen::fit_from_instance(inst);
  CeConfig config;
  config.max_iterations = 3;
  CHECK_THROWS_AS(solve_ce(inst, fit, config), ce_nonconvergence);
}
