#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "leap/measurements.hpp"
#include "leap/units.hpp"

using namespace leap;

namespace {

// Hand-built snapshot: cell 0 with three UEs, cell 1 with one UE, cell 2
// empty. UE 0 and UE 2 hear cell 1; UE 3 (served by cell 1) hears cell 0.
NetworkSnapshot toy_snapshot() {
  NetworkSnapshot snap;
  snap.cells = {{0, CellKind::macro, 0, 0, 40.0},
                {1, CellKind::macro, 1000, 0, 40.0},
                {2, CellKind::macro, 2000, 0, 40.0}};
  snap.ues.push_back({0, 10, 0, 0,
                      {{0, db_to_linear(80.3)}, {1, db_to_linear(110.2)}}});
  snap.ues.push_back({1, 20, 0, 0, {{0, db_to_linear(92.7)}}});
  snap.ues.push_back({2, 30, 0, 0,
                      {{0, db_to_linear(80.9)}, {1, db_to_linear(121.4)}}});
  snap.ues.push_back({3, 990, 0, 1,
                      {{0, db_to_linear(115.0)}, {1, db_to_linear(70.1)}}});
  return snap;
}

}  // namespace

TEST_CASE("binning rule and single-sample histogram") {
  NetworkSnapshot snap;
  snap.cells = {{0, CellKind::macro, 0, 0, 40.0}};
  snap.ues.push_back({0, 0, 0, 0, {{0, db_to_linear(100.4)}}});
  const auto stats = build_statistics(snap, 1.0);
  const Histogram1D& h = stats.serving.at(0);
  REQUIRE(h.bins.size() == 1);
  CHECK(h.bins[0].index == 100);
  CHECK(h.midpoint_db(h.bins[0].index) == doctest::Approx(100.5));
  CHECK(h.bins[0].probability == 1.0);
  CHECK(h.total_samples == 1);
}

TEST_CASE("occupancy is the audible fraction") {
  NetworkSnapshot snap;
  snap.cells = {{0, CellKind::macro, 0, 0, 40.0}, {1, CellKind::macro, 1, 0, 40.0}};
  for (int i = 0; i < 10; ++i) {
    UESample ue;
    ue.id = i;
    ue.serving_cell = 0;
    ue.losses = {{0, db_to_linear(90.0 + i)}};
    if (i < 3) ue.losses.emplace_back(1, db_to_linear(120.0 + i));
    snap.ues.push_back(ue);
  }
  const auto stats = build_statistics(snap, 1.0);
  CHECK(stats.graph.occupancy.at(EdgeKey{0, 1}) == doctest::Approx(0.3));
  CHECK(stats.load.at(0) == 10.0);
}

TEST_CASE("statistics of the toy snapshot") {
  const auto stats = build_statistics(toy_snapshot(), 1.0);

  CHECK(stats.load.at(0) == 3.0);
  CHECK(stats.load.at(1) == 1.0);
  CHECK(stats.empty_cells == std::vector<int>{2});
  CHECK(stats.serving.count(2) == 0);

  // graph <-> occupancy <-> joint existence
  CHECK(stats.graph.has_edge(0, 1));
  CHECK(stats.graph.has_edge(1, 0));
  CHECK(!stats.graph.has_edge(0, 2));
  for (const auto& [key, a] : stats.graph.occupancy) {
    CHECK(a > 0.0);
    CHECK(stats.joint.count(key) == 1);
  }
  for (const auto& [key, hist] : stats.joint) {
    CHECK(stats.graph.occupancy.count(key) == 1);
  }
  CHECK(stats.graph.occupancy.at(EdgeKey{0, 1}) == doctest::Approx(2.0 / 3.0));

  // probability mass sums to one
  for (const auto& [cell, hist] : stats.serving) {
    double mass = 0.0;
    for (const auto& b : hist.bins) mass += b.probability;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }

  // joint marginals equal a recomputation from the raw sample list
  const Histogram2D& joint = stats.joint.at(EdgeKey{0, 1});
  std::map<int, double> marginal;
  for (const auto& b : joint.bins) marginal[b.i] += b.probability;
  // raw serving losses of the two audible UEs of cell 0: 80.3, 80.9 -> bin 80
  CHECK(marginal.size() == 1);
  CHECK(marginal.at(80) == doctest::Approx(1.0));
}

TEST_CASE("rebinning to 2 dB merges fine bins exactly") {
  const auto snap = toy_snapshot();
  const auto fine = build_statistics(snap, 1.0);
  const auto coarse = build_statistics(snap, 2.0);
  for (const auto& [cell, coarse_hist] : coarse.serving) {
    const Histogram1D& fine_hist = fine.serving.at(cell);
    for (const auto& cb : coarse_hist.bins) {
      std::uint64_t fine_count = 0;
      for (const auto& fb : fine_hist.bins) {
        if (fb.index / 2 == cb.index ||
            (fb.index < 0 && (fb.index - 1) / 2 == cb.index)) {
          fine_count += fb.count;
        }
      }
      CHECK(fine_count == cb.count);
    }
  }
}

TEST_CASE("dB to natural log round trip") {
  for (double db : {0.01, 34.0, 80.55, 121.44, 155.0}) {
    const double nat = db_to_nat(db);
    CHECK(std::abs(nat_to_db(nat) - db) <= 1e-12 * db);
  }
}

TEST_CASE("subsample") {
  GeneratorConfig cfg;
  cfg.area_km2 = 1.0;
  cfg.macro_count = 5;
  cfg.pico_count = 0;
  cfg.density_per_km2 = 4000.0;
  cfg.seed = 3;
  const NetworkSnapshot snap = generate_snapshot(cfg);
  REQUIRE(snap.ues.size() > 3000);

  const NetworkSnapshot all = subsample(snap, 1.0, 9);
  CHECK(all.ues.size() == snap.ues.size());

  const NetworkSnapshot half = subsample(snap, 0.5, 9);
  const NetworkSnapshot half_again = subsample(snap, 0.5, 9);
  CHECK(half.ues.size() == half_again.ues.size());
  const double n = static_cast<double>(snap.ues.size());
  CHECK(std::abs(static_cast<double>(half.ues.size()) - 0.5 * n) <
        4.0 * std::sqrt(0.25 * n));

  CHECK_THROWS_AS(subsample(snap, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(subsample(snap, -0.2, 1), std::invalid_argument);

  // Occupancy from the thinned view tracks the full-sample estimate.
  const auto full_stats = build_statistics(snap, 1.0);
  const auto half_stats = build_statistics(half, 1.0);
  for (const auto& [key, a] : half_stats.graph.occupancy) {
    auto it = full_stats.graph.occupancy.find(key);
    if (it != full_stats.graph.occupancy.end()) {
      CHECK(std::abs(a - it->second) <= 0.1);
    }
  }
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(build_statistics(toy_snapshot(), 0.0), std::invalid_argument);
  NetworkSnapshot empty;
  CHECK_THROWS_AS(build_statistics(empty, 1.0), std::invalid_argument);
}
