#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "leap/netmodel.hpp"
#include "leap/rng.hpp"
#include "leap/units.hpp"

using namespace leap;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig cfg;
  cfg.area_km2 = 1.0;
  cfg.macro_count = 7;
  cfg.pico_count = 2;
  cfg.density_per_km2 = 120.0;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("default topology holds 125 cells") {
  GeneratorConfig cfg;
  cfg.seed = 7;
  const auto cells = generate_topology(cfg);
  CHECK(cells.size() == 125);
  int macros = 0, picos = 0;
  std::set<int> ids;
  for (const Cell& c : cells) {
    ids.insert(c.id);
    if (c.kind == CellKind::macro) {
      ++macros;
      CHECK(c.tx_power_w == 40.0);
    } else {
      ++picos;
      CHECK(c.tx_power_w == 4.0);
    }
  }
  CHECK(macros == 115);
  CHECK(picos == 10);
  CHECK(ids.size() == 125);  // unique ids
}

TEST_CASE("degenerate and failing placements") {
  GeneratorConfig cfg;
  cfg.area_km2 = 1.0;
  cfg.macro_count = 0;
  cfg.pico_count = 0;
  CHECK(generate_topology(cfg).empty());

  cfg.area_km2 = 0.01;
  cfg.macro_count = 115;
  CHECK_THROWS_AS(generate_topology(cfg), placement_error);
}

TEST_CASE("topology determinism and spacing") {
  GeneratorConfig cfg;
  cfg.seed = 7;
  const auto a = generate_topology(cfg);
  const auto b = generate_topology(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x_m == b[i].x_m);
    CHECK(a[i].y_m == b[i].y_m);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].kind != CellKind::macro) continue;
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[j].kind != CellKind::macro) continue;
      const double d = std::hypot(a[i].x_m - a[j].x_m, a[i].y_m - a[j].y_m);
      CHECK(d >= cfg.min_macro_spacing_m);
    }
  }
}

TEST_CASE("path loss anchors") {
  GeneratorConfig cfg;
  Cell macro{0, CellKind::macro, 0.0, 0.0, 40.0};
  // 34 dB at the 1 m reference distance
  CHECK(path_loss(macro, 0.0, 1.0, 0.0, cfg) ==
        doctest::Approx(db_to_linear(34.0)).epsilon(1e-12));
  // 34 + 37 * log10(100/1) = 108 dB for the macro exponent
  CHECK(linear_to_db(path_loss(macro, 100.0, 0.0, 0.0, cfg)) ==
        doctest::Approx(108.0).epsilon(1e-12));
  // distances below 1 m clamp to the reference
  CHECK(path_loss(macro, 0.0, 0.2, 0.0, cfg) ==
        path_loss(macro, 0.0, 1.0, 0.0, cfg));
  Cell pico{1, CellKind::pico, 0.0, 0.0, 4.0};
  CHECK(linear_to_db(path_loss(pico, 100.0, 0.0, 0.0, cfg)) ==
        doctest::Approx(34.0 + 30.0 * 2.0).epsilon(1e-12));
}

TEST_CASE("UE drop count is reproducible and near the target density") {
  GeneratorConfig cfg;
  cfg.seed = 5;
  const auto cells = generate_topology(cfg);
  const auto drop1 = drop_ues(cells, cfg);
  const auto drop2 = drop_ues(cells, cfg);
  CHECK(drop1.size() == drop2.size());
  const double expected = cfg.density_per_km2 * cfg.area_km2;  // 4050
  CHECK(std::abs(static_cast<double>(drop1.size()) - expected) <
        5.0 * std::sqrt(expected));

  GeneratorConfig tiny = cfg;
  tiny.density_per_km2 = 1e-9;
  tiny.pico_count = 0;
  CHECK(drop_ues(generate_topology(tiny), tiny).empty());
}

TEST_CASE("hotspot discs double the density") {
  GeneratorConfig cfg = small_config();
  cfg.density_per_km2 = 800.0;
  cfg.hotspot_factor = 2.0;
  cfg.pico_count = 1;

  double inside = 0.0, outside = 0.0;
  double inside_area = 0.0, outside_area = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    const auto cells = generate_topology(cfg);
    const Cell* pico = nullptr;
    for (const Cell& c : cells) {
      if (c.kind == CellKind::pico) pico = &c;
    }
    REQUIRE(pico != nullptr);
    const double side = std::sqrt(cfg.area_km2 * 1e6);
    // Only count interior discs, where no hotspot mass is clipped.
    const double r = cfg.hotspot_radius_m;
    if (pico->x_m < r || pico->y_m < r || pico->x_m > side - r ||
        pico->y_m > side - r) {
      continue;
    }
    const double disc_area = 3.14159265358979 * r * r;
    for (const auto& [x, y] : drop_ues(cells, cfg)) {
      if (std::hypot(x - pico->x_m, y - pico->y_m) <= r) {
        inside += 1.0;
      } else {
        outside += 1.0;
      }
    }
    inside_area += disc_area;
    outside_area += side * side - disc_area;
  }
  REQUIRE(inside_area > 0.0);
  const double ratio = (inside / inside_area) / (outside / outside_area);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("association picks the strongest RSRP") {
  std::vector<Cell> cells = {{0, CellKind::macro, 0, 0, 40.0},
                             {1, CellKind::pico, 0, 0, 4.0}};
  // 90 dB to the macro (-43.98 dBm) beats 85 dB to the pico (-48.98 dBm).
  auto loss_fn = [](const Cell& c) {
    return c.kind == CellKind::macro ? db_to_linear(90.0) : db_to_linear(85.0);
  };
  const auto assoc = associate(cells, loss_fn, -140.0);
  REQUIRE(assoc.has_value());
  CHECK(assoc->serving_cell == 0);
  CHECK(assoc->losses.size() == 2);

  // Single audible cell wins by default.
  auto weak_fn = [](const Cell& c) {
    return c.kind == CellKind::macro ? db_to_linear(90.0) : db_to_linear(190.0);
  };
  const auto single = associate(cells, weak_fn, -140.0);
  REQUIRE(single.has_value());
  CHECK(single->serving_cell == 0);
  CHECK(single->losses.size() == 1);

  // Exact RSRP tie between two macros goes to the lower id.
  std::vector<Cell> twins = {{3, CellKind::macro, 0, 0, 40.0},
                             {5, CellKind::macro, 0, 0, 40.0}};
  const auto tie = associate(twins, [](const Cell&) { return db_to_linear(100.0); },
                             -140.0);
  REQUIRE(tie.has_value());
  CHECK(tie->serving_cell == 3);

  // Nothing audible -> coverage hole.
  CHECK(!associate(cells, [](const Cell&) { return db_to_linear(250.0); }, -140.0)
             .has_value());
}

TEST_CASE("shadowing marginals and cross-link correlation") {
  GeneratorConfig cfg = small_config();
  cfg.shadow_sigma_db = 8.0;
  cfg.shadow_corr = 0.5;

  // Reconstruct the shadowing draws exactly as generate_snapshot does.
  const double w_common = std::sqrt(cfg.shadow_corr);
  const double w_link = std::sqrt(1.0 - cfg.shadow_corr);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0, cross = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto ue = static_cast<std::uint64_t>(i);
    const double z0 =
        rng::substream(cfg.seed, {rng::tag::shadow, ue, 0}).next_normal();
    const double za =
        rng::substream(cfg.seed, {rng::tag::shadow, ue, 1, 100}).next_normal();
    const double zb =
        rng::substream(cfg.seed, {rng::tag::shadow, ue, 1, 101}).next_normal();
    const double sa = cfg.shadow_sigma_db * (w_common * z0 + w_link * za);
    const double sb = cfg.shadow_sigma_db * (w_common * z0 + w_link * zb);
    sum += sa;
    sum_sq += sa * sa;
    cross += sa * sb;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double sd = std::sqrt(var);
  CHECK(sd == doctest::Approx(cfg.shadow_sigma_db).epsilon(0.02));
  const double corr = (cross / n - mean * mean) / var;
  CHECK(std::abs(corr - cfg.shadow_corr) < 0.05);
}

TEST_CASE("snapshot invariants") {
  GeneratorConfig cfg = small_config();
  const NetworkSnapshot snap = generate_snapshot(cfg);
  REQUIRE(!snap.ues.empty());

  for (const UESample& ue : snap.ues) {
    CHECK(ue.hears(ue.serving_cell));
    double serving_rsrp = 0.0;
    for (const Cell& c : snap.cells) {
      if (c.id == ue.serving_cell) serving_rsrp = c.tx_power_w / ue.loss_to(c.id);
    }
    for (const auto& [cell_id, loss] : ue.losses) {
      CHECK(loss >= 1.0);
      for (const Cell& c : snap.cells) {
        if (c.id == cell_id) {
          CHECK(c.tx_power_w / loss <= serving_rsrp * (1.0 + 1e-12));
        }
      }
    }
  }

  const NetworkSnapshot again = generate_snapshot(cfg);
  CHECK(snapshot_content_hash(snap) == snapshot_content_hash(again));
  CHECK(snap.ues.size() == again.ues.size());
}
