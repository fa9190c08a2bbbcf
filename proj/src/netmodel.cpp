#include "leap/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

#include "leap/rng.hpp"
#include "leap/units.hpp"

namespace leap {

namespace {

constexpr std::uint64_t kCommonShadowTag = 0;
constexpr std::uint64_t kLinkShadowTag = 1;

double sq(double v) { return v * v; }

double distance_m(double ax, double ay, double bx, double by) {
  return std::sqrt(sq(ax - bx) + sq(ay - by));
}

std::vector<std::pair<double, double>> hex_lattice(double side_m, double spacing_m) {
  std::vector<std::pair<double, double>> sites;
  const double row_step = spacing_m * std::numbers::sqrt3 / 2.0;
  int row = 0;
  for (double y = row_step / 2.0; y < side_m; y += row_step, ++row) {
    const double x0 = (row % 2 == 0) ? spacing_m / 2.0 : spacing_m;
    for (double x = x0; x < side_m; x += spacing_m) {
      sites.emplace_back(x, y);
    }
  }
  return sites;
}

}  // namespace

double UESample::loss_to(int cell_id) const {
  for (const auto& [id, loss] : losses) {
    if (id == cell_id) return loss;
  }
  throw std::out_of_range("UE " + std::to_string(id) + " does not hear cell " +
                          std::to_string(cell_id));
}

bool UESample::hears(int cell_id) const {
  return std::any_of(losses.begin(), losses.end(),
                     [cell_id](const auto& p) { return p.first == cell_id; });
}

std::vector<Cell> generate_topology(const GeneratorConfig& cfg) {
  if (cfg.area_km2 <= 0.0) throw std::invalid_argument("area_km2 must be positive");
  if (cfg.macro_count < 0 || cfg.pico_count < 0) {
    throw std::invalid_argument("cell counts must be non-negative");
  }

  const double area_m2 = cfg.area_km2 * 1e6;
  const double side_m = std::sqrt(area_m2);
  std::vector<Cell> cells;

  if (cfg.macro_count > 0) {
    // Hexagonal packing: cell area sqrt(3)/2 * d^2 per site.
    double spacing = std::sqrt(area_m2 / (cfg.macro_count * std::numbers::sqrt3 / 2.0));
    std::vector<std::pair<double, double>> sites;
    for (;;) {
      if (spacing < cfg.min_macro_spacing_m) {
        throw placement_error("cannot place " + std::to_string(cfg.macro_count) +
                              " macros in " + std::to_string(cfg.area_km2) +
                              " km^2 at " + std::to_string(cfg.min_macro_spacing_m) +
                              " m inter-site distance");
      }
      sites = hex_lattice(side_m, spacing);
      if (static_cast<int>(sites.size()) >= cfg.macro_count) break;
      spacing *= 0.97;
    }

    const double slack = std::max(0.0, (spacing - cfg.min_macro_spacing_m) / 2.0);
    const double jitter = std::min(0.15 * spacing, 0.9 * slack);
    for (int i = 0; i < cfg.macro_count; ++i) {
      auto st = rng::substream(cfg.seed, {rng::tag::topology, static_cast<std::uint64_t>(i)});
      double x = sites[i].first + (2.0 * st.next_u01() - 1.0) * jitter;
      double y = sites[i].second + (2.0 * st.next_u01() - 1.0) * jitter;
      x = std::clamp(x, 0.0, side_m);
      y = std::clamp(y, 0.0, side_m);
      cells.push_back({i, CellKind::macro, x, y, cfg.macro_tx_w});
    }
  }

  for (int k = 0; k < cfg.pico_count; ++k) {
    auto st = rng::substream(cfg.seed, {rng::tag::pico, static_cast<std::uint64_t>(k)});
    bool placed = false;
    for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
      const double x = st.next_u01() * side_m;
      const double y = st.next_u01() * side_m;
      bool clear = true;
      for (const Cell& c : cells) {
        if (c.kind != CellKind::macro) continue;
        if (distance_m(x, y, c.x_m, c.y_m) < cfg.pico_clearance_m) {
          clear = false;
          break;
        }
      }
      if (clear) {
        cells.push_back({cfg.macro_count + k, CellKind::pico, x, y, cfg.pico_tx_w});
        placed = true;
      }
    }
    if (!placed) {
      throw placement_error("could not place pico " + std::to_string(k) +
                            " clear of macros");
    }
  }
  return cells;
}

double path_loss(const Cell& tx, double rx_x_m, double rx_y_m,
                 double shadowing_db, const GeneratorConfig& cfg) {
  const double d = std::max(1.0, distance_m(tx.x_m, tx.y_m, rx_x_m, rx_y_m));
  const double n = (tx.kind == CellKind::macro) ? cfg.macro_exponent : cfg.pico_exponent;
  const double pl_db = cfg.pl0_db + 10.0 * n * std::log10(d) + shadowing_db;
  return std::max(1.0, db_to_linear(pl_db));
}

std::vector<std::pair<double, double>> drop_ues(const std::vector<Cell>& cells,
                                                const GeneratorConfig& cfg) {
  if (cfg.density_per_km2 <= 0.0) throw std::invalid_argument("density must be positive");
  if (cfg.hotspot_factor < 1.0) throw std::invalid_argument("hotspot_factor must be >= 1");

  const double side_m = std::sqrt(cfg.area_km2 * 1e6);
  std::vector<std::pair<double, double>> positions;

  auto base = rng::substream(cfg.seed, {rng::tag::drop, 0});
  const long long n_base = base.next_poisson(cfg.density_per_km2 * cfg.area_km2);
  positions.reserve(static_cast<std::size_t>(n_base));
  for (long long i = 0; i < n_base; ++i) {
    const double x = base.next_u01() * side_m;
    const double y = base.next_u01() * side_m;
    positions.emplace_back(x, y);
  }

  // Extra points inside each hotspot disc lift the local density to
  // hotspot_factor times the base density.
  const double extra_per_km2 = cfg.density_per_km2 * (cfg.hotspot_factor - 1.0);
  if (extra_per_km2 > 0.0) {
    const double disc_km2 =
        std::numbers::pi * sq(cfg.hotspot_radius_m) / 1e6;
    int hotspot_index = 0;
    for (const Cell& c : cells) {
      if (c.kind != CellKind::pico) continue;
      auto st = rng::substream(cfg.seed,
                               {rng::tag::drop, 1 + static_cast<std::uint64_t>(hotspot_index)});
      ++hotspot_index;
      const long long n_extra = st.next_poisson(extra_per_km2 * disc_km2);
      for (long long i = 0; i < n_extra; ++i) {
        for (int attempt = 0; attempt < 10000; ++attempt) {
          const double r = cfg.hotspot_radius_m * std::sqrt(st.next_u01());
          const double phi = 2.0 * std::numbers::pi * st.next_u01();
          const double x = c.x_m + r * std::cos(phi);
          const double y = c.y_m + r * std::sin(phi);
          if (x >= 0.0 && x <= side_m && y >= 0.0 && y <= side_m) {
            positions.emplace_back(x, y);
            break;
          }
        }
      }
    }
  }
  return positions;
}

std::optional<Association> associate(
    const std::vector<Cell>& cells,
    const std::function<double(const Cell&)>& loss_fn, double audible_rsrp_dbm) {
  const double min_rsrp_w = dbm_to_watts(audible_rsrp_dbm);
  Association assoc;
  double best_rsrp = -1.0;
  for (const Cell& c : cells) {
    const double loss = loss_fn(c);
    const double rsrp_w = c.tx_power_w / loss;
    if (rsrp_w < min_rsrp_w) continue;
    assoc.losses.emplace_back(c.id, loss);
    if (rsrp_w > best_rsrp || (rsrp_w == best_rsrp && c.id < assoc.serving_cell)) {
      best_rsrp = rsrp_w;
      assoc.serving_cell = c.id;
    }
  }
  if (assoc.serving_cell < 0) return std::nullopt;
  std::sort(assoc.losses.begin(), assoc.losses.end());
  return assoc;
}

NetworkSnapshot generate_snapshot(const GeneratorConfig& cfg) {
  NetworkSnapshot snap;
  snap.config_echo = cfg;
  snap.cells = generate_topology(cfg);
  const auto positions = drop_ues(snap.cells, cfg);

  const double rho = std::clamp(cfg.shadow_corr, 0.0, 1.0);
  const double w_common = std::sqrt(rho);
  const double w_link = std::sqrt(1.0 - rho);

  for (std::size_t i = 0; i < positions.size(); ++i) {
    const auto ue_tag = static_cast<std::uint64_t>(i);
    const double z_common =
        rng::substream(cfg.seed, {rng::tag::shadow, ue_tag, kCommonShadowTag})
            .next_normal();
    auto loss_fn = [&](const Cell& c) {
      const double z_link =
          rng::substream(cfg.seed, {rng::tag::shadow, ue_tag, kLinkShadowTag,
                                    static_cast<std::uint64_t>(c.id)})
              .next_normal();
      const double shadow_db =
          cfg.shadow_sigma_db * (w_common * z_common + w_link * z_link);
      return path_loss(c, positions[i].first, positions[i].second, shadow_db, cfg);
    };
    auto assoc = associate(snap.cells, loss_fn, cfg.audible_rsrp_dbm);
    if (!assoc) {
      ++snap.coverage_holes;
      continue;
    }
    UESample ue;
    ue.id = static_cast<int>(i);
    ue.x_m = positions[i].first;
    ue.y_m = positions[i].second;
    ue.serving_cell = assoc->serving_cell;
    ue.losses = std::move(assoc->losses);
    snap.ues.push_back(std::move(ue));
  }
  return snap;
}

std::string snapshot_content_hash(const NetworkSnapshot& snapshot) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  };
  auto feed_double = [&](double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    feed(bits);
  };
  feed(snapshot.cells.size());
  for (const Cell& c : snapshot.cells) {
    feed(static_cast<std::uint64_t>(c.id));
    feed(static_cast<std::uint64_t>(c.kind));
    feed_double(c.x_m);
    feed_double(c.y_m);
    feed_double(c.tx_power_w);
  }
  feed(snapshot.ues.size());
  for (const UESample& u : snapshot.ues) {
    feed(static_cast<std::uint64_t>(u.id));
    feed_double(u.x_m);
    feed_double(u.y_m);
    feed(static_cast<std::uint64_t>(u.serving_cell));
    for (const auto& [cell, loss] : u.losses) {
      feed(static_cast<std::uint64_t>(cell));
      feed_double(loss);
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace leap
