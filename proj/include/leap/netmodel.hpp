#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace leap {

enum class CellKind { macro, pico };

struct Cell {
  int id = 0;
  CellKind kind = CellKind::macro;
  double x_m = 0.0;
  double y_m = 0.0;
  double tx_power_w = 40.0;  // downlink, used for RSRP and association
};

struct UESample {
  int id = 0;
  double x_m = 0.0;
  double y_m = 0.0;
  int serving_cell = -1;
  // Audible cells only, sorted by cell id; losses are linear ratios >= 1.
  std::vector<std::pair<int, double>> losses;

  double loss_to(int cell_id) const;
  bool hears(int cell_id) const;
};

struct GeneratorConfig {
  double area_km2 = 9.0;
  int macro_count = 115;
  int pico_count = 10;
  double density_per_km2 = 450.0;
  double hotspot_factor = 2.0;     // UE density multiplier inside pico hotspots
  double hotspot_radius_m = 100.0;
  double shadow_sigma_db = 8.0;
  double shadow_corr = 0.5;        // correlation between a UE's link shadows
  double macro_tx_w = 40.0;
  double pico_tx_w = 4.0;
  double pl0_db = 34.0;            // reference loss at d0 = 1 m
  double macro_exponent = 3.7;
  double pico_exponent = 3.0;
  double min_macro_spacing_m = 100.0;
  double pico_clearance_m = 50.0;
  double audible_rsrp_dbm = -140.0;
  std::uint64_t seed = 1;
};

struct NetworkSnapshot {
  std::vector<Cell> cells;
  std::vector<UESample> ues;
  GeneratorConfig config_echo;
  int coverage_holes = 0;  // UEs discarded for hearing no cell
};

struct placement_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Macros on a jittered hexagonal grid, picos uniform at least
// pico_clearance_m from any macro. Throws placement_error when the area
// cannot hold the requested macros at the minimum inter-site distance.
std::vector<Cell> generate_topology(const GeneratorConfig& cfg);

// Log-distance loss with a caller-supplied shadowing draw (dB); distance is
// clamped at 1 m and the returned linear loss at 1.
double path_loss(const Cell& tx, double rx_x_m, double rx_y_m,
                 double shadowing_db, const GeneratorConfig& cfg);

// Uniform drop at base density plus extra density inside pico hotspot discs.
std::vector<std::pair<double, double>> drop_ues(const std::vector<Cell>& cells,
                                                const GeneratorConfig& cfg);

struct Association {
  int serving_cell = -1;
  std::vector<std::pair<int, double>> losses;
};

// Strongest-RSRP association over audible cells, ties to the lowest cell id.
// nullopt when no cell clears the audibility threshold (coverage hole).
std::optional<Association> associate(
    const std::vector<Cell>& cells,
    const std::function<double(const Cell&)>& loss_fn, double audible_rsrp_dbm);

NetworkSnapshot generate_snapshot(const GeneratorConfig& cfg);

// Content hash over cells, UEs and losses; stable across runs and platforms.
std::string snapshot_content_hash(const NetworkSnapshot& snapshot);

}  // namespace leap
