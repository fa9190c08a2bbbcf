#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "leap/netmodel.hpp"

namespace leap {

// Histograms bin dB values on half-open intervals [i*w, (i+1)*w) anchored at
// 0 dB; the bin value is the interval midpoint.
struct Hist1DBin {
  int index = 0;
  std::uint64_t count = 0;
  double probability = 0.0;
};

struct Histogram1D {
  double bin_width_db = 1.0;
  std::uint64_t total_samples = 0;
  std::vector<Hist1DBin> bins;  // sorted by index

  double midpoint_db(int index) const { return (index + 0.5) * bin_width_db; }
  double max_midpoint_db() const;
  void add_sample_db(double db);
  void finalize();  // fills probabilities from counts
};

struct Hist2DBin {
  int i = 0;  // serving-loss bin of the interfering cell's UE
  int j = 0;  // cross-loss bin toward the interfered cell
  std::uint64_t count = 0;
  double probability = 0.0;
};

struct Histogram2D {
  double bin_width_db = 1.0;
  std::uint64_t total_samples = 0;
  std::vector<Hist2DBin> bins;  // sorted by (i, j)

  double midpoint_db(int index) const { return (index + 0.5) * bin_width_db; }
  void add_sample_db(double serving_db, double cross_db);
  void finalize();
};

struct EdgeKey {
  int source = 0;  // interfering cell e
  int target = 0;  // interfered cell c
  auto operator<=>(const EdgeKey&) const = default;
};

struct InterfererGraph {
  std::map<int, std::vector<int>> interferers;  // c -> sorted sources e
  std::map<EdgeKey, double> occupancy;          // a_{e->c} in (0, 1]

  bool has_edge(int source, int target) const;
};

struct MeasurementStatistics {
  double bin_width_db = 1.0;
  std::string snapshot_hash;
  std::map<int, Histogram1D> serving;   // cells with at least one UE
  std::map<EdgeKey, Histogram2D> joint; // exactly the graph edges
  InterfererGraph graph;
  std::map<int, double> load;           // rho_c: UE count of the snapshot
  std::vector<int> empty_cells;         // flagged, excluded from objective
};

MeasurementStatistics build_statistics(const NetworkSnapshot& snapshot,
                                       double bin_width_db);

// Deterministic Bernoulli thinning of UEs.
NetworkSnapshot subsample(const NetworkSnapshot& snapshot, double fraction,
                          std::uint64_t seed);

}  // namespace leap
