#include "leap/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leap/rng.hpp"
#include "leap/units.hpp"

namespace leap {

namespace {

int bin_of(double db, double width) {
  return static_cast<int>(std::floor(db / width));
}

}  // namespace

double Histogram1D::max_midpoint_db() const {
  if (bins.empty()) throw std::logic_error("empty histogram");
  return midpoint_db(bins.back().index);
}

void Histogram1D::add_sample_db(double db) {
  const int idx = bin_of(db, bin_width_db);
  auto it = std::lower_bound(bins.begin(), bins.end(), idx,
                             [](const Hist1DBin& b, int v) { return b.index < v; });
  if (it == bins.end() || it->index != idx) {
    it = bins.insert(it, Hist1DBin{idx, 0, 0.0});
  }
  ++it->count;
  ++total_samples;
}

void Histogram1D::finalize() {
  for (auto& b : bins) {
    b.probability = static_cast<double>(b.count) / static_cast<double>(total_samples);
  }
}

void Histogram2D::add_sample_db(double serving_db, double cross_db) {
  const int i = bin_of(serving_db, bin_width_db);
  const int j = bin_of(cross_db, bin_width_db);
  auto key_less = [](const Hist2DBin& b, const std::pair<int, int>& v) {
    return std::pair(b.i, b.j) < v;
  };
  auto it = std::lower_bound(bins.begin(), bins.end(), std::pair(i, j), key_less);
  if (it == bins.end() || it->i != i || it->j != j) {
    it = bins.insert(it, Hist2DBin{i, j, 0, 0.0});
  }
  ++it->count;
  ++total_samples;
}

void Histogram2D::finalize() {
  for (auto& b : bins) {
    b.probability = static_cast<double>(b.count) / static_cast<double>(total_samples);
  }
}

bool InterfererGraph::has_edge(int source, int target) const {
  return occupancy.count(EdgeKey{source, target}) > 0;
}

MeasurementStatistics build_statistics(const NetworkSnapshot& snapshot,
                                       double bin_width_db) {
  if (!(bin_width_db > 0.0)) throw std::invalid_argument("bin width must be positive");
  if (snapshot.cells.empty()) throw std::invalid_argument("snapshot has no cells");

  MeasurementStatistics stats;
  stats.bin_width_db = bin_width_db;
  stats.snapshot_hash = snapshot_content_hash(snapshot);

  std::map<int, std::uint64_t> ue_count;
  for (const Cell& c : snapshot.cells) ue_count[c.id] = 0;

  std::map<EdgeKey, std::uint64_t> audible_count;
  for (const UESample& ue : snapshot.ues) {
    const int e = ue.serving_cell;
    ++ue_count.at(e);

    Histogram1D& hist = stats.serving.try_emplace(e, Histogram1D{bin_width_db, 0, {}}).first->second;
    hist.add_sample_db(linear_to_db(ue.loss_to(e)));

    for (const auto& [c, cross_loss] : ue.losses) {
      if (c == e) continue;
      Histogram2D& joint =
          stats.joint.try_emplace(EdgeKey{e, c}, Histogram2D{bin_width_db, 0, {}}).first->second;
      joint.add_sample_db(linear_to_db(ue.loss_to(e)), linear_to_db(cross_loss));
      ++audible_count[EdgeKey{e, c}];
    }
  }

  for (auto& [cell, hist] : stats.serving) hist.finalize();
  for (auto& [key, hist] : stats.joint) hist.finalize();

  for (const auto& [key, n_audible] : audible_count) {
    const double a = static_cast<double>(n_audible) /
                     static_cast<double>(ue_count.at(key.source));
    stats.graph.occupancy[key] = a;
    stats.graph.interferers[key.target].push_back(key.source);
  }
  for (auto& [cell, sources] : stats.graph.interferers) {
    std::sort(sources.begin(), sources.end());
  }

  for (const auto& [cell, n] : ue_count) {
    if (n == 0) {
      stats.empty_cells.push_back(cell);
    } else {
      stats.load[cell] = static_cast<double>(n);
    }
  }
  return stats;
}

NetworkSnapshot subsample(const NetworkSnapshot& snapshot, double fraction,
                          std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("subsample fraction must be in (0, 1]");
  }
  NetworkSnapshot out;
  out.cells = snapshot.cells;
  out.config_echo = snapshot.config_echo;
  out.coverage_holes = snapshot.coverage_holes;
  if (fraction == 1.0) {
    out.ues = snapshot.ues;
    return out;
  }
  for (const UESample& ue : snapshot.ues) {
    auto st = rng::substream(seed, {rng::tag::subsample, static_cast<std::uint64_t>(ue.id)});
    if (st.next_u01() < fraction) out.ues.push_back(ue);
  }
  return out;
}

}  // namespace leap
