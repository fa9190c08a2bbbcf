#pragma once

#include <string>
#include <vector>

namespace leap {

struct CellParameters {
  int cell_id = 0;
  double p0_w_per_rb = 0.0;  // nominal transmit PSD
  double alpha = 0.0;        // path loss compensation factor
  double i_star_w = 0.0;     // interference target
};

struct PowerControlSolution {
  std::string provenance;  // "sl", "ce" or "fa_fpc"
  double objective = 0.0;
  std::vector<CellParameters> cells;  // sorted by cell_id

  bool has_cell(int cell_id) const;
  const CellParameters& for_cell(int cell_id) const;
};

}  // namespace leap
