#pragma once

// Distribution of the moves discontinuity removal needs over a corpus.

#include <array>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucca/conversion.hpp"

namespace ucca {

struct DiscontinuityStats {
  // Indexed by MoveCategory: ancestor 1, ancestor 2, ancestor 3+, discontinuous.
  std::array<long, 4> counts{};
  long graphs = 0;
  long discontinuous_graphs = 0;
  long lossy_moves = 0;

  long total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  // Percent of all moves, 0 when there are none.
  double percent(MoveCategory c) const;
};

const char* category_name(MoveCategory c);

DiscontinuityStats discontinuity_stats(const std::vector<UccaGraph>& corpus);

nlohmann::json stats_to_json(const DiscontinuityStats& stats);

}  // namespace ucca
