#include "ucca/stats.hpp"

#include <cmath>

namespace ucca {

double DiscontinuityStats::percent(MoveCategory c) const {
  long t = total();
  return t == 0 ? 0.0 : 100.0 * static_cast<double>(counts[static_cast<std::size_t>(c)]) / static_cast<double>(t);
}

const char* category_name(MoveCategory c) {
  switch (c) {
    case MoveCategory::kAncestor1:
      return "ancestor 1";
    case MoveCategory::kAncestor2:
      return "ancestor 2";
    case MoveCategory::kAncestor3Plus:
      return "ancestor 3+";
    case MoveCategory::kDiscontinuous:
      return "discontinuous";
  }
  return "?";
}

DiscontinuityStats discontinuity_stats(const std::vector<UccaGraph>& corpus) {
  DiscontinuityStats s;
  for (const UccaGraph& g : corpus) {
    auto result = remove_discontinuities(strip_remotes(g).graph);
    ++s.graphs;
    if (!result.moves.empty()) ++s.discontinuous_graphs;
    s.lossy_moves += result.lossy_moves;
    for (const MoveRecord& m : result.moves) ++s.counts[static_cast<std::size_t>(m.category())];
  }
  return s;
}

nlohmann::json stats_to_json(const DiscontinuityStats& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (MoveCategory c : {MoveCategory::kAncestor1, MoveCategory::kAncestor2, MoveCategory::kAncestor3Plus,
                         MoveCategory::kDiscontinuous}) {
    // One decimal, as in the usual presentation of this table.
    double pct = std::round(s.percent(c) * 10.0) / 10.0;
    rows.push_back({{"category", category_name(c)}, {"count", s.counts[static_cast<std::size_t>(c)]}, {"percent", pct}});
  }
  return {{"graphs", s.graphs},
          {"discontinuous_graphs", s.discontinuous_graphs},
          {"moves", s.total()},
          {"lossy_moves", s.lossy_moves},
          {"categories", rows}};
}

}  // namespace ucca
