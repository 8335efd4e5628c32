#pragma once

// Graph <-> tree conversion. Forward: strip remote edges (marking their
// children "-remote"), move nodes until nothing is discontinuous (marking
// single-step LCA moves "-ancestor1"), push edge labels onto nodes.
// Backward: expand label chains, pull labels onto edges, undo ancestor-1 moves.

#include <optional>
#include <vector>

#include "ucca/graph.hpp"

namespace ucca {

class ConversionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StripResult {
  UccaGraph graph;            // primary edges only
  std::vector<Edge> remotes;  // removed edges, original labels
};

StripResult strip_remotes(const UccaGraph& graph);

enum class MoveCategory { kAncestor1, kAncestor2, kAncestor3Plus, kDiscontinuous };

struct MoveRecord {
  NodeId moved{};        // C
  NodeId from_parent{};  // D
  NodeId to_parent{};    // A
  // Edges between D and A when D is the LCA of A and B; empty when D was
  // reached as a discontinuous node instead.
  std::optional<int> ancestor_distance;
  bool suffixed = false;

  MoveCategory category() const;
};

struct DiscontinuityResult {
  UccaGraph graph;
  std::vector<MoveRecord> moves;
  int lossy_moves = 0;
  // Sum over nonterminals of non-descendant terminals inside their span,
  // measured before each iteration (last entry is 0 on success).
  std::vector<long> hole_counts;
};

// Requires a graph without remote edges.
DiscontinuityResult remove_discontinuities(const UccaGraph& graph);

// Requires a remote-free graph in which every nonterminal is contiguous.
ConstituentTree push_labels(const UccaGraph& graph);

struct ConversionResult {
  ConstituentTree tree;
  std::vector<Edge> dropped_remote_edges;
  std::vector<MoveRecord> moves;
  int lossy_moves = 0;
};

ConversionResult graph_to_tree(const UccaGraph& graph);

enum class RestoreMode {
  kStrict,   // malformed markings throw
  kLenient,  // markings that cannot be honoured are dropped (parser output)
};

struct RestoreResult {
  UccaGraph graph;  // canonical ids, primary edges only
  std::vector<NodeId> remote_marked;
};

RestoreResult tree_to_graph(const ConstituentTree& tree, RestoreMode mode = RestoreMode::kStrict);

}  // namespace ucca
