#pragma once

#include <string>
#include <vector>

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "ucca/conversion.hpp"
#include "ucca/graph.hpp"
#include "ucca/io.hpp"

namespace ucca {

inline std::ostream& operator<<(std::ostream& os, const Edge& e) {
  return os << to_int(e.parent) << (e.kind == EdgeKind::kRemote ? " ~> " : " -> ") << to_int(e.child) << " "
            << e.label;
}

}  // namespace ucca

namespace ucca::fixtures {

inline UccaGraph figure1() {
  return read_graph_corpus(std::string(UCCA_TEST_DATA) + "/figure1.jsonl").at(0);
}

// Figure node k is id 100 + k; terminals are 1..7.
inline NodeId fig(int k) { return make_node_id(100 + k); }

inline constexpr const char* kFigure2 =
    "(ROOT (H (U ``) (H-ancestor1 (A-remote lch) (P ging umher)) (L-ancestor1 und) (P tastete) (U .)))";

// Small graphs for unit tests: tokens w1..wn, nonterminals added explicitly.
class GraphBuilder {
 public:
  explicit GraphBuilder(int tokens, int root = 100) {
    for (int i = 1; i <= tokens; ++i) graph_.tokens.push_back(Token{"w" + std::to_string(i), "X", "O", "dep", ""});
    graph_.root = make_node_id(root);
    graph_.nonterminals.push_back(graph_.root);
  }
  GraphBuilder& node(int id) {
    graph_.nonterminals.push_back(make_node_id(id));
    return *this;
  }
  GraphBuilder& edge(int parent, int child, std::string label = "") {
    graph_.edges.push_back(Edge{make_node_id(parent), make_node_id(child), std::move(label), EdgeKind::kPrimary});
    return *this;
  }
  GraphBuilder& remote(int parent, int child, std::string label) {
    graph_.edges.push_back(Edge{make_node_id(parent), make_node_id(child), std::move(label), EdgeKind::kRemote});
    return *this;
  }
  UccaGraph build() const { return graph_; }

 private:
  UccaGraph graph_;
};

inline UccaGraph primary_only(UccaGraph g) {
  std::erase_if(g.edges, [](const Edge& e) { return e.kind == EdgeKind::kRemote; });
  return g;
}

// Empty when tree_to_graph(graph_to_tree(g)) is edge-identical to g's
// primary structure and marks exactly g's remote children; else the reason.
inline std::string roundtrip_problem(const UccaGraph& g) {
  try {
    auto restored = tree_to_graph(graph_to_tree(g).tree);
    if (canonical_edges(restored.graph) != canonical_edges(primary_only(g))) return "primary edges differ";
    std::unordered_map<NodeId, NodeId> remap;
    canonicalize(g, &remap);
    std::vector<NodeId> expected;
    for (const Edge& e : g.edges) {
      if (e.kind == EdgeKind::kRemote) expected.push_back(remap.at(e.child));
    }
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    if (restored.remote_marked != expected) return "remote-marked set differs";
    return "";
  } catch (const std::exception& e) {
    return std::string("exception: ") + e.what();
  }
}

}  // namespace ucca::fixtures
