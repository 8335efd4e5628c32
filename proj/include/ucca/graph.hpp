#pragma once

// Core data model: UCCA graphs (primary tree + remote reentrancies) and the
// constituent trees they are converted into.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ucca {

enum class NodeId : std::int32_t {};

constexpr std::int32_t to_int(NodeId id) { return static_cast<std::int32_t>(id); }
constexpr NodeId make_node_id(std::int32_t v) { return static_cast<NodeId>(v); }

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string form;
  std::string pos;
  std::string ner;
  std::string dep_label;
  std::string language;

  friend bool operator==(const Token&, const Token&) = default;
};

enum class EdgeKind : std::uint8_t { kPrimary = 0, kRemote = 1 };

struct Edge {
  NodeId parent{};
  NodeId child{};
  std::string label;
  EdgeKind kind = EdgeKind::kPrimary;

  friend auto operator<=>(const Edge&, const Edge&) = default;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Terminals are implicit: token k (1-based) is node k. Nonterminal ids are
// strictly greater than the token count.
struct UccaGraph {
  std::vector<Token> tokens;
  std::string lang;
  std::vector<NodeId> nonterminals;
  NodeId root{};
  std::vector<Edge> edges;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  bool is_terminal(NodeId id) const { return to_int(id) >= 1 && to_int(id) <= num_tokens(); }
  bool is_nonterminal(NodeId id) const;
  bool has_node(NodeId id) const { return is_terminal(id) || is_nonterminal(id); }
  bool has_remote_edges() const;

  friend bool operator==(const UccaGraph&, const UccaGraph&) = default;
};

// Read-only index over the primary edges of a graph. Requires the primary
// edges to form a tree (run validate() first on untrusted input).
class PrimaryIndex {
 public:
  explicit PrimaryIndex(const UccaGraph& graph);

  bool contains(NodeId id) const { return dense_.count(id) != 0; }
  std::optional<NodeId> parent(NodeId id) const;
  const std::string& edge_label(NodeId id) const;
  // Children ordered by leftmost terminal of their yield.
  const std::vector<NodeId>& children(NodeId id) const;
  int depth(NodeId id) const;
  // Sorted terminal positions (1-based).
  const std::vector<int>& yield(NodeId id) const;
  bool is_ancestor_or_self(NodeId ancestor, NodeId node) const;
  NodeId lca(NodeId a, NodeId b) const;
  NodeId root() const { return root_; }
  // Preorder with children by leftmost terminal.
  std::vector<NodeId> preorder() const;

 private:
  int index_of(NodeId id) const;

  NodeId root_{};
  std::unordered_map<NodeId, int> dense_;
  std::vector<NodeId> ids_;
  std::vector<int> parent_;
  std::vector<std::string> label_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<int> depth_;
  std::vector<std::vector<int>> yield_;
};

// Empty iff every graph invariant holds. Messages name the offending ids.
std::vector<std::string> validate(const UccaGraph& graph);

std::vector<int> yield_of(const UccaGraph& graph, NodeId node);
bool is_discontinuous(const UccaGraph& graph, NodeId node);
NodeId lca(const UccaGraph& graph, NodeId a, NodeId b);

// True iff the sorted positions form one contiguous interval.
bool is_contiguous(const std::vector<int>& sorted_positions);

// Renumbers nonterminals n+1, n+2, ... in primary preorder (children by
// leftmost terminal) and orders edges primary-first in that preorder, remote
// edges sorted after. Two graphs with the same structure canonicalize equal.
// When remap is given it receives old id -> canonical id for every node.
UccaGraph canonicalize(const UccaGraph& graph, std::unordered_map<NodeId, NodeId>* remap = nullptr);

// Edge list of the canonical form, sorted; the unit of edge-identity checks.
std::vector<Edge> canonical_edges(const UccaGraph& graph);

// ---------------------------------------------------------------------------
// Constituent trees.

struct TreeNode {
  std::string label;     // empty for leaves
  int token = 0;         // 1-based position for leaves, 0 for internal nodes
  std::vector<int> children;

  bool is_leaf() const { return token > 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

inline constexpr const char* kRootLabel = "ROOT";

// nodes[0] is the root, labeled "ROOT".
struct ConstituentTree {
  std::vector<Token> tokens;
  std::string lang;
  std::vector<TreeNode> nodes;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  friend bool operator==(const ConstituentTree&, const ConstituentTree&) = default;
};

struct Span {
  int begin = 0;  // fencepost
  int end = 0;    // fencepost, exclusive of begin: covers tokens begin+1..end
  int length() const { return end - begin; }
  friend auto operator<=>(const Span&, const Span&) = default;
  friend bool operator==(const Span&, const Span&) = default;
};

std::vector<std::string> validate(const ConstituentTree& tree);

// Fencepost span of every tree node, indexed like tree.nodes.
std::vector<Span> node_spans(const ConstituentTree& tree);

// Terminal positions under a tree node.
std::vector<int> yield_of(const ConstituentTree& tree, int node_index);

// ---------------------------------------------------------------------------

struct EdgeRecord {
  std::vector<int> yield;
  std::string label;
  EdgeKind kind = EdgeKind::kPrimary;

  friend auto operator<=>(const EdgeRecord&, const EdgeRecord&) = default;
  friend bool operator==(const EdgeRecord&, const EdgeRecord&) = default;
};

}  // namespace ucca

template <>
struct std::hash<ucca::Span> {
  std::size_t operator()(const ucca::Span& s) const noexcept {
    return std::hash<long long>()((static_cast<long long>(s.begin) << 32) ^ s.end);
  }
};
