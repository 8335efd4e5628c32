#include "ucca/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ucca/labels.hpp"

namespace ucca {

namespace {

std::string id_str(NodeId id) { return std::to_string(to_int(id)); }

std::string edge_str(const Edge& e) {
  return "(" + id_str(e.parent) + "->" + id_str(e.child) + (e.kind == EdgeKind::kRemote ? ", remote" : "") +
         ")";
}

}  // namespace

bool UccaGraph::is_nonterminal(NodeId id) const {
  return std::find(nonterminals.begin(), nonterminals.end(), id) != nonterminals.end();
}

bool UccaGraph::has_remote_edges() const {
  return std::any_of(edges.begin(), edges.end(), [](const Edge& e) { return e.kind == EdgeKind::kRemote; });
}

// ---------------------------------------------------------------------------

PrimaryIndex::PrimaryIndex(const UccaGraph& graph) : root_(graph.root) {
  const int n = graph.num_tokens();
  for (int t = 1; t <= n; ++t) ids_.push_back(make_node_id(t));
  ids_.insert(ids_.end(), graph.nonterminals.begin(), graph.nonterminals.end());
  for (int i = 0; i < static_cast<int>(ids_.size()); ++i) {
    if (!dense_.emplace(ids_[i], i).second) throw GraphError("duplicate node id " + id_str(ids_[i]));
  }
  const int count = static_cast<int>(ids_.size());
  parent_.assign(count, -1);
  label_.assign(count, std::string());
  children_.assign(count, {});
  depth_.assign(count, -1);
  yield_.assign(count, {});

  std::vector<std::vector<int>> kids(count);
  for (const Edge& e : graph.edges) {
    if (e.kind != EdgeKind::kPrimary) continue;
    auto p = dense_.find(e.parent);
    auto c = dense_.find(e.child);
    if (p == dense_.end() || c == dense_.end()) throw GraphError("edge " + edge_str(e) + " references unknown node");
    if (parent_[c->second] != -1) throw GraphError("node " + id_str(e.child) + " has several primary parents");
    parent_[c->second] = p->second;
    label_[c->second] = e.label;
    kids[p->second].push_back(c->second);
  }
  auto r = dense_.find(root_);
  if (r == dense_.end()) throw GraphError("root " + id_str(root_) + " is not a node");
  if (parent_[r->second] != -1) throw GraphError("root has a primary parent");

  // Iterative DFS from the root: depths, postorder for yields.
  std::vector<int> order;
  std::vector<int> stack{r->second};
  depth_[r->second] = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (int k : kids[v]) {
      if (depth_[k] != -1) throw GraphError("primary edges contain a cycle");
      depth_[k] = depth_[v] + 1;
      stack.push_back(k);
    }
  }
  if (static_cast<int>(order.size()) != count) throw GraphError("primary edges do not reach every node");
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int v = *it;
    if (graph.is_terminal(ids_[v])) yield_[v].push_back(to_int(ids_[v]));
    for (int k : kids[v]) yield_[v].insert(yield_[v].end(), yield_[k].begin(), yield_[k].end());
    std::sort(yield_[v].begin(), yield_[v].end());
  }
  for (int v = 0; v < count; ++v) {
    auto& ks = kids[v];
    std::sort(ks.begin(), ks.end(), [&](int a, int b) {
      int la = yield_[a].empty() ? 1 << 30 : yield_[a].front();
      int lb = yield_[b].empty() ? 1 << 30 : yield_[b].front();
      if (la != lb) return la < lb;
      return to_int(ids_[a]) < to_int(ids_[b]);
    });
    for (int k : ks) children_[v].push_back(ids_[k]);
  }
}

int PrimaryIndex::index_of(NodeId id) const {
  auto it = dense_.find(id);
  if (it == dense_.end()) throw GraphError("unknown node id " + id_str(id));
  return it->second;
}

std::optional<NodeId> PrimaryIndex::parent(NodeId id) const {
  int p = parent_[index_of(id)];
  if (p < 0) return std::nullopt;
  return ids_[p];
}

const std::string& PrimaryIndex::edge_label(NodeId id) const { return label_[index_of(id)]; }

const std::vector<NodeId>& PrimaryIndex::children(NodeId id) const { return children_[index_of(id)]; }

int PrimaryIndex::depth(NodeId id) const { return depth_[index_of(id)]; }

const std::vector<int>& PrimaryIndex::yield(NodeId id) const { return yield_[index_of(id)]; }

bool PrimaryIndex::is_ancestor_or_self(NodeId ancestor, NodeId node) const {
  int a = index_of(ancestor);
  for (int v = index_of(node); v >= 0; v = parent_[v]) {
    if (v == a) return true;
  }
  return false;
}

NodeId PrimaryIndex::lca(NodeId a, NodeId b) const {
  int x = index_of(a);
  int y = index_of(b);
  while (depth_[x] > depth_[y]) x = parent_[x];
  while (depth_[y] > depth_[x]) y = parent_[y];
  while (x != y) {
    x = parent_[x];
    y = parent_[y];
  }
  return ids_[x];
}

std::vector<NodeId> PrimaryIndex::preorder() const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    out.push_back(v);
    const auto& ks = children(v);
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const UccaGraph& graph) {
  std::vector<std::string> out;
  const int n = graph.num_tokens();
  if (n == 0) out.push_back("graph has no tokens");
  for (int t = 0; t < n; ++t) {
    if (graph.tokens[t].form.empty()) out.push_back("token " + std::to_string(t + 1) + " has an empty form");
  }

  std::set<NodeId> nts;
  for (NodeId id : graph.nonterminals) {
    if (to_int(id) <= n) out.push_back("nonterminal id " + id_str(id) + " collides with terminal range 1.." + std::to_string(n));
    if (!nts.insert(id).second) out.push_back("duplicate nonterminal id " + id_str(id));
  }
  auto exists = [&](NodeId id) { return graph.is_terminal(id) || nts.count(id) != 0; };
  if (!nts.count(graph.root)) out.push_back("root " + id_str(graph.root) + " is not a nonterminal");

  std::map<NodeId, int> primary_parents;
  std::set<std::pair<NodeId, NodeId>> primary_pairs;
  std::set<std::pair<NodeId, NodeId>> remote_pairs;
  std::map<NodeId, std::vector<NodeId>> adjacency;
  std::map<NodeId, int> primary_children;
  bool edges_ok = true;

  for (const Edge& e : graph.edges) {
    if (!exists(e.parent) || !exists(e.child)) {
      out.push_back("edge " + edge_str(e) + " references an unknown node");
      edges_ok = false;
      continue;
    }
    if (graph.is_terminal(e.parent)) out.push_back("terminal " + id_str(e.parent) + " has child " + id_str(e.child));
    if (e.parent == e.child) out.push_back("edge " + edge_str(e) + " is a self loop");
    adjacency[e.parent].push_back(e.child);

    const bool to_terminal = graph.is_terminal(e.child);
    if (e.kind == EdgeKind::kPrimary) {
      ++primary_parents[e.child];
      ++primary_children[e.parent];
      primary_pairs.emplace(e.parent, e.child);
      if (to_terminal && !e.label.empty()) {
        out.push_back("terminal edge " + edge_str(e) + " carries label '" + e.label + "'");
      }
    } else {
      if (to_terminal) out.push_back("remote edge " + edge_str(e) + " points at terminal " + id_str(e.child));
      if (!remote_pairs.emplace(e.parent, e.child).second) out.push_back("duplicate remote edge " + edge_str(e));
    }
    if (!to_terminal) {
      if (auto problem = category_label_problem(e.label)) out.push_back("edge " + edge_str(e) + ": " + *problem);
    }
  }
  for (const auto& [p, c] : remote_pairs) {
    if (primary_pairs.count({p, c})) {
      out.push_back("remote edge (" + id_str(p) + "->" + id_str(c) + ") duplicates a primary edge");
    }
  }

  auto check_parent_count = [&](NodeId id) {
    int count = primary_parents.count(id) ? primary_parents[id] : 0;
    if (id == graph.root) {
      if (count != 0) out.push_back("root " + id_str(id) + " has a primary parent");
    } else if (count != 1) {
      out.push_back("node " + id_str(id) + " has " + std::to_string(count) + " primary parents");
    }
  };
  for (int t = 1; t <= n; ++t) check_parent_count(make_node_id(t));
  for (NodeId id : nts) {
    check_parent_count(id);
    if (!primary_children.count(id)) out.push_back("nonterminal " + id_str(id) + " has no primary children");
  }

  if (!edges_ok) return out;

  // Primary reachability from the root.
  if (nts.count(graph.root)) {
    std::set<NodeId> seen{graph.root};
    std::vector<NodeId> stack{graph.root};
    std::map<NodeId, std::vector<NodeId>> primary_kids;
    for (const Edge& e : graph.edges) {
      if (e.kind == EdgeKind::kPrimary) primary_kids[e.parent].push_back(e.child);
    }
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (NodeId k : primary_kids[v]) {
        if (seen.insert(k).second) stack.push_back(k);
      }
    }
    for (int t = 1; t <= n; ++t) {
      if (!seen.count(make_node_id(t))) out.push_back("terminal " + std::to_string(t) + " unreachable from root");
    }
    for (NodeId id : nts) {
      if (!seen.count(id)) out.push_back("nonterminal " + id_str(id) + " unreachable from root");
    }
  }

  // Acyclicity of primary + remote edges (three-colour DFS).
  std::map<NodeId, int> colour;
  std::function<bool(NodeId)> has_cycle = [&](NodeId v) {
    colour[v] = 1;
    for (NodeId k : adjacency[v]) {
      int c = colour[k];
      if (c == 1) return true;
      if (c == 0 && has_cycle(k)) return true;
    }
    colour[v] = 2;
    return false;
  };
  for (NodeId id : nts) {
    if (colour[id] == 0 && has_cycle(id)) {
      out.push_back("edge set contains a cycle through node " + id_str(id));
      break;
    }
  }
  return out;
}

std::vector<int> yield_of(const UccaGraph& graph, NodeId node) {
  PrimaryIndex index(graph);
  return index.yield(node);
}

bool is_contiguous(const std::vector<int>& sorted_positions) {
  if (sorted_positions.empty()) return true;
  return sorted_positions.back() - sorted_positions.front() + 1 == static_cast<int>(sorted_positions.size());
}

bool is_discontinuous(const UccaGraph& graph, NodeId node) {
  if (graph.is_terminal(node)) throw GraphError("is_discontinuous: node " + id_str(node) + " is a terminal");
  PrimaryIndex index(graph);
  return !is_contiguous(index.yield(node));
}

NodeId lca(const UccaGraph& graph, NodeId a, NodeId b) {
  PrimaryIndex index(graph);
  return index.lca(a, b);
}

UccaGraph canonicalize(const UccaGraph& graph, std::unordered_map<NodeId, NodeId>* remap_out) {
  PrimaryIndex index(graph);
  const int n = graph.num_tokens();
  std::unordered_map<NodeId, NodeId> remap;
  for (int t = 1; t <= n; ++t) remap[make_node_id(t)] = make_node_id(t);
  int next = n + 1;
  UccaGraph out;
  out.tokens = graph.tokens;
  out.lang = graph.lang;
  const auto order = index.preorder();
  for (NodeId v : order) {
    if (graph.is_terminal(v)) continue;
    remap[v] = make_node_id(next++);
    out.nonterminals.push_back(remap[v]);
  }
  out.root = remap.at(graph.root);
  for (NodeId v : order) {
    for (NodeId k : index.children(v)) {
      out.edges.push_back(Edge{remap.at(v), remap.at(k), index.edge_label(k), EdgeKind::kPrimary});
    }
  }
  std::vector<Edge> remotes;
  for (const Edge& e : graph.edges) {
    if (e.kind == EdgeKind::kRemote) remotes.push_back(Edge{remap.at(e.parent), remap.at(e.child), e.label, e.kind});
  }
  std::sort(remotes.begin(), remotes.end());
  out.edges.insert(out.edges.end(), remotes.begin(), remotes.end());
  if (remap_out) *remap_out = std::move(remap);
  return out;
}

std::vector<Edge> canonical_edges(const UccaGraph& graph) {
  auto edges = canonicalize(graph).edges;
  std::sort(edges.begin(), edges.end());
  return edges;
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const ConstituentTree& tree) {
  std::vector<std::string> out;
  if (tree.nodes.empty()) {
    out.push_back("tree has no nodes");
    return out;
  }
  if (tree.nodes[0].label != kRootLabel) out.push_back("root label is '" + tree.nodes[0].label + "', expected ROOT");
  if (tree.nodes[0].is_leaf()) out.push_back("root is a leaf");

  std::vector<int> parent_count(tree.nodes.size(), 0);
  std::vector<int> leaves;
  std::vector<char> visited(tree.nodes.size(), 0);
  std::function<void(int)> walk = [&](int v) {
    if (visited[v]) {
      out.push_back("node " + std::to_string(v) + " reached twice");
      return;
    }
    visited[v] = 1;
    const TreeNode& node = tree.nodes[v];
    if (node.is_leaf()) {
      if (!node.children.empty()) out.push_back("leaf " + std::to_string(v) + " has children");
      leaves.push_back(node.token);
      return;
    }
    if (node.children.empty()) out.push_back("internal node " + std::to_string(v) + " has no children");
    if (node.label.empty()) out.push_back("internal node " + std::to_string(v) + " has an empty label");
    for (int k : node.children) {
      if (k <= 0 || k >= static_cast<int>(tree.nodes.size())) {
        out.push_back("node " + std::to_string(v) + " has out-of-range child " + std::to_string(k));
        continue;
      }
      walk(k);
    }
  };
  walk(0);
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    if (!visited[v]) out.push_back("node " + std::to_string(v) + " unreachable from root");
  }
  bool in_order = static_cast<int>(leaves.size()) == tree.num_tokens();
  for (std::size_t i = 0; in_order && i < leaves.size(); ++i) in_order = leaves[i] == static_cast<int>(i) + 1;
  if (!in_order) out.push_back("leaf sequence does not equal tokens 1..n in order");
  return out;
}

std::vector<Span> node_spans(const ConstituentTree& tree) {
  std::vector<Span> spans(tree.nodes.size());
  std::function<void(int)> walk = [&](int v) {
    const TreeNode& node = tree.nodes[v];
    if (node.is_leaf()) {
      spans[v] = Span{node.token - 1, node.token};
      return;
    }
    int lo = 1 << 30;
    int hi = -1;
    for (int k : node.children) {
      walk(k);
      lo = std::min(lo, spans[k].begin);
      hi = std::max(hi, spans[k].end);
    }
    spans[v] = Span{lo, hi};
  };
  if (!tree.nodes.empty()) walk(0);
  return spans;
}

std::vector<int> yield_of(const ConstituentTree& tree, int node_index) {
  if (node_index < 0 || node_index >= static_cast<int>(tree.nodes.size())) {
    throw GraphError("unknown tree node " + std::to_string(node_index));
  }
  std::vector<int> out;
  std::vector<int> stack{node_index};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (tree.nodes[v].is_leaf()) out.push_back(tree.nodes[v].token);
    for (int k : tree.nodes[v].children) stack.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ucca
