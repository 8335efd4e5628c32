#include "ucca/conversion.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ucca/labels.hpp"

namespace ucca {

namespace {

std::string id_str(NodeId id) { return std::to_string(to_int(id)); }

void require_valid(const UccaGraph& graph, const char* what) {
  auto problems = validate(graph);
  if (!problems.empty()) throw ConversionError(std::string(what) + ": invalid graph: " + problems.front());
}

// Primary tree with dense indices that supports reattachment.
class MutableTree {
 public:
  explicit MutableTree(const UccaGraph& graph) : graph_(graph) {
    const int n = graph.num_tokens();
    for (int t = 1; t <= n; ++t) ids_.push_back(make_node_id(t));
    ids_.insert(ids_.end(), graph.nonterminals.begin(), graph.nonterminals.end());
    for (int i = 0; i < size(); ++i) dense_[ids_[i]] = i;
    parent_.assign(size(), -1);
    label_.assign(size(), {});
    children_.assign(size(), {});
    for (const Edge& e : graph.edges) {
      if (e.kind != EdgeKind::kPrimary) continue;
      int c = dense_.at(e.child);
      int p = dense_.at(e.parent);
      parent_[c] = p;
      label_[c] = e.label;
      children_[p].push_back(c);
    }
    root_ = dense_.at(graph.root);
  }

  int size() const { return static_cast<int>(ids_.size()); }
  int root() const { return root_; }
  bool terminal(int v) const { return v < graph_.num_tokens(); }
  int terminal_index(int position) const { return position - 1; }
  int parent(int v) const { return parent_[v]; }
  NodeId id(int v) const { return ids_[v]; }
  std::string& label(int v) { return label_[v]; }

  int depth(int v) const {
    int d = 0;
    for (; parent_[v] >= 0; v = parent_[v]) ++d;
    return d;
  }

  bool is_ancestor_or_self(int a, int v) const {
    for (; v >= 0; v = parent_[v]) {
      if (v == a) return true;
    }
    return false;
  }

  int lca(int a, int b) const {
    int da = depth(a);
    int db = depth(b);
    while (da > db) {
      a = parent_[a];
      --da;
    }
    while (db > da) {
      b = parent_[b];
      --db;
    }
    while (a != b) {
      a = parent_[a];
      b = parent_[b];
    }
    return a;
  }

  std::vector<std::vector<int>> yields() const {
    std::vector<std::vector<int>> out(size());
    auto walk = [&](auto&& self, int v) -> void {
      if (terminal(v)) out[v].push_back(v + 1);
      for (int k : children_[v]) {
        self(self, k);
        out[v].insert(out[v].end(), out[k].begin(), out[k].end());
      }
      std::sort(out[v].begin(), out[v].end());
    };
    walk(walk, root_);
    return out;
  }

  void reattach(int child, int new_parent) {
    auto& siblings = children_[parent_[child]];
    siblings.erase(std::find(siblings.begin(), siblings.end(), child));
    children_[new_parent].push_back(child);
    parent_[child] = new_parent;
  }

  UccaGraph to_graph() const {
    UccaGraph out;
    out.tokens = graph_.tokens;
    out.lang = graph_.lang;
    out.nonterminals = graph_.nonterminals;
    out.root = graph_.root;
    for (int v = 0; v < size(); ++v) {
      if (parent_[v] >= 0) out.edges.push_back(Edge{ids_[parent_[v]], ids_[v], label_[v], EdgeKind::kPrimary});
    }
    return canonical_order(out);
  }

 private:
  // Keeps the caller's ids but lists edges in preorder.
  static UccaGraph canonical_order(UccaGraph g) {
    PrimaryIndex index(g);
    std::vector<Edge> edges;
    for (NodeId v : index.preorder()) {
      for (NodeId k : index.children(v)) edges.push_back(Edge{v, k, index.edge_label(k), EdgeKind::kPrimary});
    }
    g.edges = std::move(edges);
    return g;
  }

  const UccaGraph& graph_;
  std::vector<NodeId> ids_;
  std::unordered_map<NodeId, int> dense_;
  std::vector<int> parent_;
  std::vector<std::string> label_;
  std::vector<std::vector<int>> children_;
  int root_ = -1;
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

MoveCategory MoveRecord::category() const {
  if (!ancestor_distance) return MoveCategory::kDiscontinuous;
  if (*ancestor_distance == 1) return MoveCategory::kAncestor1;
  if (*ancestor_distance == 2) return MoveCategory::kAncestor2;
  return MoveCategory::kAncestor3Plus;
}

StripResult strip_remotes(const UccaGraph& graph) {
  require_valid(graph, "strip_remotes");
  StripResult out;
  out.graph = graph;
  out.graph.edges.clear();
  std::unordered_set<NodeId> remote_children;
  for (const Edge& e : graph.edges) {
    if (e.kind == EdgeKind::kRemote) {
      out.remotes.push_back(e);
      remote_children.insert(e.child);
    }
  }
  for (const Edge& e : graph.edges) {
    if (e.kind != EdgeKind::kPrimary) continue;
    Edge kept = e;
    if (remote_children.count(e.child)) kept.label += kRemoteSuffix;
    out.graph.edges.push_back(std::move(kept));
  }
  return out;
}

DiscontinuityResult remove_discontinuities(const UccaGraph& graph) {
  if (graph.has_remote_edges()) throw ConversionError("remove_discontinuities: graph still has remote edges");
  MutableTree tree(graph);
  DiscontinuityResult out;
  const long limit = static_cast<long>(tree.size()) * tree.size();

  for (long iteration = 0;; ++iteration) {
    const auto yields = tree.yields();
    std::vector<char> discontinuous(tree.size(), 0);
    long holes = 0;
    int chosen = -1;
    for (int v = 0; v < tree.size(); ++v) {
      if (tree.terminal(v) || is_contiguous(yields[v])) continue;
      discontinuous[v] = 1;
      holes += yields[v].back() - yields[v].front() + 1 - static_cast<long>(yields[v].size());
      if (chosen < 0) {
        chosen = v;
        continue;
      }
      // Smallest leftmost terminal, then deepest, then smallest id.
      int lv = yields[v].front();
      int lc = yields[chosen].front();
      int dv = tree.depth(v);
      int dc = tree.depth(chosen);
      if (lv < lc || (lv == lc && (dv > dc || (dv == dc && to_int(tree.id(v)) < to_int(tree.id(chosen)))))) {
        chosen = v;
      }
    }
    out.hole_counts.push_back(holes);
    if (chosen < 0) break;
    if (iteration > limit) {
      throw ConversionError("remove_discontinuities: no convergence after " + std::to_string(iteration) +
                            " moves (node " + id_str(tree.id(chosen)) + ")");
    }

    const int a = chosen;
    const auto& ya = yields[a];
    int b_position = ya.front();
    for (std::size_t i = 0; i < ya.size() && ya[i] == b_position; ++i) ++b_position;
    const int b = tree.terminal_index(b_position);
    const int l = tree.lca(a, b);
    int c = b;
    while (tree.parent(c) != l && !discontinuous[tree.parent(c)]) c = tree.parent(c);
    const int d = tree.parent(c);

    MoveRecord move;
    move.moved = tree.id(c);
    move.from_parent = tree.id(d);
    move.to_parent = tree.id(a);
    if (d == l) move.ancestor_distance = tree.depth(a) - tree.depth(d);

    std::string& label = tree.label(c);
    if (ends_with(label, kAncestorSuffix)) {
      // Moved a second time: the first marking no longer restores correctly.
      label.resize(label.size() - kAncestorSuffix.size());
      ++out.lossy_moves;
      for (auto& earlier : out.moves) {
        if (earlier.moved == move.moved) earlier.suffixed = false;
      }
    }
    move.suffixed = d == l && move.ancestor_distance == 1 && !tree.terminal(c);
    if (move.suffixed) {
      label += kAncestorSuffix;
    } else {
      ++out.lossy_moves;
    }
    tree.reattach(c, a);
    out.moves.push_back(move);
  }
  out.graph = tree.to_graph();
  return out;
}

ConstituentTree push_labels(const UccaGraph& graph) {
  if (graph.has_remote_edges()) throw ConversionError("push_labels: graph has remote edges");
  PrimaryIndex index(graph);
  for (NodeId v : graph.nonterminals) {
    if (!is_contiguous(index.yield(v))) throw ConversionError("push_labels: node " + id_str(v) + " is discontinuous");
  }
  ConstituentTree tree;
  tree.tokens = graph.tokens;
  tree.lang = graph.lang;

  auto add_children = [&](auto&& build, int tree_node, NodeId graph_node) -> void {
    for (NodeId k : index.children(graph_node)) {
      int child_index = static_cast<int>(tree.nodes.size());
      if (graph.is_terminal(k)) {
        tree.nodes.push_back(TreeNode{"", to_int(k), {}});
      } else {
        build(build, k);
      }
      tree.nodes[tree_node].children.push_back(child_index);
    }
  };
  auto build = [&](auto&& self, NodeId v) -> void {
    std::vector<std::string> chain{index.edge_label(v)};
    NodeId innermost = v;
    while (index.children(innermost).size() == 1 && !graph.is_terminal(index.children(innermost).front())) {
      innermost = index.children(innermost).front();
      chain.push_back(index.edge_label(innermost));
    }
    int me = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{join_label_chain(chain), 0, {}});
    add_children(self, me, innermost);
  };
  tree.nodes.push_back(TreeNode{kRootLabel, 0, {}});
  add_children(build, 0, graph.root);
  return tree;
}

ConversionResult graph_to_tree(const UccaGraph& graph) {
  StripResult stripped = strip_remotes(graph);
  DiscontinuityResult moved = remove_discontinuities(stripped.graph);
  ConversionResult out;
  out.tree = push_labels(moved.graph);
  out.dropped_remote_edges = std::move(stripped.remotes);
  out.moves = std::move(moved.moves);
  out.lossy_moves = moved.lossy_moves;
  return out;
}

RestoreResult tree_to_graph(const ConstituentTree& tree, RestoreMode mode) {
  const bool strict = mode == RestoreMode::kStrict;
  if (auto problems = validate(tree); !problems.empty()) {
    throw ConversionError("tree_to_graph: malformed tree: " + problems.front());
  }
  const int n = tree.num_tokens();

  struct Node {
    int parent = -1;
    std::string label;
    bool remote = false;
    bool ancestor1 = false;
    std::vector<int> children;
  };
  // Graph nodes 0..n-1 are terminals, then nonterminals in creation order.
  std::vector<Node> nodes(n);
  auto add_node = [&](int parent, LabelElement element) {
    int me = static_cast<int>(nodes.size());
    nodes.push_back(Node{parent, std::move(element.base), element.remote, element.ancestor1, {}});
    if (parent >= 0) nodes[parent].children.push_back(me);
    return me;
  };
  const int root = add_node(-1, LabelElement{kRootLabel});
  std::vector<int> marked_order;  // top-down, left-to-right

  auto expand = [&](auto&& self, int tree_node, int graph_parent) -> void {
    for (int k : tree.nodes[tree_node].children) {
      const TreeNode& child = tree.nodes[k];
      if (child.is_leaf()) {
        int t = child.token - 1;
        nodes[t].parent = graph_parent;
        nodes[graph_parent].children.push_back(t);
        continue;
      }
      int attach = graph_parent;
      for (const std::string& piece : split_label_chain(child.label)) {
        LabelElement element = parse_label_element(piece);
        if (auto problem = category_label_problem(element.base)) {
          if (strict) throw ConversionError("tree_to_graph: label '" + child.label + "': " + *problem);
        }
        attach = add_node(attach, std::move(element));
        if (nodes[attach].ancestor1) marked_order.push_back(attach);
      }
      self(self, k, attach);
    }
  };
  expand(expand, 0, root);

  for (int v : marked_order) {
    int p = nodes[v].parent;
    int g = nodes[p].parent;
    bool ok = g >= 0 && nodes[p].children.size() > 1;
    if (!ok) {
      if (strict) {
        throw ConversionError("tree_to_graph: '" + nodes[v].label + kAncestorSuffix.data() +
                              (g < 0 ? "' has no grandparent" : "' is the only child of its parent"));
      }
      nodes[v].ancestor1 = false;
      continue;
    }
    auto& siblings = nodes[p].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), v));
    nodes[g].children.push_back(v);
    nodes[v].parent = g;
  }

  UccaGraph graph;
  graph.tokens = tree.tokens;
  graph.lang = tree.lang;
  const int base_id = n + 1;
  auto graph_id = [&](int v) { return v < n ? make_node_id(v + 1) : make_node_id(base_id + (v - n)); };
  graph.root = graph_id(root);
  for (int v = n; v < static_cast<int>(nodes.size()); ++v) graph.nonterminals.push_back(graph_id(v));
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    for (int k : nodes[v].children) {
      graph.edges.push_back(Edge{graph_id(v), graph_id(k), k < n ? std::string() : nodes[k].label, EdgeKind::kPrimary});
    }
  }

  std::unordered_map<NodeId, NodeId> remap;
  RestoreResult out;
  out.graph = canonicalize(graph, &remap);
  for (int v = n; v < static_cast<int>(nodes.size()); ++v) {
    if (nodes[v].remote) out.remote_marked.push_back(remap.at(graph_id(v)));
  }
  std::sort(out.remote_marked.begin(), out.remote_marked.end());
  return out;
}

}  // namespace ucca
