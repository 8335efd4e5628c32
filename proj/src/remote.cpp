#include "ucca/remote.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ucca {

RemoteLabelVocab::RemoteLabelVocab() { add(kNotParentLabel); }

RemoteLabelVocab::RemoteLabelVocab(const std::vector<std::string>& labels) {
  if (labels.empty() || labels[0] != kNotParentLabel) {
    throw std::invalid_argument("remote label vocabulary must start with NOT-PARENT");
  }
  for (const auto& l : labels) {
    if (index_.count(l)) throw std::invalid_argument("duplicate remote label '" + l + "'");
    add(l);
  }
}

int RemoteLabelVocab::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  int i = size();
  labels_.push_back(label);
  index_.emplace(label, i);
  return i;
}

int RemoteLabelVocab::index(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

Span yield_extent(const PrimaryIndex& index, NodeId node) {
  const std::vector<int>& y = index.yield(node);
  if (y.empty()) throw std::logic_error("node " + std::to_string(to_int(node)) + " has an empty yield");
  return Span{y.front() - 1, y.back()};
}

std::vector<RemoteCandidatePair> enumerate_pairs(const UccaGraph& graph, const std::vector<NodeId>& remote_marked) {
  std::vector<RemoteCandidatePair> out;
  if (remote_marked.empty()) return out;
  PrimaryIndex index(graph);
  std::vector<NodeId> candidates;
  for (NodeId id : index.preorder()) {
    if (graph.is_nonterminal(id)) candidates.push_back(id);
  }
  for (NodeId child : remote_marked) {
    if (!graph.is_nonterminal(child)) {
      throw std::invalid_argument("remote-marked node " + std::to_string(to_int(child)) + " is not a nonterminal");
    }
    Span cs = yield_extent(index, child);
    for (NodeId parent : candidates) {
      if (parent == child) continue;
      out.push_back(RemoteCandidatePair{child, parent, cs, yield_extent(index, parent)});
    }
  }
  return out;
}

std::vector<int> gold_pair_labels(const std::vector<RemoteCandidatePair>& pairs, const std::vector<Edge>& gold_remotes,
                                  const RemoteLabelVocab& vocab) {
  std::map<std::pair<NodeId, NodeId>, int> gold;
  for (const Edge& e : gold_remotes) {
    int l = vocab.index(e.label);
    if (l <= 0) throw std::invalid_argument("remote label '" + e.label + "' not in vocabulary");
    gold[{e.parent, e.child}] = l;
  }
  std::vector<int> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto it = gold.find({p.parent, p.child});
    out.push_back(it == gold.end() ? kNotParent : it->second);
  }
  return out;
}

double loss_remote(RemoteScorer& scorer, const std::vector<RemoteCandidatePair>& pairs,
                   const std::vector<Edge>& gold_remotes, const RemoteLabelVocab& vocab, bool accumulate) {
  std::vector<int> gold = gold_pair_labels(pairs, gold_remotes, vocab);
  double total = 0.0;
  std::vector<double> grad;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::vector<double>& s = scorer.scores(pairs[i]);
    if (static_cast<int>(s.size()) != vocab.size()) throw std::invalid_argument("loss_remote: score width mismatch");
    double m = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - m);
    double log_z = m + std::log(z);
    total += log_z - s[static_cast<std::size_t>(gold[i])];
    if (accumulate) {
      grad.resize(s.size());
      for (std::size_t l = 0; l < s.size(); ++l) grad[l] = std::exp(s[l] - log_z);
      grad[static_cast<std::size_t>(gold[i])] -= 1.0;
      scorer.add_grad(pairs[i], grad);
    }
  }
  return total;
}

namespace {

// Adjacency over primary and accepted remote edges, for reachability.
class Reachability {
 public:
  explicit Reachability(const UccaGraph& graph) {
    for (const Edge& e : graph.edges) children_[e.parent].push_back(e.child);
  }
  void add(NodeId parent, NodeId child) { children_[parent].push_back(child); }
  bool reaches(NodeId from, NodeId to) const {
    std::vector<NodeId> stack{from};
    std::unordered_map<NodeId, bool> seen;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = true;
      auto it = children_.find(v);
      if (it != children_.end()) stack.insert(stack.end(), it->second.begin(), it->second.end());
    }
    return false;
  }

 private:
  std::unordered_map<NodeId, std::vector<NodeId>> children_;
};

}  // namespace

std::vector<Edge> predict_remotes(RemoteScorer& scorer, const UccaGraph& graph,
                                  const std::vector<RemoteCandidatePair>& pairs, const RemoteLabelVocab& vocab) {
  struct Candidate {
    std::size_t pair;
    int label;
    double margin;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::vector<double>& s = scorer.scores(pairs[i]);
    int best = static_cast<int>(std::max_element(s.begin(), s.end()) - s.begin());
    if (best != kNotParent) candidates.push_back(Candidate{i, best, s[static_cast<std::size_t>(best)] - s[0]});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.margin > b.margin; });

  std::map<std::pair<NodeId, NodeId>, bool> taken;
  for (const Edge& e : graph.edges) taken[{e.parent, e.child}] = true;
  Reachability reach(graph);
  std::vector<Edge> out;
  for (const Candidate& c : candidates) {
    const RemoteCandidatePair& p = pairs[c.pair];
    if (taken[{p.parent, p.child}]) continue;
    if (reach.reaches(p.child, p.parent)) continue;
    taken[{p.parent, p.child}] = true;
    reach.add(p.parent, p.child);
    out.push_back(Edge{p.parent, p.child, vocab.label(c.label), EdgeKind::kRemote});
  }
  return out;
}

}  // namespace ucca
