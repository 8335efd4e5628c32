#pragma once

// Remote edge recovery: every node marked "-remote" is paired with every
// other nonterminal, and a biaffine classifier picks a label or NOT-PARENT.

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ucca/graph.hpp"
#include "ucca/nn/network.hpp"

namespace ucca {

inline constexpr int kNotParent = 0;
inline constexpr const char* kNotParentLabel = "<NOT-PARENT>";

class RemoteLabelVocab {
 public:
  RemoteLabelVocab();
  explicit RemoteLabelVocab(const std::vector<std::string>& labels);

  int add(const std::string& label);
  int index(const std::string& label) const;  // -1 when absent
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const RemoteLabelVocab&, const RemoteLabelVocab&) = default;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct RemoteCandidatePair {
  NodeId child{};
  NodeId parent{};
  Span child_span;
  Span parent_span;
  friend bool operator==(const RemoteCandidatePair&, const RemoteCandidatePair&) = default;
};

// Fencepost extent of a node's yield: (min position - 1, max position).
Span yield_extent(const PrimaryIndex& index, NodeId node);

// Children in the given order; candidates in primary preorder.
std::vector<RemoteCandidatePair> enumerate_pairs(const UccaGraph& graph, const std::vector<NodeId>& remote_marked);

class RemoteScorer {
 public:
  virtual ~RemoteScorer() = default;
  virtual const std::vector<double>& scores(const RemoteCandidatePair& pair) = 0;
  virtual void add_grad(const RemoteCandidatePair& pair, std::span<const double> d) = 0;
};

class NeuralRemoteScorer : public RemoteScorer {
 public:
  explicit NeuralRemoteScorer(nn::Session& session) : session_(session) {}
  const std::vector<double>& scores(const RemoteCandidatePair& pair) override {
    return session_.remote_scores(pair.child_span, pair.parent_span);
  }
  void add_grad(const RemoteCandidatePair& pair, std::span<const double> d) override {
    session_.add_remote_grad(pair.child_span, pair.parent_span, d);
  }

 private:
  nn::Session& session_;
};

// Gold label index per pair: the remote edge label when parent -> child is
// a gold remote edge, else NOT-PARENT.
std::vector<int> gold_pair_labels(const std::vector<RemoteCandidatePair>& pairs, const std::vector<Edge>& gold_remotes,
                                  const RemoteLabelVocab& vocab);

// Sum of per-pair cross-entropies; with accumulate set, softmax - onehot is
// pushed into the scorer.
double loss_remote(RemoteScorer& scorer, const std::vector<RemoteCandidatePair>& pairs,
                   const std::vector<Edge>& gold_remotes, const RemoteLabelVocab& vocab, bool accumulate = true);

// Remote edges for the argmax-labeled pairs, accepted in order of falling
// margin over NOT-PARENT; predictions duplicating a primary edge or closing
// a cycle are dropped.
std::vector<Edge> predict_remotes(RemoteScorer& scorer, const UccaGraph& graph,
                                  const std::vector<RemoteCandidatePair>& pairs, const RemoteLabelVocab& vocab);

}  // namespace ucca
