#pragma once

// Greedy top-down span parsing and its margin loss along the gold tree.
// Labels are "+"-joined unary chains; index 0 is the empty label, which
// builds structure without a node (implicit binarization).

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ucca/graph.hpp"
#include "ucca/nn/network.hpp"

namespace ucca {

inline constexpr int kEmptyLabel = 0;

class LabelVocab {
 public:
  // Holds the empty label and "ROOT".
  LabelVocab();
  explicit LabelVocab(const std::vector<std::string>& labels);

  int add(const std::string& label);
  // -1 when absent.
  int index(const std::string& label) const;
  const std::string& label(int index) const { return labels_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  // "ROOT" or "ROOT+..."; only these may label the whole sentence.
  bool is_root(int index) const;

  friend bool operator==(const LabelVocab&, const LabelVocab&) = default;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Every collapsed label of the tree, as the parser sees it.
std::vector<std::string> collapsed_labels(const ConstituentTree& tree);

struct TraceEntry {
  Span span;
  int label = kEmptyLabel;
  std::vector<int> splits;  // child boundaries strictly inside the span
  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// One entry per tree constituent after chain collapsing (bare leaves inside
// larger constituents get the empty label), in preorder.
struct GoldTrace {
  int n = 0;
  std::vector<TraceEntry> entries;
};

GoldTrace gold_trace(const ConstituentTree& tree, const LabelVocab& vocab);

// The gold decision at any span teacher forcing can reach: the entry itself,
// or for a binarization span the empty label and the enclosing entry's
// boundaries inside it.
TraceEntry gold_decision(const GoldTrace& trace, Span span);

class SpanScorer {
 public:
  virtual ~SpanScorer() = default;
  virtual int n() const = 0;
  virtual const std::vector<double>& label_scores(Span s) = 0;
  virtual double span_score(Span s) = 0;
  virtual void add_label_grad(Span s, int label, double d) = 0;
  virtual void add_span_grad(Span s, double d) = 0;
};

class NeuralSpanScorer : public SpanScorer {
 public:
  explicit NeuralSpanScorer(nn::Session& session) : session_(session) {}
  int n() const override { return session_.n(); }
  const std::vector<double>& label_scores(Span s) override { return session_.label_scores(s); }
  double span_score(Span s) override { return session_.span_score(s); }
  void add_label_grad(Span s, int label, double d) override;
  void add_span_grad(Span s, double d) override { session_.add_span_grad(s, d); }

 private:
  nn::Session& session_;
};

struct SpanDecision {
  Span span;
  int label = kEmptyLabel;
  std::optional<int> split;
};

struct ParseResult {
  ConstituentTree tree;
  std::vector<SpanDecision> decisions;  // preorder
};

// Tokens are copied into the tree; their count must equal scorer.n().
ParseResult parse_topdown(SpanScorer& scorer, const LabelVocab& vocab, const std::vector<Token>& tokens,
                          const std::string& lang = "");

// Sum of label and split hinge penalties along the teacher-forced gold
// path. With accumulate set, subgradients are pushed into the scorer.
double loss_topdown(SpanScorer& scorer, const GoldTrace& trace, const LabelVocab& vocab, bool accumulate = true);

}  // namespace ucca
