#include "ucca/span_parser.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "ucca/labels.hpp"

namespace ucca {

LabelVocab::LabelVocab() {
  add("");
  add(kRootLabel);
}

LabelVocab::LabelVocab(const std::vector<std::string>& labels) {
  if (labels.size() < 2 || !labels[0].empty() || labels[1] != kRootLabel) {
    throw std::invalid_argument("label vocabulary must start with the empty label and ROOT");
  }
  for (const auto& l : labels) {
    if (index_.count(l)) throw std::invalid_argument("duplicate label '" + l + "' in vocabulary");
    add(l);
  }
}

int LabelVocab::add(const std::string& label) {
  auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  int i = size();
  labels_.push_back(label);
  index_.emplace(label, i);
  return i;
}

int LabelVocab::index(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

bool LabelVocab::is_root(int i) const {
  const std::string& l = label(i);
  return l == kRootLabel || l.rfind(std::string(kRootLabel) + kChainSeparator, 0) == 0;
}

void NeuralSpanScorer::add_label_grad(Span s, int label, double d) {
  std::vector<double> g(session_.label_scores(s).size(), 0.0);
  g.at(static_cast<std::size_t>(label)) = d;
  session_.add_label_grad(s, g);
}

namespace {

// A constituent after chain collapsing: label plus the tree nodes that form
// its children.
struct Collapsed {
  std::string label;
  std::vector<int> children;
};

Collapsed collapse(const ConstituentTree& tree, int v) {
  Collapsed c{tree.nodes[static_cast<std::size_t>(v)].label, tree.nodes[static_cast<std::size_t>(v)].children};
  while (c.children.size() == 1 && !tree.nodes[static_cast<std::size_t>(c.children[0])].is_leaf()) {
    const TreeNode& only = tree.nodes[static_cast<std::size_t>(c.children[0])];
    c.label += kChainSeparator;
    c.label += only.label;
    c.children = only.children;
  }
  return c;
}

}  // namespace

std::vector<std::string> collapsed_labels(const ConstituentTree& tree) {
  std::vector<std::string> out;
  std::function<void(int)> walk = [&](int v) {
    if (tree.nodes[static_cast<std::size_t>(v)].is_leaf()) return;
    Collapsed c = collapse(tree, v);
    out.push_back(c.label);
    for (int k : c.children) walk(k);
  };
  if (!tree.nodes.empty()) walk(0);
  return out;
}

GoldTrace gold_trace(const ConstituentTree& tree, const LabelVocab& vocab) {
  auto problems = validate(tree);
  if (!problems.empty()) throw std::invalid_argument("gold_trace: invalid tree: " + problems.front());
  std::vector<Span> spans = node_spans(tree);
  GoldTrace trace;
  trace.n = tree.num_tokens();
  std::function<void(int)> walk = [&](int v) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(v)];
    if (node.is_leaf()) {
      trace.entries.push_back(TraceEntry{spans[static_cast<std::size_t>(v)], kEmptyLabel, {}});
      return;
    }
    Collapsed c = collapse(tree, v);
    int label = vocab.index(c.label);
    if (label < 0) throw std::invalid_argument("gold_trace: label '" + c.label + "' not in vocabulary");
    TraceEntry entry{spans[static_cast<std::size_t>(v)], label, {}};
    for (std::size_t k = 1; k < c.children.size(); ++k) {
      entry.splits.push_back(spans[static_cast<std::size_t>(c.children[k])].begin);
    }
    trace.entries.push_back(std::move(entry));
    // A labeled node over a single token wraps its leaf; the leaf span is
    // the node's own span and needs no separate entry.
    if (c.children.size() == 1) return;
    for (int k : c.children) walk(k);
  };
  walk(0);
  return trace;
}

TraceEntry gold_decision(const GoldTrace& trace, Span span) {
  const TraceEntry* enclosing = nullptr;
  for (const TraceEntry& e : trace.entries) {
    if (e.span == span) return e;
    if (e.span.begin <= span.begin && span.end <= e.span.end &&
        (!enclosing || enclosing->span.length() > e.span.length())) {
      enclosing = &e;
    }
  }
  if (!enclosing) throw std::invalid_argument("gold_decision: span outside the sentence");
  TraceEntry out{span, kEmptyLabel, {}};
  for (int k : enclosing->splits) {
    if (span.begin < k && k < span.end) out.splits.push_back(k);
  }
  bool aligned = std::find(enclosing->splits.begin(), enclosing->splits.end(), span.begin) != enclosing->splits.end() ||
                 span.begin == enclosing->span.begin;
  aligned = aligned && (std::find(enclosing->splits.begin(), enclosing->splits.end(), span.end) !=
                            enclosing->splits.end() ||
                        span.end == enclosing->span.end);
  if (!aligned) throw std::invalid_argument("gold_decision: span crosses gold constituents");
  return out;
}

namespace {

// Labels permitted at a span. The whole sentence takes a ROOT label (a
// non-empty chain when the sentence is one token and such labels exist);
// everything else takes a non-ROOT label or the empty label.
std::vector<int> allowed_labels(const LabelVocab& vocab, Span s, int n) {
  std::vector<int> out;
  const bool top = s.begin == 0 && s.end == n;
  for (int l = 0; l < vocab.size(); ++l) {
    if (top ? vocab.is_root(l) : !vocab.is_root(l)) out.push_back(l);
  }
  if (top && n == 1 && out.size() > 1) {
    std::erase_if(out, [&](int l) { return vocab.label(l) == kRootLabel; });
  }
  return out;
}

int best_label(const std::vector<double>& scores, const std::vector<int>& allowed, int skip = -1) {
  int best = -1;
  for (int l : allowed) {
    if (l == skip) continue;
    if (best < 0 || scores[static_cast<std::size_t>(l)] > scores[static_cast<std::size_t>(best)]) best = l;
  }
  return best;
}

double split_score(SpanScorer& scorer, Span s, int k) {
  return scorer.span_score(Span{s.begin, k}) + scorer.span_score(Span{k, s.end});
}

class TreeBuilder {
 public:
  TreeBuilder(SpanScorer& scorer, const LabelVocab& vocab, ParseResult& out)
      : scorer_(scorer), vocab_(vocab), out_(out), n_(scorer.n()) {}

  void run() {
    out_.tree.nodes.push_back(TreeNode{});  // root placeholder
    // The top label is always a ROOT chain, so the root collects everything.
    parse(Span{0, n_}, /*top=*/true);
  }

 private:
  int add_node(TreeNode node) {
    out_.tree.nodes.push_back(std::move(node));
    return static_cast<int>(out_.tree.nodes.size()) - 1;
  }

  // Returns the nodes this span contributes to its parent.
  std::vector<int> parse(Span s, bool top) {
    const std::vector<double>& scores = scorer_.label_scores(s);
    int label = best_label(scores, allowed_labels(vocab_, s, n_));
    SpanDecision decision{s, label, std::nullopt};
    std::size_t decision_index = out_.decisions.size();
    out_.decisions.push_back(decision);

    // Create the chain now so nodes come out in preorder.
    int innermost = -1;
    std::vector<int> result;
    if (label != kEmptyLabel) {
      auto chain = split_label_chain(vocab_.label(label));
      std::size_t first = 0;
      if (top) {
        out_.tree.nodes[0].label = chain[0];
        innermost = 0;
        first = 1;
      }
      for (std::size_t c = first; c < chain.size(); ++c) {
        int id = add_node(TreeNode{chain[c], 0, {}});
        if (innermost >= 0) {
          out_.tree.nodes[static_cast<std::size_t>(innermost)].children.push_back(id);
        } else {
          result.push_back(id);
        }
        innermost = id;
      }
    }

    std::vector<int> kids;
    if (s.length() == 1) {
      kids.push_back(add_node(TreeNode{"", s.end, {}}));
    } else {
      int best = -1;
      double best_score = 0.0;
      for (int k = s.begin + 1; k < s.end; ++k) {
        double v = split_score(scorer_, s, k);
        if (best < 0 || v > best_score) {
          best = k;
          best_score = v;
        }
      }
      out_.decisions[decision_index].split = best;
      for (int id : parse(Span{s.begin, best}, false)) kids.push_back(id);
      for (int id : parse(Span{best, s.end}, false)) kids.push_back(id);
    }

    if (innermost >= 0) {
      auto& children = out_.tree.nodes[static_cast<std::size_t>(innermost)].children;
      children.insert(children.end(), kids.begin(), kids.end());
      return result;
    }
    return kids;
  }

  SpanScorer& scorer_;
  const LabelVocab& vocab_;
  ParseResult& out_;
  int n_;
};

}  // namespace

ParseResult parse_topdown(SpanScorer& scorer, const LabelVocab& vocab, const std::vector<Token>& tokens,
                          const std::string& lang) {
  if (scorer.n() < 1) throw std::invalid_argument("parse_topdown: empty sentence");
  if (static_cast<int>(tokens.size()) != scorer.n()) throw std::invalid_argument("parse_topdown: token count mismatch");
  ParseResult out;
  out.tree.tokens = tokens;
  out.tree.lang = lang;
  TreeBuilder(scorer, vocab, out).run();
  return out;
}

double loss_topdown(SpanScorer& scorer, const GoldTrace& trace, const LabelVocab& vocab, bool accumulate) {
  const int n = trace.n;
  if (scorer.n() != n) throw std::invalid_argument("loss_topdown: trace and scorer lengths differ");
  std::unordered_map<Span, const TraceEntry*> by_span;
  for (const TraceEntry& e : trace.entries) by_span.emplace(e.span, &e);

  double total = 0.0;
  std::function<void(Span, const TraceEntry*)> visit = [&](Span s, const TraceEntry* enclosing) {
    TraceEntry gold;
    auto it = by_span.find(s);
    if (it != by_span.end()) {
      gold = *it->second;
      enclosing = it->second;
    } else {
      gold = TraceEntry{s, kEmptyLabel, {}};
      for (int k : enclosing->splits) {
        if (s.begin < k && k < s.end) gold.splits.push_back(k);
      }
    }

    const std::vector<double>& scores = scorer.label_scores(s);
    int wrong = best_label(scores, allowed_labels(vocab, s, n), gold.label);
    if (wrong >= 0) {
      double margin = 1.0 + scores[static_cast<std::size_t>(wrong)] - scores[static_cast<std::size_t>(gold.label)];
      if (margin > 0) {
        total += margin;
        if (accumulate) {
          scorer.add_label_grad(s, wrong, 1.0);
          scorer.add_label_grad(s, gold.label, -1.0);
        }
      }
    }
    if (s.length() == 1) return;
    if (gold.splits.empty()) throw std::logic_error("loss_topdown: no gold split inside a span of length > 1");

    int best_gold = -1, best_wrong = -1;
    double gold_score = 0.0, wrong_score = 0.0;
    for (int k = s.begin + 1; k < s.end; ++k) {
      double v = split_score(scorer, s, k);
      bool is_gold = std::find(gold.splits.begin(), gold.splits.end(), k) != gold.splits.end();
      if (is_gold && (best_gold < 0 || v > gold_score)) {
        best_gold = k;
        gold_score = v;
      }
      if (!is_gold && (best_wrong < 0 || v > wrong_score)) {
        best_wrong = k;
        wrong_score = v;
      }
    }
    if (best_wrong >= 0) {
      double margin = 1.0 + wrong_score - gold_score;
      if (margin > 0) {
        total += margin;
        if (accumulate) {
          scorer.add_span_grad(Span{s.begin, best_wrong}, 1.0);
          scorer.add_span_grad(Span{best_wrong, s.end}, 1.0);
          scorer.add_span_grad(Span{s.begin, best_gold}, -1.0);
          scorer.add_span_grad(Span{best_gold, s.end}, -1.0);
        }
      }
    }
    visit(Span{s.begin, best_gold}, enclosing);
    visit(Span{best_gold, s.end}, enclosing);
  };
  visit(Span{0, n}, nullptr);
  return total;
}

}  // namespace ucca
