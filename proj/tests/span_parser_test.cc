#include "gtest/gtest.h"

#include <map>
#include <random>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "ucca/io.hpp"
#include "ucca/nn/optimizer.hpp"
#include "ucca/span_parser.hpp"

using namespace ucca;

namespace {

// Scores from tables (zero when absent); records every gradient pushed.
class TableScorer : public SpanScorer {
 public:
  TableScorer(int n, int labels) : n_(n), labels_(labels) {}
  int n() const override { return n_; }
  const std::vector<double>& label_scores(Span s) override {
    auto it = label_.find(s);
    if (it == label_.end()) it = label_.emplace(s, std::vector<double>(static_cast<std::size_t>(labels_), 0.0)).first;
    return it->second;
  }
  double span_score(Span s) override {
    auto it = span_.find(s);
    return it == span_.end() ? 0.0 : it->second;
  }
  void add_label_grad(Span s, int label, double d) override { label_grad[{s, label}] += d; }
  void add_span_grad(Span s, double d) override { span_grad[s] += d; }

  std::map<Span, std::vector<double>> label_;
  std::map<Span, double> span_;
  std::map<std::pair<Span, int>, double> label_grad;
  std::map<Span, double> span_grad;

 private:
  int n_;
  int labels_;
};

std::vector<Token> tokens(int n) {
  std::vector<Token> out;
  for (int i = 1; i <= n; ++i) out.push_back(Token{"w" + std::to_string(i), "", "", "", ""});
  return out;
}

LabelVocab vocab_for(const std::vector<ConstituentTree>& trees, const std::vector<std::string>& extra = {}) {
  LabelVocab v;
  for (const auto& t : trees) {
    for (const auto& l : collapsed_labels(t)) v.add(l);
  }
  for (const auto& l : extra) v.add(l);
  return v;
}

// Rigs a scorer so the gold decisions of `tree` win by exactly `margin`:
// gold label scores margin, every split through gold-aligned halves scores
// margin per half, crossing halves -margin.
TableScorer oracle_scorer(const ConstituentTree& tree, const LabelVocab& vocab, double margin = 1.0) {
  GoldTrace trace = gold_trace(tree, vocab);
  int n = tree.num_tokens();
  TableScorer scorer(n, vocab.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      Span s{i, j};
      bool aligned = true;
      TraceEntry gold;
      try {
        gold = gold_decision(trace, s);
      } catch (const std::invalid_argument&) {
        aligned = false;
      }
      scorer.span_[s] = aligned ? margin : -margin;
      std::vector<double> labels(static_cast<std::size_t>(vocab.size()), 0.0);
      if (aligned) labels[static_cast<std::size_t>(gold.label)] = margin;
      scorer.label_[s] = labels;
    }
  }
  return scorer;
}

// Random n-ary tree without unary chains; labels drawn from `alphabet`.
ConstituentTree random_tree(std::mt19937_64& rng, int n, const std::vector<std::string>& alphabet) {
  ConstituentTree tree;
  tree.tokens = tokens(n);
  tree.nodes.push_back(TreeNode{kRootLabel, 0, {}});
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::function<void(int, int, int)> build = [&](int node, int begin, int end) {
    int len = end - begin;
    int parts = len == 1 ? 1 : pick(2, std::min(len, 4));
    std::vector<int> cuts{begin};
    std::vector<int> inner;
    for (int k = begin + 1; k < end; ++k) inner.push_back(k);
    std::shuffle(inner.begin(), inner.end(), rng);
    inner.resize(static_cast<std::size_t>(parts - 1));
    std::sort(inner.begin(), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(end);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      int b = cuts[c], e = cuts[c + 1];
      bool bare = e - b == 1 && parts > 1 && pick(0, 2) == 0;
      if (bare) {
        tree.nodes.push_back(TreeNode{"", e, {}});
        tree.nodes[static_cast<std::size_t>(node)].children.push_back(static_cast<int>(tree.nodes.size()) - 1);
        continue;
      }
      tree.nodes.push_back(TreeNode{alphabet[static_cast<std::size_t>(pick(0, static_cast<int>(alphabet.size()) - 1))], 0, {}});
      int id = static_cast<int>(tree.nodes.size()) - 1;
      tree.nodes[static_cast<std::size_t>(node)].children.push_back(id);
      if (e - b == 1) {
        tree.nodes.push_back(TreeNode{"", e, {}});
        tree.nodes[static_cast<std::size_t>(id)].children.push_back(static_cast<int>(tree.nodes.size()) - 1);
      } else {
        build(id, b, e);
      }
    }
  };
  build(0, 0, n);
  return tree;
}

const std::vector<std::string> kAlphabet{"A", "B", "C", "D-remote", "E-ancestor1"};

}  // namespace

TEST(LabelVocabTest, Basics) {
  LabelVocab v;
  EXPECT_EQ(v.size(), 2);
  EXPECT_EQ(v.index(""), kEmptyLabel);
  EXPECT_TRUE(v.is_root(v.index("ROOT")));
  int h = v.add("ROOT+H");
  EXPECT_TRUE(v.is_root(h));
  EXPECT_FALSE(v.is_root(v.add("H+A")));
  EXPECT_EQ(v.add("ROOT+H"), h);
  EXPECT_EQ(LabelVocab(v.labels()), v);
  EXPECT_THROW(LabelVocab({"A"}), std::invalid_argument);
}

TEST(GoldTraceTest, BinaryNodeSplit) {
  auto tree = tree_from_sexpr("(ROOT (A w1 w2) (B w3 w4))");
  auto vocab = vocab_for({tree});
  auto trace = gold_trace(tree, vocab);
  EXPECT_EQ(trace.entries[0], (TraceEntry{{0, 4}, vocab.index("ROOT"), {2}}));
  EXPECT_EQ(trace.entries[1], (TraceEntry{{0, 2}, vocab.index("A"), {1}}));
}

TEST(GoldTraceTest, TernaryNodeSplits) {
  auto tree = tree_from_sexpr("(ROOT (A w1 w2) (B w3 w4 w5) (C w6 w7))");
  auto trace = gold_trace(tree, vocab_for({tree}));
  EXPECT_EQ(trace.entries[0].span, (Span{0, 7}));
  EXPECT_EQ(trace.entries[0].splits, (std::vector<int>{2, 5}));
  // Binarization span over A and B: empty label, boundary 2 only.
  auto binarized = gold_decision(trace, Span{0, 5});
  EXPECT_EQ(binarized.label, kEmptyLabel);
  EXPECT_EQ(binarized.splits, (std::vector<int>{2}));
  EXPECT_THROW(gold_decision(trace, Span{1, 5}), std::invalid_argument);
}

TEST(GoldTraceTest, FigureTwoTopSpan) {
  auto tree = tree_from_sexpr(fixtures::kFigure2);
  auto vocab = vocab_for({tree});
  auto trace = gold_trace(tree, vocab);
  EXPECT_EQ(vocab.label(trace.entries[0].label), "ROOT+H");
  EXPECT_EQ(trace.entries[0].splits.size(), 4u);
  EXPECT_EQ(trace.entries[0].splits, (std::vector<int>{1, 4, 5, 6}));
  // Bare leaf "ging" inside P.
  EXPECT_EQ(gold_decision(trace, Span{2, 3}).label, kEmptyLabel);
  EXPECT_EQ(vocab.label(gold_decision(trace, Span{2, 4}).label), "P");
}

TEST(GoldTraceTest, ChainsCollapse) {
  auto tree = tree_from_sexpr("(ROOT (H (A (C w1)) w2))");
  auto vocab = vocab_for({tree});
  auto trace = gold_trace(tree, vocab);
  EXPECT_EQ(vocab.label(trace.entries[1].label), "A+C");
  EXPECT_EQ(collapsed_labels(tree), (std::vector<std::string>{"ROOT+H", "A+C"}));
}

TEST(ParseTopdownTest, SingleToken) {
  LabelVocab vocab;
  vocab.add("ROOT+H");
  TableScorer scorer(1, vocab.size());
  auto result = parse_topdown(scorer, vocab, tokens(1));
  EXPECT_EQ(tree_to_sexpr(result.tree), "(ROOT (H w1))");
  ASSERT_EQ(result.decisions.size(), 1u);
  EXPECT_FALSE(result.decisions[0].split.has_value());
}

TEST(ParseTopdownTest, EmptyNeverAtTop) {
  LabelVocab vocab;
  vocab.add("A");
  TableScorer scorer(2, vocab.size());
  scorer.label_[{0, 2}] = {100.0, -5.0, 50.0};
  auto result = parse_topdown(scorer, vocab, tokens(2));
  EXPECT_EQ(result.tree.nodes[0].label, "ROOT");
  EXPECT_EQ(tree_to_sexpr(result.tree), "(ROOT w1 w2)");
}

TEST(ParseTopdownTest, RiggedScoresGiveFigureTwo) {
  auto gold = tree_from_sexpr(fixtures::kFigure2);
  auto vocab = vocab_for({gold}, {"X", "Y+Z", "ROOT+Q"});
  auto scorer = oracle_scorer(gold, vocab);
  auto result = parse_topdown(scorer, vocab, gold.tokens);
  EXPECT_EQ(tree_to_sexpr(result.tree), fixtures::kFigure2);
  EXPECT_EQ(loss_topdown(scorer, gold_trace(gold, vocab), vocab), 0.0);
  EXPECT_TRUE(scorer.label_grad.empty());
  EXPECT_TRUE(scorer.span_grad.empty());
}

TEST(ParseTopdownTest, TiesGoToSmallestIndexAndSplit) {
  LabelVocab vocab;
  vocab.add("A");
  vocab.add("B");
  TableScorer scorer(3, vocab.size());
  auto result = parse_topdown(scorer, vocab, tokens(3));
  // All zero: empty label below the top, leftmost splits.
  EXPECT_EQ(result.decisions[0].split, 1);
  EXPECT_EQ(result.decisions[2].split, 2);
  EXPECT_EQ(tree_to_sexpr(result.tree), "(ROOT w1 w2 w3)");
}

TEST(ParseTopdownTest, RandomScoresAlwaysGiveValidTrees) {
  std::mt19937_64 rng(11);
  LabelVocab vocab;
  for (const char* l : {"A", "B+C", "ROOT+A", "ROOT+B+C", "D-remote"}) vocab.add(l);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 15;
    TableScorer scorer(n, vocab.size());
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        std::vector<double> labels(static_cast<std::size_t>(vocab.size()));
        for (double& x : labels) x = noise(rng);
        scorer.label_[{i, j}] = labels;
        scorer.span_[{i, j}] = noise(rng);
      }
    }
    auto tree = parse_topdown(scorer, vocab, tokens(n)).tree;
    EXPECT_TRUE(validate(tree).empty()) << tree_to_sexpr(tree);
  }
}

TEST(LossTopdownTest, SingleLabelHingeIsOne) {
  LabelVocab vocab;
  int h = vocab.add("ROOT+H");
  int a = vocab.add("ROOT+A");
  auto gold = tree_from_sexpr("(ROOT (H w1))");
  TableScorer scorer(1, vocab.size());
  EXPECT_EQ(loss_topdown(scorer, gold_trace(gold, vocab), vocab), 1.0);
  EXPECT_EQ((scorer.label_grad[{Span{0, 1}, a}]), 1.0);
  EXPECT_EQ((scorer.label_grad[{Span{0, 1}, h}]), -1.0);
}

TEST(LossTopdownTest, SplitHinge) {
  auto gold = tree_from_sexpr("(ROOT (A w1) (B w2 w3))");
  auto vocab = vocab_for({gold});
  auto scorer = oracle_scorer(gold, vocab);
  // Make split 2 beat the gold split 1 by 0.5: penalty 1.5.
  scorer.span_[{0, 2}] = 1.0;
  scorer.span_[{2, 3}] = 1.5;
  EXPECT_DOUBLE_EQ(loss_topdown(scorer, gold_trace(gold, vocab), vocab, false), 1.5);
}

TEST(LossTopdownTest, ShiftInvariance) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto gold = random_tree(rng, 2 + trial % 8, kAlphabet);
    auto vocab = vocab_for({gold});
    auto scorer = oracle_scorer(gold, vocab, 0.3);
    for (auto& [span, labels] : scorer.label_) {
      for (double& x : labels) x += noise(rng);
    }
    auto shifted = scorer;
    for (auto& [span, labels] : shifted.label_) {
      double c = 10 * noise(rng);
      for (double& x : labels) x += c;
    }
    auto trace = gold_trace(gold, vocab);
    EXPECT_NEAR(loss_topdown(scorer, trace, vocab, false), loss_topdown(shifted, trace, vocab, false), 1e-9);
    EXPECT_EQ(parse_topdown(scorer, vocab, gold.tokens).tree, parse_topdown(shifted, vocab, gold.tokens).tree);
  }
}

TEST(LossTopdownTest, ZeroLossImpliesGoldParse) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.35);
  int zero_cases = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto gold = random_tree(rng, 1 + trial % 10, kAlphabet);
    auto vocab = vocab_for({gold}, {"ROOT+A", "B"});
    auto scorer = oracle_scorer(gold, vocab, 1.5);
    for (auto& [span, labels] : scorer.label_) {
      for (double& x : labels) x += noise(rng);
    }
    for (auto& [span, v] : scorer.span_) v += noise(rng);
    auto trace = gold_trace(gold, vocab);
    double loss = loss_topdown(scorer, trace, vocab, false);
    EXPECT_GE(loss, 0.0);
    if (loss == 0.0) {
      ++zero_cases;
      auto parsed = parse_topdown(scorer, vocab, gold.tokens).tree;
      EXPECT_EQ(gold_trace(parsed, vocab).entries, trace.entries) << tree_to_sexpr(gold);
    }
  }
  EXPECT_GT(zero_cases, 20);
}

namespace {

struct NeuralFixture {
  ConstituentTree gold = tree_from_sexpr(fixtures::kFigure2);
  LabelVocab vocab = vocab_for({gold});
  nn::SentenceInput input;
  std::unique_ptr<nn::Network> net;

  NeuralFixture() {
    nn::NetworkConfig config;
    config.word_dim = 8;
    config.pos_dim = config.ner_dim = config.dep_dim = 2;
    config.lstm_dim = 8;
    config.mlp_dim = 8;
    config.remote_dim = 4;
    nn::NetworkSizes sizes;
    sizes.words = 8;
    sizes.tree_labels = vocab.size();
    net = std::make_unique<nn::Network>(config, sizes, 3);
    fixtures::spread_embeddings(*net, 4);
    for (int t = 0; t < 7; ++t) input.tokens.push_back(nn::TokenFeatures{t + 1, 0, 0, 0, 0});
  }

  double loss(bool backward) {
    nn::Session session(*net, input);
    NeuralSpanScorer scorer(session);
    double l = loss_topdown(scorer, gold_trace(gold, vocab), vocab, backward);
    if (backward) session.backward();
    return l;
  }
};

}  // namespace

TEST(LossTopdownTest, GradientMatchesFiniteDifferences) {
  NeuralFixture fx;
  auto checks = fixtures::check_gradients(*fx.net, [&](bool backward) { return fx.loss(backward); });
  for (const auto& c : checks) EXPECT_LT(c.rel_error, 1e-4) << c.name;
}

// Teacher forcing follows the best-scoring gold split, so the visited path
// (and the loss) can jump when that choice flips; the trend is what counts.
TEST(LossTopdownTest, NeuralLossFallsOnOneSentence) {
  NeuralFixture fx;
  nn::Adam adam(nn::AdamHyper{0.01});
  std::vector<double> losses;
  for (int step = 0; step < 50; ++step) {
    fx.net->params().zero_grad();
    losses.push_back(fx.loss(true));
    adam.step(fx.net->params());
  }
  auto mean = [&](std::size_t from, std::size_t to) {
    double s = 0;
    for (std::size_t i = from; i < to; ++i) s += losses[i];
    return s / static_cast<double>(to - from);
  };
  for (double l : losses) EXPECT_GE(l, 0.0);
  EXPECT_LT(mean(40, 50), mean(30, 40));
  EXPECT_LT(mean(30, 40), mean(20, 30));
  EXPECT_LT(losses.back(), 0.8 * losses.front());
}
