#include "gtest/gtest.h"

#include <cmath>

#include "gradcheck.hpp"
#include "ucca/kernels.hpp"
#include "ucca/nn/network.hpp"
#include "ucca/nn/optimizer.hpp"

using namespace ucca;
using namespace ucca::nn;

namespace {

NetworkConfig tiny_config() {
  NetworkConfig c;
  c.word_dim = 3;
  c.pos_dim = 2;
  c.ner_dim = 2;
  c.dep_dim = 2;
  c.lstm_dim = 3;
  c.mlp_dim = 4;
  c.remote_dim = 3;
  return c;
}

NetworkSizes tiny_sizes() {
  NetworkSizes s;
  s.words = 5;
  s.pos = 3;
  s.ner = 2;
  s.dep = 2;
  s.languages = 3;
  s.tree_labels = 4;
  s.remote_labels = 2;
  return s;
}

SentenceInput sentence(std::vector<int> words) {
  SentenceInput in;
  for (int w : words) in.tokens.push_back(TokenFeatures{w, 1, 0, 1, 0});
  return in;
}

void zero_all(Network& net) {
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    auto& v = net.params()[i].value;
    std::fill(v.begin(), v.end(), 0.0);
  }
}

}  // namespace

TEST(EmbedTest, ZeroTablesGiveZeroVectors) {
  Network net(tiny_config(), tiny_sizes(), 1);
  zero_all(net);
  auto xs = net.embed(sentence({1, 2}));
  ASSERT_EQ(xs.size(), 2u);
  EXPECT_EQ(xs[0], Vec(9, 0.0));
}

TEST(EmbedTest, MultilingualAddsFiftyDims) {
  NetworkConfig c = tiny_config();
  Network mono(c, tiny_sizes(), 1);
  c.multilingual = true;
  c.lang_dim = 50;
  Network multi(c, tiny_sizes(), 1);
  EXPECT_EQ(multi.input_dim() - mono.input_dim(), 50);
  EXPECT_EQ(multi.embed(sentence({1}))[0].size(), mono.embed(sentence({1}))[0].size() + 50);
}

TEST(EmbedTest, UnknownWordDiffersOnlyInWordSlice) {
  Network net(tiny_config(), tiny_sizes(), 7);
  auto known = net.embed(sentence({3}))[0];
  auto unk = net.embed(sentence({0}))[0];
  for (std::size_t i = 0; i < known.size(); ++i) {
    if (i < 3) {
      EXPECT_NE(known[i], unk[i]);
    } else {
      EXPECT_EQ(known[i], unk[i]);
    }
  }
}

TEST(EmbedTest, ExternalWidthMismatch) {
  NetworkConfig c = tiny_config();
  c.external_dim = 2;
  Network net(c, tiny_sizes(), 1);
  SentenceInput in = sentence({1, 2});
  in.external = {{1.0, 2.0}, {3.0}};
  EXPECT_THROW(net.embed(in), std::invalid_argument);
  in.external = {{1.0, 2.0}};
  EXPECT_THROW(net.embed(in), std::invalid_argument);
  in.external = {{1.0, 2.0}, {3.0, 4.0}};
  auto xs = net.embed(in);
  EXPECT_EQ(xs[1][9], 3.0);
}

TEST(EncodeTest, ZeroWeightsGiveZeroOutputs) {
  Network net(tiny_config(), tiny_sizes(), 1);
  zero_all(net);
  Session s(net, sentence({1, 2, 3}));
  for (const Vec& v : s.encoding().f) EXPECT_EQ(v, Vec(3, 0.0));
  for (const Vec& v : s.encoding().b) EXPECT_EQ(v, Vec(3, 0.0));
}

TEST(EncodeTest, SingleTokenHasTwoFenceposts) {
  Network net(tiny_config(), tiny_sizes(), 1);
  Session s(net, sentence({1}));
  EXPECT_EQ(s.encoding().f.size(), 2u);
  EXPECT_EQ(s.encoding().b.size(), 2u);
  EXPECT_EQ(s.encoding().f[0], Vec(3, 0.0));
  EXPECT_EQ(s.encoding().b[1], Vec(3, 0.0));
}

TEST(EncodeTest, Deterministic) {
  Network net(tiny_config(), tiny_sizes(), 3);
  Session a(net, sentence({1, 4, 2}));
  Session b(net, sentence({1, 4, 2}));
  EXPECT_EQ(a.encoding().f, b.encoding().f);
  EXPECT_EQ(a.encoding().b, b.encoding().b);
}

TEST(EncodeTest, ScalarAndSimdKernelsAgree) {
  if (!kernels::avx2_kernels()) GTEST_SKIP();
  Network net(tiny_config(), tiny_sizes(), 3);
  const char* before = kernels::active().name;
  kernels::select("scalar");
  Session a(net, sentence({1, 4, 2, 3}));
  kernels::select("avx2");
  Session b(net, sentence({1, 4, 2, 3}));
  kernels::select(before);
  for (std::size_t i = 0; i < a.encoding().f.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a.encoding().f[i][k], b.encoding().f[i][k], 1e-13);
  }
}

TEST(SpanReprTest, ConstantEncodingIsZero) {
  Encoding enc;
  enc.f.assign(4, Vec{1.0, 2.0});
  enc.b.assign(4, Vec{-3.0, 0.5});
  EXPECT_EQ(span_repr(enc, 0, 3), Vec(4, 0.0));
  EXPECT_THROW(span_repr(enc, 2, 2), std::invalid_argument);
  EXPECT_THROW(span_repr(enc, 0, 4), std::invalid_argument);
}

TEST(SpanReprTest, ExactFormulaAndTelescoping) {
  Network net(tiny_config(), tiny_sizes(), 5);
  Session s(net, sentence({1, 2, 3, 4}));
  const Encoding& enc = s.encoding();
  Vec r = span_repr(enc, 1, 3);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(r[k], enc.f[3][k] - enc.f[1][k]);
    EXPECT_EQ(r[3 + k], enc.b[1][k] - enc.b[3][k]);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 2; j <= 4; ++j) {
      for (int m = i + 1; m < j; ++m) {
        Vec whole = span_repr(enc, i, j), left = span_repr(enc, i, m), right = span_repr(enc, m, j);
        for (std::size_t k = 0; k < whole.size(); ++k) EXPECT_NEAR(whole[k], left[k] + right[k], 1e-15);
      }
    }
  }
}

TEST(BiaffineTest, HandExample) {
  // d_c = d_p = 1, two labels; W[:,0,:] = [[1],[0]], W[:,1,:] = [[0],[1]].
  Parameter W{"W", {2, 2, 1}, {1, 0, 0, 1}, {0, 0, 0, 0}, false};
  BiaffineCache cache;
  biaffine_forward(W, Vec{2.0}, Vec{3.0}, cache);
  EXPECT_EQ(cache.out, (Vec{6.0, 3.0}));
}

TEST(BiaffineTest, ZeroAndLinearity) {
  std::mt19937_64 rng(4);
  Parameter W{"W", {4, 3, 2}, Vec(24, 0.0), Vec(24, 0.0), false};
  BiaffineCache cache;
  biaffine_forward(W, Vec{1, 2, 3}, Vec{4, 5}, cache);
  EXPECT_EQ(cache.out, Vec(3, 0.0));
  init_uniform(W, -1, 1, rng);
  BiaffineCache once, twice;
  biaffine_forward(W, Vec{1, -2, 0.5}, Vec{0.3, 0.7}, once);
  biaffine_forward(W, Vec{1, -2, 0.5}, Vec{0.6, 1.4}, twice);
  for (int l = 0; l < 3; ++l) EXPECT_NEAR(twice.out[l], 2 * once.out[l], 1e-14);
}

TEST(BiaffineTest, SingleLabelWithZeroBiasRowIsInnerProduct) {
  // W[a,0,b] = M[a][b]; bias row a = d_c zeroed; s = c^T M p.
  Parameter W{"W", {3, 1, 2}, {1, 2, 3, 4, 0, 0}, Vec(6, 0.0), false};
  BiaffineCache cache;
  biaffine_forward(W, Vec{1, -1}, Vec{2, 1}, cache);
  // c^T M = [1-3, 2-4] = [-2, -2]; dot p = -6.
  EXPECT_EQ(cache.out, Vec{-6.0});
  Parameter bad{"bad", {2, 1, 2}, Vec(4, 0.0), Vec(4, 0.0), false};
  EXPECT_THROW(biaffine_forward(bad, Vec{1, -1}, Vec{2, 1}, cache), std::invalid_argument);
}

TEST(MlpTest, ZeroWeightsGiveZeroScores) {
  Network net(tiny_config(), tiny_sizes(), 2);
  zero_all(net);
  Session s(net, sentence({1, 2}));
  EXPECT_EQ(s.label_scores({0, 2}), Vec(4, 0.0));
  EXPECT_EQ(s.span_score({0, 1}), 0.0);
}

TEST(MlpTest, LabelArgmaxInvariantToBiasShift) {
  Network net(tiny_config(), tiny_sizes(), 2);
  auto argmax = [](const Vec& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
  Vec before;
  {
    Session s(net, sentence({1, 2, 3}));
    before = s.label_scores({0, 2});
  }
  for (double& b : net.params().at("label_b2").value) b += 3.25;
  Session s(net, sentence({1, 2, 3}));
  EXPECT_EQ(argmax(s.label_scores({0, 2})), argmax(before));
}

TEST(GradientTest, TwentyRandomConfigurations) {
  for (int index = 0; index < 20; ++index) {
    fixtures::PreparedCheck check = fixtures::prepare_check(index);
    Network& net = *check.net;
    auto checks = fixtures::check_gradients(
        net, [&](bool backward) { return fixtures::probe_loss(net, check.setup.input, check.probe, backward); });
    for (const auto& c : checks) EXPECT_LT(c.rel_error, 1e-4) << "config " << index << " tensor " << c.name;
  }
}

TEST(GradientTest, FrozenPretrainedGetsNoGradient) {
  NetworkConfig c = tiny_config();
  c.pretrained_dim = 2;
  c.freeze_pretrained = true;
  NetworkSizes s = tiny_sizes();
  s.pretrained = 4;
  Network net(c, s, 9);
  init_uniform(net.params().at("E_pre"), -1, 1, *std::make_unique<Rng>(1));
  SentenceInput in = sentence({1, 2});
  in.tokens[0].pretrained = 2;
  Session session(net, in);
  session.add_label_grad({0, 2}, Vec(4, 1.0));
  session.backward();
  for (double g : net.params().at("E_pre").grad) EXPECT_EQ(g, 0.0);
  double word_grad = 0;
  for (double g : net.params().at("E_word").grad) word_grad += std::abs(g);
  EXPECT_GT(word_grad, 0.0);
}

TEST(OptimizerTest, SgdZeroGradIsNoop) {
  Network net(tiny_config(), tiny_sizes(), 1);
  auto before = net.params().at("label_W1").value;
  Sgd sgd(0.5);
  sgd.step(net.params());
  EXPECT_EQ(net.params().at("label_W1").value, before);
}

TEST(OptimizerTest, SgdUnitRateSubtractsGradient) {
  ParameterSet set;
  Parameter& p = set.add("p", {3});
  p.value = {1.0, 2.0, 3.0};
  p.grad = {0.5, -1.0, 0.25};
  Sgd(1.0).step(set);
  EXPECT_EQ(p.value, (Vec{0.5, 3.0, 2.75}));
}

TEST(OptimizerTest, AdamFirstStepClosedForm) {
  ParameterSet set;
  Parameter& p = set.add("p", {5});
  p.value = {1, 1, 1, 1, 1};
  p.grad = {0.5, -2.0, 1e-3, 3.0, -0.1};
  AdamHyper h;
  h.learning_rate = 0.01;
  Adam adam(h);
  adam.step(set);
  for (std::size_t i = 0; i < 5; ++i) {
    double g = p.grad[i];
    // m_hat = g, v_hat = g^2 at t = 1.
    double expected = 1.0 - h.learning_rate * g / (std::abs(g) + h.epsilon);
    EXPECT_NEAR(p.value[i], expected, 1e-15);
  }
}

TEST(OptimizerTest, NonFiniteGradientAborts) {
  ParameterSet set;
  Parameter& p = set.add("weights", {2});
  p.grad = {1.0, std::nan("")};
  try {
    Sgd(0.1).step(set);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("weights"), std::string::npos);
  }
  EXPECT_EQ(p.value, (Vec{0.0, 0.0}));
  EXPECT_THROW(make_optimizer("rmsprop", 0.1), std::invalid_argument);
}
