#pragma once

// The shared encoder and the scoring heads. A Session runs the encoder for
// one sentence, lazily evaluates heads on demand, collects loss gradients
// on whatever it evaluated, and backpropagates them in one pass.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ucca/graph.hpp"
#include "ucca/nn/layers.hpp"
#include "ucca/nn/parameter.hpp"

namespace ucca::nn {

struct NetworkConfig {
  int word_dim = 100;
  int pos_dim = 50;
  int ner_dim = 50;
  int dep_dim = 50;
  int lang_dim = 50;
  int lstm_dim = 250;  // per direction per layer
  int mlp_dim = 250;
  int remote_dim = 100;
  bool multilingual = false;
  bool share_mlp_hidden = false;  // label and split heads share one hidden layer
  int pretrained_dim = 0;         // 0: no pretrained table
  bool freeze_pretrained = true;
  int external_dim = 0;           // 0: no external features
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Row counts; every lookup table reserves row 0 for unknown entries.
struct NetworkSizes {
  int words = 1;
  int pos = 1;
  int ner = 1;
  int dep = 1;
  int pretrained = 1;
  int languages = 1;
  int tree_labels = 2;    // includes the empty label at 0
  int remote_labels = 1;  // includes NOT-PARENT at 0
  friend bool operator==(const NetworkSizes&, const NetworkSizes&) = default;
};

struct TokenFeatures {
  int word = 0;
  int pos = 0;
  int ner = 0;
  int dep = 0;
  int pretrained = 0;
};

struct SentenceInput {
  std::vector<TokenFeatures> tokens;
  int lang = 0;
  std::vector<Vec> external;  // empty, or one vector per token
};

// f[0..n] and b[0..n] over fenceposts.
struct Encoding {
  std::vector<Vec> f;
  std::vector<Vec> b;
  int n() const { return static_cast<int>(f.size()) - 1; }
};

Vec span_repr(const Encoding& enc, int i, int j);

class Network {
 public:
  // Parameters are initialized from seed; a pretrained table starts at zero
  // until the caller loads it.
  Network(const NetworkConfig& config, const NetworkSizes& sizes, std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }
  const NetworkSizes& sizes() const { return sizes_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  int input_dim() const;
  int encoding_dim() const { return config_.lstm_dim; }

  std::vector<Vec> embed(const SentenceInput& input) const;

 private:
  void build(std::uint64_t seed);

  NetworkConfig config_;
  NetworkSizes sizes_;
  ParameterSet params_;
};

class Session {
 public:
  Session(const Network& net, const SentenceInput& input);
  // Only sessions over a mutable network can backpropagate.
  Session(Network& net, const SentenceInput& input);

  int n() const { return encoding_.n(); }
  const Encoding& encoding() const { return encoding_; }
  const std::vector<Vec>& inputs() const { return x_; }

  const Vec& label_scores(Span s);
  double span_score(Span s);
  const Vec& remote_scores(Span child, Span parent);

  void add_label_grad(Span s, std::span<const double> d);
  void add_span_grad(Span s, double d);
  void add_remote_grad(Span child, Span parent, std::span<const double> d);

  // Pushes the collected gradients into the network's parameter gradients.
  void backward();

 private:
  struct SpanEntry {
    Vec repr;
    bool has_label = false;
    bool has_span = false;
    MlpCache label;
    MlpCache span;
    Vec dlabel;
    double dspan = 0.0;
  };
  struct RemoteEntry {
    Vec act;
    Vec dact;
  };
  struct PairEntry {
    BiaffineCache cache;
    Vec dout;
  };

  void encode();
  SpanEntry& entry(Span s);
  RemoteEntry& remote_entry(std::map<Span, RemoteEntry>& table, Span s, const char* prefix);
  void add_repr_grad(Span s, std::span<const double> d);

  const Network* net_;
  Network* mutable_net_ = nullptr;
  SentenceInput input_;
  std::vector<Vec> x_;
  std::vector<Vec> z_;  // layer-2 inputs
  LstmTrace l1f_, l1b_, l2f_, l2b_;
  Encoding encoding_;
  std::map<Span, SpanEntry> spans_;
  std::map<Span, RemoteEntry> children_;
  std::map<Span, RemoteEntry> parents_;
  std::map<std::pair<Span, Span>, PairEntry> pairs_;
  std::vector<Vec> df_, db_;
};

}  // namespace ucca::nn
