#include "ucca/nn/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ucca/kernels.hpp"

namespace ucca::nn {

namespace k = ucca::kernels;

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::string lstm_name(int layer, bool forward, const char* what) {
  return "lstm" + std::to_string(layer) + (forward ? "_fwd_" : "_bwd_") + what;
}

void append_row(Vec& x, const Parameter& table, int row) {
  if (row < 0 || sz(row) >= table.rows()) throw std::out_of_range("embedding row out of range in " + table.name);
  auto r = table.row(sz(row));
  x.insert(x.end(), r.begin(), r.end());
}

}  // namespace

Vec span_repr(const Encoding& enc, int i, int j) {
  if (i < 0 || j > enc.n() || i >= j) {
    throw std::invalid_argument("span_repr: bad span (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  const std::size_t d = enc.f[0].size();
  Vec r(2 * d);
  for (std::size_t k = 0; k < d; ++k) {
    r[k] = enc.f[sz(j)][k] - enc.f[sz(i)][k];
    r[d + k] = enc.b[sz(i)][k] - enc.b[sz(j)][k];
  }
  return r;
}

Network::Network(const NetworkConfig& config, const NetworkSizes& sizes, std::uint64_t seed)
    : config_(config), sizes_(sizes) {
  if (config.lstm_dim < 1 || config.mlp_dim < 1 || config.remote_dim < 1 || config.word_dim < 0 ||
      config.pos_dim < 0 || config.ner_dim < 0 || config.dep_dim < 0 || config.lang_dim < 0 ||
      config.pretrained_dim < 0 || config.external_dim < 0) {
    throw std::invalid_argument("network: invalid dimensions");
  }
  if (sizes.tree_labels < 2 || sizes.remote_labels < 1) throw std::invalid_argument("network: invalid label counts");
  build(seed);
}

int Network::input_dim() const {
  int d = config_.word_dim + config_.pos_dim + config_.ner_dim + config_.dep_dim + config_.pretrained_dim +
          config_.external_dim;
  if (config_.multilingual) d += config_.lang_dim;
  return d;
}

void Network::build(std::uint64_t seed) {
  Rng rng(seed);
  const auto H = sz(config_.lstm_dim);
  const auto M = sz(config_.mlp_dim);
  const auto R = sz(config_.remote_dim);
  auto embedding = [&](const char* name, int rows, int dim) {
    Parameter& p = params_.add(name, {sz(rows), sz(dim)});
    init_uniform(p, -0.01, 0.01, rng);
    return &p;
  };
  embedding("E_word", sizes_.words, config_.word_dim);
  embedding("E_pos", sizes_.pos, config_.pos_dim);
  embedding("E_ner", sizes_.ner, config_.ner_dim);
  embedding("E_dep", sizes_.dep, config_.dep_dim);
  if (config_.pretrained_dim > 0) {
    Parameter& p = params_.add("E_pre", {sz(sizes_.pretrained), sz(config_.pretrained_dim)});
    p.frozen = config_.freeze_pretrained;
  }
  if (config_.multilingual) embedding("E_lang", sizes_.languages, config_.lang_dim);

  auto matrix = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    init_glorot(params_.add(name, {rows, cols}), rng);
  };
  auto bias = [&](const std::string& name, std::size_t n) { return &params_.add(name, {n}); };

  std::size_t in = sz(input_dim());
  for (int layer = 1; layer <= 2; ++layer) {
    for (bool fwd : {true, false}) {
      matrix(lstm_name(layer, fwd, "Wx"), 4 * H, in);
      matrix(lstm_name(layer, fwd, "Wh"), 4 * H, H);
      Parameter* b = bias(lstm_name(layer, fwd, "b"), 4 * H);
      for (std::size_t j = H; j < 2 * H; ++j) b->value[j] = 1.0;  // forget gate
    }
    in = 2 * H;
  }

  const std::size_t span_dim = 2 * H;
  matrix("label_W1", M, span_dim);
  bias("label_b1", M);
  matrix("label_W2", sz(sizes_.tree_labels), M);
  bias("label_b2", sz(sizes_.tree_labels));
  if (!config_.share_mlp_hidden) {
    matrix("span_W1", M, span_dim);
    bias("span_b1", M);
  }
  matrix("span_W2", 1, M);
  bias("span_b2", 1);

  matrix("child_W", R, span_dim);
  bias("child_b", R);
  matrix("parent_W", R, span_dim);
  bias("parent_b", R);
  Parameter& W = params_.add("biaffine_W", {R + 1, sz(sizes_.remote_labels), R});
  // Glorot over the bilinear fan: (R+1) inputs on one side, R on the other.
  double limit = std::sqrt(6.0 / static_cast<double>(2 * R + 1));
  init_uniform(W, -limit, limit, rng);
}

std::vector<Vec> Network::embed(const SentenceInput& input) const {
  const std::size_t n = input.tokens.size();
  if (!input.external.empty() && input.external.size() != n) {
    throw std::invalid_argument("external features: " + std::to_string(input.external.size()) + " vectors for " +
                                std::to_string(n) + " tokens");
  }
  if (config_.external_dim > 0 && input.external.empty() && n > 0) {
    throw std::invalid_argument("external features required but missing");
  }
  const Parameter& word = params_.at("E_word");
  const Parameter& pos = params_.at("E_pos");
  const Parameter& ner = params_.at("E_ner");
  const Parameter& dep = params_.at("E_dep");
  const Parameter* pre = params_.find("E_pre");
  const Parameter* lang = params_.find("E_lang");
  std::vector<Vec> xs(n);
  for (std::size_t t = 0; t < n; ++t) {
    Vec& x = xs[t];
    x.reserve(sz(input_dim()));
    const TokenFeatures& f = input.tokens[t];
    append_row(x, word, f.word);
    append_row(x, pos, f.pos);
    append_row(x, ner, f.ner);
    append_row(x, dep, f.dep);
    if (pre) append_row(x, *pre, f.pretrained);
    if (config_.external_dim > 0) {
      if (input.external[t].size() != sz(config_.external_dim)) {
        throw std::invalid_argument("external feature width " + std::to_string(input.external[t].size()) +
                                    ", expected " + std::to_string(config_.external_dim));
      }
      x.insert(x.end(), input.external[t].begin(), input.external[t].end());
    }
    if (lang) append_row(x, *lang, input.lang);
  }
  return xs;
}

// ---------------------------------------------------------------------------

Session::Session(const Network& net, const SentenceInput& input) : net_(&net), input_(input) {
  if (input.tokens.empty()) throw std::invalid_argument("session: empty sentence");
  encode();
}

Session::Session(Network& net, const SentenceInput& input) : Session(static_cast<const Network&>(net), input) {
  mutable_net_ = &net;
}

void Session::encode() {
  const ParameterSet& P = net_->params();
  const std::size_t n = input_.tokens.size();
  const std::size_t H = sz(net_->config().lstm_dim);
  x_ = net_->embed(input_);

  auto run = [&](int layer, const std::vector<Vec>& in, LstmTrace& fwd, LstmTrace& bwd) {
    fwd = lstm_forward(P.at(lstm_name(layer, true, "Wx")), P.at(lstm_name(layer, true, "Wh")),
                       P.at(lstm_name(layer, true, "b")), in);
    std::vector<Vec> rev(in.rbegin(), in.rend());
    bwd = lstm_forward(P.at(lstm_name(layer, false, "Wx")), P.at(lstm_name(layer, false, "Wh")),
                       P.at(lstm_name(layer, false, "b")), rev);
  };
  run(1, x_, l1f_, l1b_);
  z_.assign(n, Vec());
  for (std::size_t t = 0; t < n; ++t) {
    z_[t] = l1f_.hidden[t];
    const Vec& back = l1b_.hidden[n - 1 - t];
    z_[t].insert(z_[t].end(), back.begin(), back.end());
  }
  run(2, z_, l2f_, l2b_);

  encoding_.f.assign(n + 1, Vec(H, 0.0));
  encoding_.b.assign(n + 1, Vec(H, 0.0));
  for (std::size_t t = 0; t < n; ++t) {
    encoding_.f[t + 1] = l2f_.hidden[t];
    encoding_.b[t] = l2b_.hidden[n - 1 - t];
  }
  df_.assign(n + 1, Vec(H, 0.0));
  db_.assign(n + 1, Vec(H, 0.0));
}

Session::SpanEntry& Session::entry(Span s) {
  auto it = spans_.find(s);
  if (it != spans_.end()) return it->second;
  SpanEntry e;
  e.repr = span_repr(encoding_, s.begin, s.end);
  return spans_.emplace(s, std::move(e)).first->second;
}

const Vec& Session::label_scores(Span s) {
  SpanEntry& e = entry(s);
  if (!e.has_label) {
    const ParameterSet& P = net_->params();
    mlp_forward(P.at("label_W1"), P.at("label_b1"), P.at("label_W2"), P.at("label_b2"), e.repr, e.label);
    e.dlabel.assign(e.label.out.size(), 0.0);
    e.has_label = true;
  }
  return e.label.out;
}

double Session::span_score(Span s) {
  SpanEntry& e = entry(s);
  if (!e.has_span) {
    const ParameterSet& P = net_->params();
    if (net_->config().share_mlp_hidden) {
      label_scores(s);
      e.span.out = linear(P.at("span_W2"), P.at("span_b2"), e.label.hidden);
    } else {
      mlp_forward(P.at("span_W1"), P.at("span_b1"), P.at("span_W2"), P.at("span_b2"), e.repr, e.span);
    }
    e.has_span = true;
  }
  return e.span.out[0];
}

Session::RemoteEntry& Session::remote_entry(std::map<Span, RemoteEntry>& table, Span s, const char* prefix) {
  auto it = table.find(s);
  if (it != table.end()) return it->second;
  const ParameterSet& P = net_->params();
  const std::string p(prefix);
  RemoteEntry e;
  e.act = linear(P.at(p + "_W"), P.at(p + "_b"), entry(s).repr);
  relu_inplace(e.act);
  e.dact.assign(e.act.size(), 0.0);
  return table.emplace(s, std::move(e)).first->second;
}

const Vec& Session::remote_scores(Span child, Span parent) {
  auto key = std::make_pair(child, parent);
  auto it = pairs_.find(key);
  if (it != pairs_.end()) return it->second.cache.out;
  const RemoteEntry& c = remote_entry(children_, child, "child");
  const RemoteEntry& p = remote_entry(parents_, parent, "parent");
  PairEntry e;
  biaffine_forward(net_->params().at("biaffine_W"), c.act, p.act, e.cache);
  e.dout.assign(e.cache.out.size(), 0.0);
  return pairs_.emplace(key, std::move(e)).first->second.cache.out;
}

void Session::add_label_grad(Span s, std::span<const double> d) {
  label_scores(s);
  SpanEntry& e = spans_.at(s);
  k::axpy(1.0, d, e.dlabel);
}

void Session::add_span_grad(Span s, double d) {
  span_score(s);
  spans_.at(s).dspan += d;
}

void Session::add_remote_grad(Span child, Span parent, std::span<const double> d) {
  remote_scores(child, parent);
  k::axpy(1.0, d, pairs_.at(std::make_pair(child, parent)).dout);
}

void Session::add_repr_grad(Span s, std::span<const double> d) {
  const std::size_t H = df_[0].size();
  auto fwd = d.subspan(0, H);
  auto bwd = d.subspan(H, H);
  k::axpy(1.0, fwd, df_[sz(s.end)]);
  k::axpy(-1.0, fwd, df_[sz(s.begin)]);
  k::axpy(1.0, bwd, db_[sz(s.begin)]);
  k::axpy(-1.0, bwd, db_[sz(s.end)]);
}

void Session::backward() {
  if (!mutable_net_) throw std::logic_error("session: backward on a read-only network");
  ParameterSet& P = mutable_net_->params();
  const std::size_t n = input_.tokens.size();
  const std::size_t H = sz(net_->config().lstm_dim);

  Parameter& W = P.at("biaffine_W");
  for (auto& [key, pair] : pairs_) {
    RemoteEntry& c = children_.at(key.first);
    RemoteEntry& p = parents_.at(key.second);
    biaffine_backward(W, c.act, p.act, pair.cache, pair.dout, c.dact, p.dact);
  }
  for (auto [table, prefix] : {std::pair{&children_, "child"}, std::pair{&parents_, "parent"}}) {
    const std::string pre(prefix);
    for (auto& [span, e] : *table) {
      relu_backward(e.act, e.dact);
      Vec dr(2 * H, 0.0);
      linear_backward(P.at(pre + "_W"), P.at(pre + "_b"), entry(span).repr, e.dact, dr);
      add_repr_grad(span, dr);
    }
  }

  const bool shared = net_->config().share_mlp_hidden;
  for (auto& [span, e] : spans_) {
    Vec dr(2 * H, 0.0);
    if (shared) {
      Vec dh(e.label.hidden.size(), 0.0);
      if (e.has_label) linear_backward(P.at("label_W2"), P.at("label_b2"), e.label.hidden, e.dlabel, dh);
      if (e.has_span) {
        const double ds[1] = {e.dspan};
        linear_backward(P.at("span_W2"), P.at("span_b2"), e.label.hidden, ds, dh);
      }
      if (e.has_label) {
        relu_backward(e.label.hidden, dh);
        linear_backward(P.at("label_W1"), P.at("label_b1"), e.repr, dh, dr);
      }
    } else {
      if (e.has_label) {
        mlp_backward(P.at("label_W1"), P.at("label_b1"), P.at("label_W2"), P.at("label_b2"), e.repr, e.label,
                     e.dlabel, dr);
      }
      if (e.has_span) {
        const double ds[1] = {e.dspan};
        mlp_backward(P.at("span_W1"), P.at("span_b1"), P.at("span_W2"), P.at("span_b2"), e.repr, e.span, ds, dr);
      }
    }
    add_repr_grad(span, dr);
  }

  // Encoder. f_0 and b_n are constants.
  auto layer_backward = [&](int layer, const std::vector<Vec>& in, const LstmTrace& fwd, const LstmTrace& bwd,
                            const std::vector<Vec>& dh_f, const std::vector<Vec>& dh_b) {
    auto dx_f = lstm_backward(P.at(lstm_name(layer, true, "Wx")), P.at(lstm_name(layer, true, "Wh")),
                              P.at(lstm_name(layer, true, "b")), in, fwd, dh_f);
    std::vector<Vec> rev(in.rbegin(), in.rend());
    auto dx_b = lstm_backward(P.at(lstm_name(layer, false, "Wx")), P.at(lstm_name(layer, false, "Wh")),
                              P.at(lstm_name(layer, false, "b")), rev, bwd, dh_b);
    for (std::size_t t = 0; t < n; ++t) k::axpy(1.0, dx_b[n - 1 - t], dx_f[t]);
    return dx_f;
  };

  std::vector<Vec> dh_f(n), dh_b(n);
  for (std::size_t t = 0; t < n; ++t) {
    dh_f[t] = df_[t + 1];
    dh_b[n - 1 - t] = db_[t];
  }
  std::vector<Vec> dz = layer_backward(2, z_, l2f_, l2b_, dh_f, dh_b);
  for (std::size_t t = 0; t < n; ++t) {
    dh_f[t].assign(dz[t].begin(), dz[t].begin() + static_cast<std::ptrdiff_t>(H));
    dh_b[n - 1 - t].assign(dz[t].begin() + static_cast<std::ptrdiff_t>(H), dz[t].end());
  }
  std::vector<Vec> dx = layer_backward(1, x_, l1f_, l1b_, dh_f, dh_b);

  // Embeddings.
  const NetworkConfig& cfg = net_->config();
  for (std::size_t t = 0; t < n; ++t) {
    const TokenFeatures& f = input_.tokens[t];
    std::size_t offset = 0;
    auto add = [&](const char* name, int row, int width) {
      Parameter* p = P.find(name);
      if (p && !p->frozen && width > 0) {
        k::axpy(1.0, std::span<const double>(dx[t]).subspan(offset, sz(width)), p->grad_row(sz(row)));
      }
      offset += sz(width);
    };
    add("E_word", f.word, cfg.word_dim);
    add("E_pos", f.pos, cfg.pos_dim);
    add("E_ner", f.ner, cfg.ner_dim);
    add("E_dep", f.dep, cfg.dep_dim);
    add("E_pre", f.pretrained, cfg.pretrained_dim);
    offset += sz(cfg.external_dim);
    if (cfg.multilingual) add("E_lang", input_.lang, cfg.lang_dim);
  }

  // Collected gradients are consumed.
  for (auto& [span, e] : spans_) {
    std::fill(e.dlabel.begin(), e.dlabel.end(), 0.0);
    e.dspan = 0.0;
  }
  for (auto* table : {&children_, &parents_}) {
    for (auto& [span, e] : *table) std::fill(e.dact.begin(), e.dact.end(), 0.0);
  }
  for (auto& [key, pair] : pairs_) std::fill(pair.dout.begin(), pair.dout.end(), 0.0);
  for (auto& v : df_) std::fill(v.begin(), v.end(), 0.0);
  for (auto& v : db_) std::fill(v.begin(), v.end(), 0.0);
}

}  // namespace ucca::nn
