#include "ucca/synthetic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>

#include "ucca/labels.hpp"

namespace ucca {

void check_spec(const SyntheticSpec& s) {
  auto fail = [](const std::string& why) { throw SpecError("synthetic spec: " + why); };
  if (s.sentences < 0) fail("sentences must be >= 0");
  if (s.vocab_size < 1) fail("vocab_size must be >= 1");
  if (s.min_tokens < 1 || s.max_tokens < s.min_tokens) fail("need 1 <= min_tokens <= max_tokens");
  if (s.max_depth < 1) fail("max_depth must be >= 1");
  if (s.min_branching < 2 || s.max_branching < s.min_branching) fail("need 2 <= min_branching <= max_branching");
  for (double p : {s.p_remote, s.p_discont, s.p_unary, s.p_bare}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("probabilities must lie in [0, 1]");
  }
  if (s.labels.empty()) fail("labels must not be empty");
  if (s.p_remote > 0 && s.remote_labels.empty()) fail("remote_labels must not be empty when p_remote > 0");
  for (const auto* list : {&s.labels, &s.remote_labels}) {
    for (const auto& l : *list) {
      if (auto problem = category_label_problem(l)) fail(*problem);
    }
  }
  if (s.languages.empty()) fail("languages must not be empty");
  if (s.p_discont > 0) {
    // A non-root node with three children, the middle one a nonterminal.
    if (s.max_branching < 3) fail("p_discont > 0 needs max_branching >= 3");
    if (s.max_depth < 2) fail("p_discont > 0 needs max_depth >= 2");
    if (s.max_tokens < 3) fail("p_discont > 0 needs max_tokens >= 3");
  }
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  static const std::vector<std::string> known{"sentences", "vocab_size", "min_tokens", "max_tokens",
                                              "max_depth", "min_branching", "max_branching", "p_remote",
                                              "p_discont", "p_unary", "p_bare", "labels",
                                              "remote_labels", "languages", "remote_unique_spans"};
  if (!j.is_object()) throw SpecError("synthetic spec must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw SpecError("synthetic spec: unknown field '" + it.key() + "'");
    }
  }
  try {
    s.sentences = j.value("sentences", s.sentences);
    s.vocab_size = j.value("vocab_size", s.vocab_size);
    s.min_tokens = j.value("min_tokens", s.min_tokens);
    s.max_tokens = j.value("max_tokens", s.max_tokens);
    s.max_depth = j.value("max_depth", s.max_depth);
    s.min_branching = j.value("min_branching", s.min_branching);
    s.max_branching = j.value("max_branching", s.max_branching);
    s.p_remote = j.value("p_remote", s.p_remote);
    s.p_discont = j.value("p_discont", s.p_discont);
    s.p_unary = j.value("p_unary", s.p_unary);
    s.p_bare = j.value("p_bare", s.p_bare);
    s.labels = j.value("labels", s.labels);
    s.remote_labels = j.value("remote_labels", s.remote_labels);
    s.languages = j.value("languages", s.languages);
    s.remote_unique_spans = j.value("remote_unique_spans", s.remote_unique_spans);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("synthetic spec: ") + e.what());
  }
  check_spec(s);
  return s;
}

nlohmann::json spec_to_json(const SyntheticSpec& s) {
  return {{"sentences", s.sentences},         {"vocab_size", s.vocab_size},       {"min_tokens", s.min_tokens},
          {"max_tokens", s.max_tokens},       {"max_depth", s.max_depth},         {"min_branching", s.min_branching},
          {"max_branching", s.max_branching}, {"p_remote", s.p_remote},           {"p_discont", s.p_discont},
          {"p_unary", s.p_unary},             {"p_bare", s.p_bare},               {"labels", s.labels},
          {"remote_labels", s.remote_labels}, {"languages", s.languages},
          {"remote_unique_spans", s.remote_unique_spans}};
}

namespace {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return p > 0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

class SentenceBuilder {
 public:
  SentenceBuilder(const SyntheticSpec& spec, Rng& rng, std::vector<Token> tokens)
      : spec_(spec), rng_(rng), next_(static_cast<int>(tokens.size()) + 1) {
    const int n = static_cast<int>(tokens.size());
    g_.tokens = std::move(tokens);
    g_.root = make_node_id(next_++);
    g_.nonterminals.push_back(g_.root);
    if (n == 1) {
      // The root never holds a lone token directly.
      NodeId unit = new_node();
      edge(g_.root, unit, choose(rng_, spec_.labels));
      expand(unit, 0, 1, 1);
    } else {
      expand(g_.root, 0, n, 0);
    }
  }

  UccaGraph& graph() { return g_; }

  // Non-root nodes with >= 3 children whose middle children include a
  // nonterminal.
  std::vector<NodeId> discontinuity_hosts() const {
    PrimaryIndex index(g_);
    std::vector<NodeId> out;
    for (NodeId v : g_.nonterminals) {
      if (v == g_.root) continue;
      const auto& kids = index.children(v);
      if (kids.size() < 3) continue;
      for (std::size_t i = 1; i + 1 < kids.size(); ++i) {
        if (g_.is_nonterminal(kids[i])) {
          out.push_back(v);
          break;
        }
      }
    }
    return out;
  }

  void inject_discontinuity(NodeId host) {
    PrimaryIndex index(g_);
    NodeId grandparent = *index.parent(host);
    const auto& kids = index.children(host);
    std::vector<NodeId> middle;
    for (std::size_t i = 1; i + 1 < kids.size(); ++i) {
      if (g_.is_nonterminal(kids[i])) middle.push_back(kids[i]);
    }
    std::vector<NodeId> moved;
    for (NodeId c : middle) {
      if (chance(rng_, 0.5)) moved.push_back(c);
    }
    if (moved.empty()) moved.push_back(choose(rng_, middle));
    for (Edge& e : g_.edges) {
      if (e.kind == EdgeKind::kPrimary && e.parent == host &&
          std::find(moved.begin(), moved.end(), e.child) != moved.end()) {
        e.parent = grandparent;
      }
    }
  }

  void add_remotes() {
    if (spec_.p_remote <= 0) return;
    std::vector<NodeId> nodes = g_.nonterminals;
    if (spec_.remote_unique_spans) {
      PrimaryIndex index(g_);
      std::map<std::pair<int, int>, int> extents;
      auto extent = [&](NodeId v) { return std::pair{index.yield(v).front(), index.yield(v).back()}; };
      for (NodeId v : nodes) ++extents[extent(v)];
      std::erase_if(nodes, [&](NodeId v) { return extents[extent(v)] > 1; });
    }
    for (NodeId child : nodes) {
      if (child == g_.root || !chance(rng_, spec_.p_remote)) continue;
      std::vector<NodeId> candidates;
      for (NodeId parent : nodes) {
        if (parent == child || has_edge(parent, child) || reaches(child, parent)) continue;
        candidates.push_back(parent);
      }
      if (candidates.empty()) continue;
      NodeId parent = choose(rng_, candidates);
      g_.edges.push_back(Edge{parent, child, choose(rng_, spec_.remote_labels), EdgeKind::kRemote});
    }
  }

 private:
  NodeId new_node() {
    NodeId id = make_node_id(next_++);
    g_.nonterminals.push_back(id);
    return id;
  }

  void edge(NodeId parent, NodeId child, std::string label) {
    g_.edges.push_back(Edge{parent, child, std::move(label), EdgeKind::kPrimary});
  }

  // Node covers tokens begin+1..end.
  void expand(NodeId node, int begin, int end, int depth) {
    const int len = end - begin;
    if (len == 1 || depth >= spec_.max_depth) {
      for (int t = begin + 1; t <= end; ++t) edge(node, make_node_id(t), "");
      return;
    }
    int parts = uniform(rng_, std::min(spec_.min_branching, len), std::min(spec_.max_branching, len));
    std::vector<int> inner;
    for (int k = begin + 1; k < end; ++k) inner.push_back(k);
    std::shuffle(inner.begin(), inner.end(), rng_);
    inner.resize(static_cast<std::size_t>(parts - 1));
    std::sort(inner.begin(), inner.end());
    std::vector<int> cuts{begin};
    cuts.insert(cuts.end(), inner.begin(), inner.end());
    cuts.push_back(end);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const int b = cuts[c], e = cuts[c + 1];
      if (e - b == 1 && chance(rng_, spec_.p_bare)) {
        edge(node, make_node_id(e), "");
        continue;
      }
      NodeId child = new_node();
      edge(node, child, choose(rng_, spec_.labels));
      if (chance(rng_, spec_.p_unary)) {
        NodeId link = new_node();
        edge(child, link, choose(rng_, spec_.labels));
        child = link;
      }
      expand(child, b, e, depth + 1);
    }
  }

  bool has_edge(NodeId parent, NodeId child) const {
    return std::any_of(g_.edges.begin(), g_.edges.end(),
                       [&](const Edge& e) { return e.parent == parent && e.child == child; });
  }

  bool reaches(NodeId from, NodeId to) const {
    std::vector<NodeId> stack{from};
    std::vector<NodeId> seen;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
      seen.push_back(v);
      for (const Edge& e : g_.edges) {
        if (e.parent == v) stack.push_back(e.child);
      }
    }
    return false;
  }

  const SyntheticSpec& spec_;
  Rng& rng_;
  int next_;
  UccaGraph g_;
};

std::vector<Token> make_tokens(const SyntheticSpec& spec, Rng& rng, int n, const std::string& lang) {
  static const char* kPos[] = {"NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "PUNCT"};
  static const char* kNer[] = {"O", "O", "O", "PER", "LOC"};
  static const char* kDep[] = {"nsubj", "obj", "root", "amod", "advmod", "det", "case", "punct", "conj"};
  std::vector<Token> out;
  for (int i = 0; i < n; ++i) {
    int w = uniform(rng, 0, spec.vocab_size - 1);
    out.push_back(Token{"w" + std::to_string(w), kPos[w % 8], kNer[w % 5], kDep[w % 9], lang});
  }
  return out;
}

}  // namespace

std::vector<UccaGraph> generate(const SyntheticSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Rng rng(seed);
  std::vector<UccaGraph> corpus;
  corpus.reserve(static_cast<std::size_t>(spec.sentences));
  for (int s = 0; s < spec.sentences; ++s) {
    const bool discontinuous = chance(rng, spec.p_discont);
    const int lo = discontinuous ? std::max(spec.min_tokens, 3) : spec.min_tokens;
    const std::string& lang = choose(rng, spec.languages);
    UccaGraph graph;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) {
        throw SpecError("synthetic spec: could not place a discontinuity in 1000 attempts; raise max_branching, "
                        "max_tokens or max_depth");
      }
      int n = uniform(rng, lo, spec.max_tokens);
      SentenceBuilder builder(spec, rng, make_tokens(spec, rng, n, lang));
      if (discontinuous) {
        auto hosts = builder.discontinuity_hosts();
        if (hosts.empty()) continue;
        builder.inject_discontinuity(choose(rng, hosts));
      }
      builder.add_remotes();
      graph = std::move(builder.graph());
      graph.lang = lang;
      break;
    }
    graph = canonicalize(graph);
    auto problems = validate(graph);
    if (!problems.empty()) throw std::logic_error("generator produced an invalid graph: " + problems.front());
    corpus.push_back(std::move(graph));
  }
  return corpus;
}

}  // namespace ucca
