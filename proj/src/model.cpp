#include "ucca/model.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace ucca {

nn::NetworkSizes Vocabularies::sizes() const {
  nn::NetworkSizes s;
  s.words = words.size();
  s.pos = pos.size();
  s.ner = ner.size();
  s.dep = dep.size();
  s.pretrained = pretrained.size();
  s.languages = languages.size();
  s.tree_labels = tree_labels.size();
  s.remote_labels = remote_labels.size();
  return s;
}

Vocabularies build_vocabularies(const std::vector<UccaGraph>& corpus) {
  Vocabularies v;
  for (const UccaGraph& g : corpus) {
    for (const Token& t : g.tokens) {
      v.words.add(t.form);
      v.pos.add(t.pos);
      v.ner.add(t.ner);
      v.dep.add(t.dep_label);
    }
    v.languages.add(g.lang);
    for (const std::string& label : collapsed_labels(graph_to_tree(g).tree)) v.tree_labels.add(label);
    for (const Edge& e : g.edges) {
      if (e.kind == EdgeKind::kRemote) v.remote_labels.add(e.label);
    }
  }
  return v;
}

Model::Model(const nn::NetworkConfig& config, Vocabularies vocabs, std::uint64_t seed)
    : vocabs_(std::move(vocabs)), net_(config, vocabs_.sizes(), seed) {}

void Model::load_pretrained(const PretrainedTable& table) {
  nn::Parameter* e = net_.params().find("E_pre");
  if (!e) throw std::invalid_argument("model has no pretrained embedding table");
  if (!(table.words == vocabs_.pretrained) || table.dim != static_cast<int>(e->cols())) {
    throw std::invalid_argument("pretrained table does not match the model's vocabulary or width");
  }
  for (std::size_t r = 0; r < table.vectors.size(); ++r) {
    std::copy(table.vectors[r].begin(), table.vectors[r].end(), e->row(r).begin());
  }
}

nn::SentenceInput Model::featurize(const std::vector<Token>& tokens, const std::string& lang,
                                   const std::vector<nn::Vec>* external) const {
  nn::SentenceInput input;
  for (const Token& t : tokens) {
    nn::TokenFeatures f;
    f.word = vocabs_.words.index(t.form);
    f.pos = vocabs_.pos.index(t.pos);
    f.ner = vocabs_.ner.index(t.ner);
    f.dep = vocabs_.dep.index(t.dep_label);
    f.pretrained = vocabs_.pretrained.index(t.form);
    if (f.pretrained == 0) {
      std::string lower = t.form;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      f.pretrained = vocabs_.pretrained.index(lower);
    }
    input.tokens.push_back(f);
  }
  input.lang = vocabs_.languages.index(lang);
  if (net_.config().external_dim > 0) {
    if (!external) throw std::invalid_argument("model expects external features for every sentence");
    input.external = *external;
  }
  return input;
}

namespace {

UccaGraph with_remotes(nn::Session& session, const Vocabularies& vocabs, const RestoreResult& restored) {
  UccaGraph graph = restored.graph;
  auto pairs = enumerate_pairs(graph, restored.remote_marked);
  NeuralRemoteScorer scorer(session);
  for (Edge& e : predict_remotes(scorer, graph, pairs, vocabs.remote_labels)) graph.edges.push_back(std::move(e));
  return graph;
}

}  // namespace

UccaGraph Model::parse(const Sentence& sentence, const std::vector<nn::Vec>* external) const {
  if (sentence.tokens.empty()) throw std::invalid_argument("cannot parse an empty sentence");
  nn::Session session(net_, featurize(sentence.tokens, sentence.lang, external));
  NeuralSpanScorer spans(session);
  ParseResult parsed = parse_topdown(spans, vocabs_.tree_labels, sentence.tokens, sentence.lang);
  RestoreResult restored = tree_to_graph(parsed.tree, RestoreMode::kLenient);
  UccaGraph graph = with_remotes(session, vocabs_, restored);
  auto problems = validate(graph);
  if (!problems.empty()) throw std::logic_error("parser produced an invalid graph: " + problems.front());
  return graph;
}

UccaGraph Model::add_remotes(const RestoreResult& restored, const std::vector<nn::Vec>* external) const {
  nn::Session session(net_, featurize(restored.graph.tokens, restored.graph.lang, external));
  return with_remotes(session, vocabs_, restored);
}

RemoteTarget remote_target(const UccaGraph& gold, const ConstituentTree& tree) {
  RemoteTarget target;
  target.restored = tree_to_graph(tree, RestoreMode::kLenient);
  const UccaGraph& restored = target.restored.graph;

  std::vector<Edge> gold_remotes;
  for (const Edge& e : gold.edges) {
    if (e.kind == EdgeKind::kRemote) gold_remotes.push_back(e);
  }
  if (gold_remotes.empty()) return target;

  // Match nodes by (yield, label). Exact restorations match everything; after
  // lossy moves only the unaffected nodes do.
  using Key = std::pair<std::vector<int>, std::string>;
  auto keyed = [](const UccaGraph& g) {
    PrimaryIndex index(g);
    std::map<Key, std::vector<NodeId>> out;
    for (NodeId v : g.nonterminals) {
      out[{index.yield(v), v == g.root ? std::string(kRootLabel) : index.edge_label(v)}].push_back(v);
    }
    // Unary chains repeat a yield; depth keeps them apart.
    for (auto& [key, nodes] : out) {
      std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) { return index.depth(a) < index.depth(b); });
    }
    return out;
  };
  auto gold_keys = keyed(gold);
  auto restored_keys = keyed(restored);
  std::map<NodeId, NodeId> to_restored;
  for (const auto& [key, nodes] : gold_keys) {
    auto it = restored_keys.find(key);
    if (it == restored_keys.end() || it->second.size() != nodes.size()) continue;
    for (std::size_t i = 0; i < nodes.size(); ++i) to_restored[nodes[i]] = it->second[i];
  }
  for (const Edge& e : gold_remotes) {
    auto p = to_restored.find(e.parent);
    auto c = to_restored.find(e.child);
    bool marked = c != to_restored.end() && std::binary_search(target.restored.remote_marked.begin(),
                                                               target.restored.remote_marked.end(), c->second);
    if (p == to_restored.end() || !marked) {
      ++target.dropped;
      continue;
    }
    target.remotes.push_back(Edge{p->second, c->second, e.label, EdgeKind::kRemote});
  }
  return target;
}

UccaGraph parse_pipeline(const Model& model, const Sentence& sentence, const std::vector<nn::Vec>* external) {
  return model.parse(sentence, external);
}

}  // namespace ucca
