#pragma once

// A trained parser: the network plus every vocabulary it was sized by, and
// the parse pipeline from tokens to a full UCCA graph.

#include <cstdint>
#include <optional>
#include <vector>

#include "ucca/conversion.hpp"
#include "ucca/features.hpp"
#include "ucca/io.hpp"
#include "ucca/nn/network.hpp"
#include "ucca/remote.hpp"
#include "ucca/span_parser.hpp"
#include "ucca/vocab.hpp"

namespace ucca {

struct Vocabularies {
  StringVocab words;
  StringVocab pos;
  StringVocab ner;
  StringVocab dep;
  StringVocab pretrained;
  StringVocab languages;
  LabelVocab tree_labels;
  RemoteLabelVocab remote_labels;

  nn::NetworkSizes sizes() const;
  friend bool operator==(const Vocabularies&, const Vocabularies&) = default;
};

// Everything observed in the training trees and their remote edges.
Vocabularies build_vocabularies(const std::vector<UccaGraph>& corpus);

class Model {
 public:
  Model(const nn::NetworkConfig& config, Vocabularies vocabs, std::uint64_t seed);

  nn::Network& network() { return net_; }
  const nn::Network& network() const { return net_; }
  const Vocabularies& vocabs() const { return vocabs_; }

  // Copies the table rows into E_pre; the vocabulary must be the model's.
  void load_pretrained(const PretrainedTable& table);

  // external: one vector per token, required iff the model was built with
  // external features.
  nn::SentenceInput featurize(const std::vector<Token>& tokens, const std::string& lang,
                              const std::vector<nn::Vec>* external = nullptr) const;

  // Tokens -> tree -> graph -> remote edges. The result passes validate().
  UccaGraph parse(const Sentence& sentence, const std::vector<nn::Vec>* external = nullptr) const;

  // Adds predicted remote edges to a restored graph (used by restore).
  UccaGraph add_remotes(const RestoreResult& restored, const std::vector<nn::Vec>* external = nullptr) const;

 private:
  Vocabularies vocabs_;
  nn::Network net_;
};

// The restored tree of a gold graph with its remote edges renumbered onto
// the restored ids. Remote edges touching nodes that the conversion could
// not restore exactly are dropped and counted.
struct RemoteTarget {
  RestoreResult restored;
  std::vector<Edge> remotes;
  int dropped = 0;
};

RemoteTarget remote_target(const UccaGraph& gold, const ConstituentTree& tree);

UccaGraph parse_pipeline(const Model& model, const Sentence& sentence, const std::vector<nn::Vec>* external = nullptr);

}  // namespace ucca
