#pragma once

// Joint training of the span parser and the remote classifier: one
// optimizer step per sentence on loss_topdown + loss_remote, dev averaged
// F1 after every epoch, best-epoch parameters kept, early stopping.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ucca/evaluation.hpp"
#include "ucca/model.hpp"

namespace ucca {

class TrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  int max_epochs = 100;
  int patience = 10;  // epochs without a dev improvement before stopping
  std::uint64_t seed = 1;
  std::string optimizer = "adam";
  double learning_rate = 1e-3;
  nn::NetworkConfig network;  // pretrained_dim and external_dim come from the data
  std::string pretrained_path;
  // Stop as soon as dev averaged F1 reaches 1; nothing can improve on it.
  bool stop_at_perfect_dev = true;
};

// Keys: max_epochs, patience, seed, optimizer, learning_rate,
// network {dims, share_mlp_hidden}, multilingual, pretrained {path, freeze}.
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& config);

struct TrainingExample {
  UccaGraph gold;
  GoldTrace trace;
  RemoteTarget remote;
  std::vector<RemoteCandidatePair> pairs;
  nn::SentenceInput input;
};

TrainingExample make_example(const Model& model, const UccaGraph& gold, const std::vector<nn::Vec>* external = nullptr);

struct LossBreakdown {
  double topdown = 0.0;
  double remote = 0.0;
  double joint = 0.0;
};

enum LossParts : unsigned { kTopdownLoss = 1, kRemoteLoss = 2, kJointLoss = 3 };

// Runs one sentence forward and adds the gradients of the selected parts to
// the parameter gradients (which the caller zeroes).
LossBreakdown accumulate_loss(Model& model, const TrainingExample& example, unsigned parts = kJointLoss);

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0.0;
  double mean_topdown = 0.0;
  double mean_remote = 0.0;
  F1Report dev;
  bool improved = false;
};

struct TrainResult {
  Model model;  // parameters of the best dev epoch
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  F1Report best_dev;
  std::string stop_reason;
};

struct TrainData {
  std::vector<UccaGraph> graphs;
  std::vector<std::vector<nn::Vec>> external;  // empty or one entry per graph
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const TrainData& train_data, const TrainData& dev_data, const TrainConfig& config,
                  const EpochCallback& on_epoch = nullptr);

// Averaged-F1 report of the full parse pipeline over a corpus.
F1Report evaluate(const Model& model, const TrainData& data);

}  // namespace ucca
