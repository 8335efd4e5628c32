#include "ucca/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ucca/checkpoint.hpp"
#include "ucca/nn/optimizer.hpp"

namespace ucca {

using nlohmann::json;

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw TrainError("training config must be a JSON object");
  static const std::vector<std::string> known{"max_epochs", "patience",     "seed",       "optimizer",
                                              "learning_rate", "network",   "multilingual", "pretrained",
                                              "stop_at_perfect_dev"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw TrainError("training config: unknown field '" + it.key() + "'");
    }
  }
  TrainConfig c;
  try {
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
    c.optimizer = j.value("optimizer", c.optimizer);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.stop_at_perfect_dev = j.value("stop_at_perfect_dev", c.stop_at_perfect_dev);
    if (j.contains("network")) {
      for (const char* derived : {"pretrained_dim", "external_dim", "freeze_pretrained"}) {
        if (j["network"].contains(derived)) {
          throw TrainError(std::string("training config: network.") + derived + " is set from the data");
        }
      }
      c.network = network_config_from_json(j["network"]);
    }
    c.network.multilingual = j.value("multilingual", c.network.multilingual);
    if (j.contains("pretrained")) {
      const json& p = j["pretrained"];
      if (!p.is_object()) throw TrainError("training config: pretrained must be {path, freeze}");
      for (auto it = p.begin(); it != p.end(); ++it) {
        if (it.key() != "path" && it.key() != "freeze") {
          throw TrainError("training config: unknown field 'pretrained." + it.key() + "'");
        }
      }
      c.pretrained_path = p.value("path", std::string());
      c.network.freeze_pretrained = p.value("freeze", true);
    }
  } catch (const json::exception& e) {
    throw TrainError(std::string("training config: ") + e.what());
  } catch (const CheckpointError& e) {
    throw TrainError(std::string("training config: ") + e.what());
  }
  if (c.max_epochs < 1) throw TrainError("training config: max_epochs must be >= 1");
  if (c.patience < 1) throw TrainError("training config: patience must be >= 1");
  if (c.optimizer != "adam" && c.optimizer != "sgd") throw TrainError("training config: optimizer must be adam or sgd");
  if (!(c.learning_rate >= 0.0) || !std::isfinite(c.learning_rate)) {
    throw TrainError("training config: learning_rate must be finite and >= 0");
  }
  return c;
}

json train_config_to_json(const TrainConfig& c) {
  json network = network_config_to_json(c.network);
  for (const char* k : {"pretrained_dim", "external_dim", "freeze_pretrained", "multilingual"}) network.erase(k);
  json out{{"max_epochs", c.max_epochs},       {"patience", c.patience},
           {"seed", c.seed},                   {"optimizer", c.optimizer},
           {"learning_rate", c.learning_rate}, {"network", network},
           {"multilingual", c.network.multilingual},
           {"stop_at_perfect_dev", c.stop_at_perfect_dev}};
  if (!c.pretrained_path.empty()) {
    out["pretrained"] = json{{"path", c.pretrained_path}, {"freeze", c.network.freeze_pretrained}};
  }
  return out;
}

TrainingExample make_example(const Model& model, const UccaGraph& gold, const std::vector<nn::Vec>* external) {
  TrainingExample ex;
  ex.gold = gold;
  ConstituentTree tree = graph_to_tree(gold).tree;
  ex.trace = gold_trace(tree, model.vocabs().tree_labels);
  ex.remote = remote_target(gold, tree);
  ex.pairs = enumerate_pairs(ex.remote.restored.graph, ex.remote.restored.remote_marked);
  ex.input = model.featurize(gold.tokens, gold.lang, external);
  return ex;
}

LossBreakdown accumulate_loss(Model& model, const TrainingExample& ex, unsigned parts) {
  nn::Session session(model.network(), ex.input);
  LossBreakdown loss;
  if (parts & kTopdownLoss) {
    NeuralSpanScorer spans(session);
    loss.topdown = loss_topdown(spans, ex.trace, model.vocabs().tree_labels);
  }
  if ((parts & kRemoteLoss) && !ex.pairs.empty()) {
    NeuralRemoteScorer remotes(session);
    loss.remote = loss_remote(remotes, ex.pairs, ex.remote.remotes, model.vocabs().remote_labels);
  }
  loss.joint = loss.topdown + loss.remote;
  if (!std::isfinite(loss.joint)) throw nn::NumericError("non-finite training loss");
  session.backward();
  return loss;
}

F1Report evaluate(const Model& model, const TrainData& data) {
  std::vector<UccaGraph> predictions;
  predictions.reserve(data.graphs.size());
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    const auto* ext = data.external.empty() ? nullptr : &data.external[i];
    predictions.push_back(model.parse(sentence_of(data.graphs[i]), ext));
  }
  return score_corpus(data.graphs, predictions);
}

namespace {

void check_data(const TrainData& data, const char* what, bool multilingual, int external_dim) {
  if (!data.external.empty() && data.external.size() != data.graphs.size()) {
    throw TrainError(std::string(what) + ": external features cover " + std::to_string(data.external.size()) +
                     " sentences, corpus has " + std::to_string(data.graphs.size()));
  }
  if (external_dim > 0 && data.external.empty() && !data.graphs.empty()) {
    throw TrainError(std::string(what) + ": external features are required when training uses them");
  }
  for (std::size_t i = 0; i < data.graphs.size(); ++i) {
    auto problems = validate(data.graphs[i]);
    if (!problems.empty()) {
      throw TrainError(std::string(what) + " sentence " + std::to_string(i + 1) + ": " + problems.front());
    }
    if (multilingual && data.graphs[i].lang.empty()) {
      throw TrainError(std::string(what) + " sentence " + std::to_string(i + 1) +
                       ": multilingual training needs a language tag on every sentence");
    }
    if (!data.external.empty() && data.external[i].size() != data.graphs[i].tokens.size()) {
      throw TrainError(std::string(what) + " sentence " + std::to_string(i + 1) +
                       ": external feature count differs from token count");
    }
  }
}

std::vector<std::vector<double>> snapshot(const nn::ParameterSet& params) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < params.size(); ++i) out.push_back(params[i].value);
  return out;
}

}  // namespace

TrainResult train(const TrainData& train_data, const TrainData& dev_data, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  if (train_data.graphs.empty()) throw TrainError("training corpus is empty");
  if (dev_data.graphs.empty()) throw TrainError("dev corpus is empty");

  nn::NetworkConfig net_config = config.network;
  std::optional<PretrainedTable> pretrained;
  if (!config.pretrained_path.empty()) {
    pretrained = load_pretrained(config.pretrained_path);
    net_config.pretrained_dim = pretrained->dim;
  }
  net_config.external_dim = 0;
  for (const auto& sentence : train_data.external) {
    if (!sentence.empty()) {
      net_config.external_dim = static_cast<int>(sentence.front().size());
      break;
    }
  }
  check_data(train_data, "train", net_config.multilingual, net_config.external_dim);
  check_data(dev_data, "dev", false, net_config.external_dim);

  Vocabularies vocabs = build_vocabularies(train_data.graphs);
  if (pretrained) vocabs.pretrained = pretrained->words;
  Model model(net_config, std::move(vocabs), config.seed);
  if (pretrained) model.load_pretrained(*pretrained);

  std::vector<TrainingExample> examples;
  for (std::size_t i = 0; i < train_data.graphs.size(); ++i) {
    const auto* ext = train_data.external.empty() ? nullptr : &train_data.external[i];
    examples.push_back(make_example(model, train_data.graphs[i], ext));
  }

  auto optimizer = nn::make_optimizer(config.optimizer, config.learning_rate);
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5eedULL);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{std::move(model), {}, 0, {}, "max_epochs"};
  Model& m = result.model;
  auto best = snapshot(m.network().params());
  double best_f1 = -1.0;
  int since_best = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0, topdown = 0.0, remote = 0.0;
    for (std::size_t idx : order) {
      m.network().params().zero_grad();
      LossBreakdown loss = accumulate_loss(m, examples[idx]);
      if (std::abs(loss.joint - (loss.topdown + loss.remote)) > 1e-12) {
        throw std::logic_error("joint loss is not the sum of its parts");
      }
      total += loss.joint;
      topdown += loss.topdown;
      remote += loss.remote;
      optimizer->step(m.network().params());
    }
    EpochRecord record;
    record.epoch = epoch;
    const auto count = static_cast<double>(examples.size());
    record.mean_loss = total / count;
    record.mean_topdown = topdown / count;
    record.mean_remote = remote / count;
    record.dev = evaluate(m, dev_data);
    record.improved = record.dev.averaged.f1 > best_f1;
    if (record.improved) {
      best_f1 = record.dev.averaged.f1;
      best = snapshot(m.network().params());
      result.best_epoch = epoch;
      result.best_dev = record.dev;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (config.stop_at_perfect_dev && record.dev.averaged.f1 >= 1.0) {
      result.stop_reason = "perfect_dev";
      break;
    }
    if (since_best >= config.patience) {
      result.stop_reason = "patience";
      break;
    }
  }
  nn::ParameterSet& params = m.network().params();
  for (std::size_t i = 0; i < params.size(); ++i) params[i].value = best[i];
  params.zero_grad();
  return result;
}

}  // namespace ucca
