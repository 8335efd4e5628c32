#include "ucca/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "ucca/base64.hpp"

namespace ucca {

using nlohmann::json;

json network_config_to_json(const nn::NetworkConfig& c) {
  return json{{"word_dim", c.word_dim},
              {"pos_dim", c.pos_dim},
              {"ner_dim", c.ner_dim},
              {"dep_dim", c.dep_dim},
              {"lang_dim", c.lang_dim},
              {"lstm_dim", c.lstm_dim},
              {"mlp_dim", c.mlp_dim},
              {"remote_dim", c.remote_dim},
              {"multilingual", c.multilingual},
              {"share_mlp_hidden", c.share_mlp_hidden},
              {"pretrained_dim", c.pretrained_dim},
              {"freeze_pretrained", c.freeze_pretrained},
              {"external_dim", c.external_dim}};
}

nn::NetworkConfig network_config_from_json(const json& j) {
  nn::NetworkConfig c;
  if (!j.is_object()) throw CheckpointError("network config must be a JSON object");
  const json known = network_config_to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.contains(it.key())) throw CheckpointError("unknown network config field '" + it.key() + "'");
  }
  try {
    c.word_dim = j.value("word_dim", c.word_dim);
    c.pos_dim = j.value("pos_dim", c.pos_dim);
    c.ner_dim = j.value("ner_dim", c.ner_dim);
    c.dep_dim = j.value("dep_dim", c.dep_dim);
    c.lang_dim = j.value("lang_dim", c.lang_dim);
    c.lstm_dim = j.value("lstm_dim", c.lstm_dim);
    c.mlp_dim = j.value("mlp_dim", c.mlp_dim);
    c.remote_dim = j.value("remote_dim", c.remote_dim);
    c.multilingual = j.value("multilingual", c.multilingual);
    c.share_mlp_hidden = j.value("share_mlp_hidden", c.share_mlp_hidden);
    c.pretrained_dim = j.value("pretrained_dim", c.pretrained_dim);
    c.freeze_pretrained = j.value("freeze_pretrained", c.freeze_pretrained);
    c.external_dim = j.value("external_dim", c.external_dim);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("network config: ") + e.what());
  }
  for (int d : {c.word_dim, c.pos_dim, c.ner_dim, c.dep_dim, c.lang_dim, c.pretrained_dim, c.external_dim}) {
    if (d < 0) throw CheckpointError("network config: dimensions must be >= 0");
  }
  for (int d : {c.lstm_dim, c.mlp_dim, c.remote_dim}) {
    if (d < 1) throw CheckpointError("network config: lstm_dim, mlp_dim and remote_dim must be >= 1");
  }
  return c;
}

json checkpoint_to_json(const Model& model, const json& metadata) {
  const Vocabularies& v = model.vocabs();
  json vocabs{{"words", v.words.entries()},
              {"pos", v.pos.entries()},
              {"ner", v.ner.entries()},
              {"dep", v.dep.entries()},
              {"pretrained", v.pretrained.entries()},
              {"languages", v.languages.entries()},
              {"tree_labels", v.tree_labels.labels()},
              {"remote_labels", v.remote_labels.labels()}};
  json tensors = json::object();
  const nn::ParameterSet& params = model.network().params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const nn::Parameter& p = params[i];
    tensors[p.name] = json{{"shape", p.shape}, {"data", encode_doubles(p.value)}};
  }
  return json{{"version", kCheckpointVersion},
              {"config", network_config_to_json(model.network().config())},
              {"vocabs", vocabs},
              {"tensors", tensors},
              {"metadata", metadata}};
}

Model checkpoint_from_json(const json& j) {
  try {
    if (!j.is_object()) throw CheckpointError("checkpoint must be a JSON object");
    if (j.value("version", -1) != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " + j.value("version", json(nullptr)).dump());
    }
    for (const char* key : {"config", "vocabs", "tensors"}) {
      if (!j.contains(key)) throw CheckpointError(std::string("checkpoint lacks '") + key + "'");
    }
    const json& jv = j["vocabs"];
    Vocabularies v;
    v.words = StringVocab(jv.at("words").get<std::vector<std::string>>());
    v.pos = StringVocab(jv.at("pos").get<std::vector<std::string>>());
    v.ner = StringVocab(jv.at("ner").get<std::vector<std::string>>());
    v.dep = StringVocab(jv.at("dep").get<std::vector<std::string>>());
    v.pretrained = StringVocab(jv.at("pretrained").get<std::vector<std::string>>());
    v.languages = StringVocab(jv.at("languages").get<std::vector<std::string>>());
    v.tree_labels = LabelVocab(jv.at("tree_labels").get<std::vector<std::string>>());
    v.remote_labels = RemoteLabelVocab(jv.at("remote_labels").get<std::vector<std::string>>());

    Model model(network_config_from_json(j["config"]), std::move(v), 0);
    nn::ParameterSet& params = model.network().params();
    const json& tensors = j["tensors"];
    if (tensors.size() != params.size()) {
      throw CheckpointError("checkpoint has " + std::to_string(tensors.size()) + " tensors, model expects " +
                            std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      nn::Parameter& p = params[i];
      if (!tensors.contains(p.name)) throw CheckpointError("checkpoint lacks tensor '" + p.name + "'");
      const json& t = tensors[p.name];
      if (t.at("shape").get<std::vector<std::size_t>>() != p.shape) {
        throw CheckpointError("tensor '" + p.name + "' has shape " + t["shape"].dump() + ", expected " +
                              json(p.shape).dump());
      }
      std::vector<double> data = decode_doubles(t.at("data").get<std::string>());
      if (data.size() != p.size()) throw CheckpointError("tensor '" + p.name + "' has the wrong number of values");
      p.value = std::move(data);
    }
    return model;
  } catch (const CheckpointError&) {
    throw;
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Model& model, const json& metadata) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_json(model, metadata).dump() << '\n';
  if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CheckpointError("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace ucca
