#pragma once

// Single-document JSON checkpoints:
// {version, config, vocabs, tensors: {name: {shape, data}}}, where data is
// base64 of little-endian fp64 values. Output is a pure function of the
// model, so equal models give byte-identical files.

#include <string>

#include "json.hpp"
#include "ucca/model.hpp"

namespace ucca {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json network_config_to_json(const nn::NetworkConfig& config);
// Unknown keys are rejected; missing keys keep their defaults.
nn::NetworkConfig network_config_from_json(const nlohmann::json& j);

nlohmann::json checkpoint_to_json(const Model& model, const nlohmann::json& metadata = nlohmann::json::object());
Model checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Model& model,
                     const nlohmann::json& metadata = nlohmann::json::object());
Model load_checkpoint(const std::string& path);

}  // namespace ucca
