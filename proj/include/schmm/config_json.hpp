#pragma once

#include "json.hpp"
#include "schmm/model.hpp"
#include "schmm/trainer.hpp"

namespace schmm {

// JSON (de)serialization for the config structs, shared by the checkpoint
// format and the CLI config file. Unknown keys are rejected so typos in
// experiment manifests fail loudly.

nlohmann::json model_config_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json train_config_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace schmm
