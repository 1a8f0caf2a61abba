#pragma once

// JSON mappings for the configuration and report types.

#include <json.hpp>

#include "gconv/models.hpp"
#include "gconv/synth.hpp"

namespace gconv {

void to_json(nlohmann::json& j, const SbmConfig& cfg);
void from_json(const nlohmann::json& j, SbmConfig& cfg);

void to_json(nlohmann::json& j, const Provenance& p);

void to_json(nlohmann::json& j, const ModelConfig& cfg);
// Missing keys keep the arch defaults.
void from_json(const nlohmann::json& j, ModelConfig& cfg);

void to_json(nlohmann::json& j, const TrainReport& report);

}  // namespace gconv
