#pragma once

#include <string>

#include "json.hpp"

#include "hasqa/corpus.hpp"
#include "hasqa/model.hpp"
#include "hasqa/pipeline.hpp"
#include "hasqa/synthetic.hpp"

namespace hasqa {

/// Everything a run needs, read from one flat JSON object. Missing keys keep
/// the desk-scale defaults; unknown keys are rejected.
struct RunConfig {
  EncoderConfig encoder;
  TrainConfig train;
  LoadLimits limits;
  int threads = 0;  // 0 leaves the OpenMP default
  std::string wordVectors;
  bool freezeWordVectors = false;
};

RunConfig runConfigFromJson(const nlohmann::json& obj);
nlohmann::json runConfigToJson(const RunConfig& config);
RunConfig loadRunConfig(const std::string& path);

SyntheticConfig syntheticConfigFromJson(const nlohmann::json& obj);
nlohmann::json syntheticConfigToJson(const SyntheticConfig& config);
SyntheticConfig loadSyntheticConfig(const std::string& path);

}  // namespace hasqa
