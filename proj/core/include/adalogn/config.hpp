#pragma once

// JSON configuration documents. Every reader starts from the values already
// in the target struct and overwrites only the keys present; unknown keys
// and ill-typed values raise ConfigError.
//
// Global document: {"seed": N, "model": {...}, "train": {...},
//                   "generator": {...}}

#include <string>
#include <string_view>

#include "adalogn/model.hpp"
#include "adalogn/synth.hpp"
#include "adalogn/training.hpp"

namespace adalogn {

struct GlobalConfig {
  ModelConfig model;
  TrainConfig train;
  GeneratorSpec generator;
};

void merge_model_config(ModelConfig& cfg, std::string_view json);
void merge_train_config(TrainConfig& cfg, std::string_view json);
void merge_generator_spec(GeneratorSpec& spec, std::string_view json);
/// A top-level "seed" is copied into every section.
void merge_global_config(GlobalConfig& cfg, std::string_view json);

std::string to_json(const ModelConfig& cfg);
std::string to_json(const TrainConfig& cfg);
std::string to_json(const GeneratorSpec& spec);

/// Checkpoint directory: `params.bin` (binary parameter groups) and
/// `model.json` (the ModelConfig, vocabulary included).
void save_model(const Model& model, const std::string& dir);
Model load_model(const std::string& dir);

}  // namespace adalogn
