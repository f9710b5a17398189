#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gapcomp/eval.hpp"
#include "gapcomp/synthetic.hpp"

namespace gapcomp {

// Sections mirror the library config structs; every field has a default so
// an empty file is a valid config. Unknown keys are rejected by name.

struct TrainSection {
  std::vector<double> temperatures = {0.01, 0.07, 0.1, 0.2, 0.4};
  double learning_rate = 0.5;
  int epochs = 100;
  int batch_size = 128;
  int embed_dim = 64;
  std::uint64_t seed = 1;
  // When set, training reads these raw stores instead of generating from
  // the synth section.
  std::string train_store;
  std::string test_store;
};

struct SweepSection {
  std::vector<double> rates = {0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::string> representations = {"centroid", "concat"};
  std::vector<std::string> tasks = {"single_label", "multi_label"};
  std::vector<std::uint64_t> seeds = {1, 2, 3};
};

struct MetricsSection {
  std::string store;
  double temperature = 0.0;  // tag column in the metrics CSV
};

struct CompressSection {
  std::string store;
  std::string granularity = "per_concept";
  double rate = 1.0;
  std::uint64_t seed = 1;
};

struct EvalSection {
  std::string store;
  std::string representation = "centroid";
  double rate = 1.0;
  double temperature = 0.0;  // tag column in the eval CSV
};

struct RunConfig {
  std::string out = "out";
  int jobs = 1;
  std::uint64_t seed = 1;

  SynthConfig synth;
  TrainSection train;
  SplitSpec split;  // seed is derived per use, not a config key
  ClassifierConfig classifier;
  SweepSection sweep;
  MetricsSection metrics;
  CompressSection compress;
  EvalSection eval;
};

// Parses a JSON config. Missing keys keep defaults; an unknown key anywhere
// raises ConfigError naming it. An effective-config sidecar parses back to
// the identical RunConfig.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

// Fully-resolved config as canonical JSON (sorted keys, two-space indent,
// trailing newline). Rerunning a command from this text is byte-identical.
std::string effective_config_json(const RunConfig& config);

}  // namespace gapcomp
