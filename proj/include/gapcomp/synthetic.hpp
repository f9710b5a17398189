#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gapcomp/embedding_store.hpp"

namespace gapcomp {

// Desk-scale stand-in for a paired multimodal corpus. Each semantic class
// has a latent prototype; a sample draws per-modality gaussian noise around
// the prototype and is pushed through a fixed random linear map per modality.
struct SynthConfig {
  int num_concepts = 20;        // number of semantic classes K
  int samples_per_concept = 100;
  int latent_dim = 16;
  int input_dim = 32;           // per modality
  int modality_count = 2;
  double noise_std = 1.0;       // overlapping clusters keep the task off ceiling
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

// Row-aligned sample metadata. class_label is the semantic class; the
// multilabel set adds a coarse superclass shared by several classes, so the
// multilabel task has genuinely co-occurring labels.
struct SyntheticSample {
  std::uint64_t concept_id = 0;  // globally unique pair identity
  std::uint32_t class_label = 0;
  std::vector<std::uint32_t> multi_labels;
};

struct SyntheticSplit {
  std::vector<Eigen::MatrixXd> inputs;  // one n x input_dim matrix per modality
  std::vector<SyntheticSample> samples;

  int size() const { return static_cast<int>(samples.size()); }
};

struct SyntheticData {
  SyntheticSplit train;
  SyntheticSplit test;
  int input_dim = 0;
  int modality_count = 0;
};

// Deterministic given the seed. Samples are split 80/20 into train/test
// within each class. All coordinates are rounded through f32 so that raw
// input stores round-trip bit-exactly through the binary format.
SyntheticData generate_synthetic(const SynthConfig& config);

// Raw inputs packaged as (non-normalized) stores for the gen-synth command.
EmbeddingStore split_to_store(const SyntheticSplit& split, int input_dim, int modality_count);
SyntheticSplit store_to_split(const EmbeddingStore& store);

}  // namespace gapcomp
