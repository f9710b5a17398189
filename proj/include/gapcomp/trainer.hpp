#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gapcomp/embedding_store.hpp"
#include "gapcomp/encoder.hpp"
#include "gapcomp/synthetic.hpp"

namespace gapcomp {

struct TrainConfig {
  double temperature = 0.07;
  double learning_rate = 0.5;
  int epochs = 100;
  int batch_size = 128;  // >= training set size means full-batch descent
  int embed_dim = 64;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct TrainResult {
  std::vector<EncoderParams> encoders;
  std::vector<double> loss_history;  // one entry per epoch
  EmbeddingStore train_store;
  EmbeddingStore test_store;
};

// Plain gradient descent on the symmetric InfoNCE objective, mini-batched
// with seeded shuffling. Deterministic given (data, config). Emits
// normalized stores for both splits encoded with the final parameters.
// Throws NumericError naming the epoch if the loss becomes non-finite.
TrainResult train(const SyntheticData& data, const TrainConfig& config);

// Loss history CSV with header "epoch,loss".
void save_loss_history(const std::vector<double>& history, const std::filesystem::path& path);

}  // namespace gapcomp
