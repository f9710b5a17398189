#include "gapcomp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "gapcomp/errors.hpp"
#include "gapcomp/infonce.hpp"
#include "gapcomp/seeding.hpp"

namespace gapcomp {

void TrainConfig::validate() const {
  if (temperature <= 0.0) throw ConfigError("parameter error: temperature must be > 0");
  if (learning_rate < 0.0) throw ConfigError("parameter error: learning_rate must be >= 0");
  if (epochs < 1) throw ConfigError("parameter error: epochs must be >= 1");
  if (batch_size < 2) throw ConfigError("parameter error: batch_size must be >= 2");
  if (embed_dim < 1) throw ConfigError("parameter error: embed_dim must be >= 1");
}

namespace {

std::vector<EncoderParams> init_encoders(int modality_count, int input_dim, int embed_dim,
                                         std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(input_dim)));
  std::vector<EncoderParams> encoders(modality_count);
  for (int m = 0; m < modality_count; ++m) {
    encoders[m].modality_id = static_cast<std::uint32_t>(m);
    encoders[m].weight.resize(input_dim, embed_dim);
    for (int i = 0; i < input_dim; ++i)
      for (int j = 0; j < embed_dim; ++j) encoders[m].weight(i, j) = gauss(rng);
    encoders[m].bias = Eigen::VectorXd::Zero(embed_dim);
  }
  return encoders;
}

EmbeddingStore encode_split(const SyntheticSplit& split, const std::vector<EncoderParams>& encoders,
                            int embed_dim) {
  const int m = static_cast<int>(encoders.size());
  EmbeddingStore store;
  store.dim = embed_dim;
  store.normalized = true;
  for (int mo = 0; mo < m; ++mo) store.modality_names.push_back("modality_" + std::to_string(mo));

  for (int mo = 0; mo < m; ++mo) {
    if (split.size() == 0) continue;
    Eigen::MatrixXd z = encode(encoders[mo], split.inputs[mo]);
    for (int i = 0; i < split.size(); ++i) {
      EmbeddingRecord r;
      r.concept_id = split.samples[i].concept_id;
      r.modality_id = static_cast<std::uint32_t>(mo);
      r.class_label = split.samples[i].class_label;
      r.multi_labels = split.samples[i].multi_labels;
      r.vector = z.row(i).transpose();
      store.records.push_back(std::move(r));
    }
  }
  return store;
}

}  // namespace

TrainResult train(const SyntheticData& data, const TrainConfig& config) {
  config.validate();
  const int n = data.train.size();
  const int m = data.modality_count;
  if (n < 2) throw ConfigError("parameter error: need at least 2 training samples");
  if (m < 2) throw ConfigError("parameter error: need at least 2 modalities to train");

  std::mt19937_64 rng = make_rng(config.seed);
  TrainResult result;
  result.encoders = init_encoders(m, data.input_dim, config.embed_dim, rng);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int batch = std::min(config.batch_size, n);

  std::vector<Eigen::MatrixXd> batch_inputs(m);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < n) std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int counted = 0;
    for (int start = 0; start < n; start += batch) {
      const int size = std::min(batch, n - start);
      for (int mo = 0; mo < m; ++mo) {
        batch_inputs[mo].resize(size, data.input_dim);
        for (int i = 0; i < size; ++i)
          batch_inputs[mo].row(i) = data.train.inputs[mo].row(order[start + i]);
      }
      InfoNceValue value = infonce_gradients(batch_inputs, result.encoders, config.temperature);
      if (!std::isfinite(value.loss))
        throw NumericError("training error: non-finite loss at epoch " + std::to_string(epoch) +
                           " (temperature " + std::to_string(config.temperature) + ")");
      epoch_loss += value.loss * size;
      counted += size;
      for (int mo = 0; mo < m; ++mo) {
        result.encoders[mo].weight -= config.learning_rate * value.gradients[mo].weight;
        result.encoders[mo].bias -= config.learning_rate * value.gradients[mo].bias;
      }
    }
    result.loss_history.push_back(epoch_loss / counted);
  }

  result.train_store = encode_split(data.train, result.encoders, config.embed_dim);
  result.test_store = encode_split(data.test, result.encoders, config.embed_dim);
  return result;
}

void save_loss_history(const std::vector<double>& history, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("io error: cannot open for writing: " + path.string());
  os << "epoch,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", i, history[i]);
    os << buf;
  }
  if (!os) throw DataError("io error: write failed: " + path.string());
}

}  // namespace gapcomp
