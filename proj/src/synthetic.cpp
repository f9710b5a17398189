#include "gapcomp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gapcomp/errors.hpp"
#include "gapcomp/seeding.hpp"

namespace gapcomp {

void SynthConfig::validate() const {
  if (num_concepts < 2) throw ConfigError("parameter error: num_concepts must be >= 2");
  if (samples_per_concept < 1)
    throw ConfigError("parameter error: samples_per_concept must be >= 1");
  if (latent_dim < 1) throw ConfigError("parameter error: latent_dim must be >= 1");
  if (input_dim < 1) throw ConfigError("parameter error: input_dim must be >= 1");
  if (modality_count < 1) throw ConfigError("parameter error: modality_count must be >= 1");
  if (noise_std < 0.0) throw ConfigError("parameter error: noise_std must be >= 0");
}

namespace {

// f32 rounding keeps generated inputs identical whether they travel through
// the binary store format or stay in memory.
double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

}  // namespace

SyntheticData generate_synthetic(const SynthConfig& config) {
  config.validate();
  const int k = config.num_concepts;
  const int spc = config.samples_per_concept;
  const int m = config.modality_count;

  std::mt19937_64 rng = make_rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Superclass structure: prototypes cluster around group anchors, and each
  // class additionally carries its group as a second label.
  const int num_groups = std::max(2, k / 4);
  Eigen::MatrixXd anchors = gaussian_matrix(num_groups, config.latent_dim, rng);
  Eigen::MatrixXd prototypes(k, config.latent_dim);
  for (int c = 0; c < k; ++c)
    prototypes.row(c) = anchors.row(c % num_groups) + gaussian_matrix(1, config.latent_dim, rng);

  // One fixed random linear map per modality.
  std::vector<Eigen::MatrixXd> transforms;
  transforms.reserve(m);
  for (int mo = 0; mo < m; ++mo)
    transforms.push_back(gaussian_matrix(config.latent_dim, config.input_dim, rng) /
                         std::sqrt(static_cast<double>(config.latent_dim)));

  const int n_train_per_class = std::max(1, (spc * 4) / 5);

  SyntheticData data;
  data.input_dim = config.input_dim;
  data.modality_count = m;
  auto& train = data.train;
  auto& test = data.test;
  const int n_train = k * n_train_per_class;
  const int n_test = k * (spc - n_train_per_class);
  for (int mo = 0; mo < m; ++mo) {
    train.inputs.emplace_back(n_train, config.input_dim);
    test.inputs.emplace_back(n_test, config.input_dim);
  }

  std::uint64_t next_id = 0;
  int train_row = 0;
  int test_row = 0;
  for (int c = 0; c < k; ++c) {
    for (int s = 0; s < spc; ++s) {
      SyntheticSample sample;
      sample.concept_id = next_id++;
      sample.class_label = static_cast<std::uint32_t>(c);
      sample.multi_labels = {static_cast<std::uint32_t>(c),
                             static_cast<std::uint32_t>(k + c % num_groups)};

      const bool is_train = s < n_train_per_class;
      const int row = is_train ? train_row : test_row;
      SyntheticSplit& split = is_train ? train : test;
      for (int mo = 0; mo < m; ++mo) {
        Eigen::VectorXd latent = prototypes.row(c).transpose();
        for (int j = 0; j < config.latent_dim; ++j) latent[j] += config.noise_std * gauss(rng);
        Eigen::VectorXd x = transforms[mo].transpose() * latent;
        for (int j = 0; j < config.input_dim; ++j) split.inputs[mo](row, j) = quantize(x[j]);
      }
      split.samples.push_back(std::move(sample));
      (is_train ? train_row : test_row) += 1;
    }
  }
  return data;
}

EmbeddingStore split_to_store(const SyntheticSplit& split, int input_dim, int modality_count) {
  EmbeddingStore store;
  store.dim = input_dim;
  store.normalized = false;
  for (int mo = 0; mo < modality_count; ++mo)
    store.modality_names.push_back("modality_" + std::to_string(mo));
  store.records.reserve(split.samples.size() * static_cast<std::size_t>(modality_count));
  for (std::size_t i = 0; i < split.samples.size(); ++i) {
    for (int mo = 0; mo < modality_count; ++mo) {
      EmbeddingRecord r;
      r.concept_id = split.samples[i].concept_id;
      r.modality_id = static_cast<std::uint32_t>(mo);
      r.class_label = split.samples[i].class_label;
      r.multi_labels = split.samples[i].multi_labels;
      r.vector = split.inputs[mo].row(static_cast<Eigen::Index>(i)).transpose();
      store.records.push_back(std::move(r));
    }
  }
  return store;
}

SyntheticSplit store_to_split(const EmbeddingStore& store) {
  const int m = store.modality_count();
  SyntheticSplit split;

  // Concepts in first-seen order of their modality-0 record.
  std::vector<const EmbeddingRecord*> primary;
  for (const auto& r : store.records)
    if (r.modality_id == 0) primary.push_back(&r);

  const int n = static_cast<int>(primary.size());
  for (int mo = 0; mo < m; ++mo) split.inputs.emplace_back(n, store.dim);

  std::vector<std::pair<std::uint64_t, int>> row_of;
  row_of.reserve(primary.size());
  for (int i = 0; i < n; ++i) {
    const EmbeddingRecord& r = *primary[i];
    split.samples.push_back({r.concept_id, r.class_label, r.multi_labels});
    row_of.emplace_back(r.concept_id, i);
  }
  std::sort(row_of.begin(), row_of.end());

  for (const auto& r : store.records) {
    auto it = std::lower_bound(row_of.begin(), row_of.end(),
                               std::make_pair(r.concept_id, 0));
    if (it == row_of.end() || it->first != r.concept_id)
      throw DataError("integrity error: record for unknown concept " +
                      std::to_string(r.concept_id));
    split.inputs[r.modality_id].row(it->second) = r.vector.transpose();
  }
  return split;
}

}  // namespace gapcomp
