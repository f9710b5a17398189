#include <doctest.h>

#include <set>

#include "gapcomp/embedding_store.hpp"
#include "gapcomp/errors.hpp"
#include "gapcomp/synthetic.hpp"
#include "oracles.hpp"

using namespace gapcomp;

namespace {

SynthConfig small_config() {
  SynthConfig config;
  config.num_concepts = 6;
  config.samples_per_concept = 10;
  config.latent_dim = 4;
  config.input_dim = 7;
  config.modality_count = 2;
  config.noise_std = 0.5;
  config.seed = 42;
  return config;
}

bool splits_equal(const SyntheticSplit& a, const SyntheticSplit& b) {
  if (a.samples.size() != b.samples.size() || a.inputs.size() != b.inputs.size()) return false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].concept_id != b.samples[i].concept_id ||
        a.samples[i].class_label != b.samples[i].class_label ||
        a.samples[i].multi_labels != b.samples[i].multi_labels)
      return false;
  }
  for (std::size_t m = 0; m < a.inputs.size(); ++m)
    if (a.inputs[m] != b.inputs[m]) return false;
  return true;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  SyntheticData a = generate_synthetic(small_config());
  SyntheticData b = generate_synthetic(small_config());
  CHECK(splits_equal(a.train, b.train));
  CHECK(splits_equal(a.test, b.test));

  SynthConfig other = small_config();
  other.seed = 43;
  SyntheticData c = generate_synthetic(other);
  CHECK(!splits_equal(a.train, c.train));
}

TEST_CASE("split sizes follow the 80/20 rule per class") {
  SynthConfig config = small_config();
  SyntheticData data = generate_synthetic(config);
  const int per_class_train = (config.samples_per_concept * 4) / 5;
  CHECK(data.train.size() == config.num_concepts * per_class_train);
  CHECK(data.test.size() ==
        config.num_concepts * (config.samples_per_concept - per_class_train));
  CHECK(data.input_dim == config.input_dim);
  CHECK(data.modality_count == config.modality_count);
  REQUIRE(data.train.inputs.size() == 2);
  CHECK(data.train.inputs[0].rows() == data.train.size());
  CHECK(data.train.inputs[0].cols() == config.input_dim);
}

TEST_CASE("labels carry the class and its superclass") {
  SynthConfig config = small_config();  // 6 classes -> 2 groups
  SyntheticData data = generate_synthetic(config);
  const std::uint32_t k = static_cast<std::uint32_t>(config.num_concepts);
  const std::uint32_t groups = 2;
  for (const auto& s : data.train.samples) {
    CHECK(s.class_label < k);
    REQUIRE(s.multi_labels.size() == 2);
    CHECK(s.multi_labels[0] == s.class_label);
    CHECK(s.multi_labels[1] == k + s.class_label % groups);
  }
}

TEST_CASE("concept ids are unique across both splits") {
  SyntheticData data = generate_synthetic(small_config());
  std::set<std::uint64_t> ids;
  for (const auto& s : data.train.samples) CHECK(ids.insert(s.concept_id).second);
  for (const auto& s : data.test.samples) CHECK(ids.insert(s.concept_id).second);
}

TEST_CASE("coordinates are f32 representable") {
  SyntheticData data = generate_synthetic(small_config());
  for (const auto& inputs : data.train.inputs)
    for (Eigen::Index i = 0; i < inputs.size(); ++i)
      CHECK(inputs(i) == oracle::quantize(inputs(i)));
}

TEST_CASE("split/store conversions round trip") {
  SynthConfig config = small_config();
  config.modality_count = 3;
  SyntheticData data = generate_synthetic(config);

  EmbeddingStore store = split_to_store(data.train, data.input_dim, data.modality_count);
  CHECK(validate_store(store).ok());
  CHECK(!store.normalized);
  CHECK(store.records.size() ==
        static_cast<std::size_t>(data.train.size()) * 3);

  SyntheticSplit back = store_to_split(store);
  CHECK(splits_equal(data.train, back));
}

TEST_CASE("store round trip through disk preserves the split exactly") {
  SyntheticData data = generate_synthetic(small_config());
  EmbeddingStore store = split_to_store(data.test, data.input_dim, data.modality_count);
  oracle::TempDir dir("synth_disk");
  save_store(store, dir / "raw.gcmp");
  SyntheticSplit back = store_to_split(load_store(dir / "raw.gcmp"));
  CHECK(splits_equal(data.test, back));
}

TEST_CASE("config validation rejects out-of-range values") {
  SynthConfig config = small_config();
  SUBCASE("concepts") { config.num_concepts = 1; }
  SUBCASE("samples") { config.samples_per_concept = 0; }
  SUBCASE("latent dim") { config.latent_dim = 0; }
  SUBCASE("input dim") { config.input_dim = 0; }
  SUBCASE("modalities") { config.modality_count = 0; }
  SUBCASE("noise") { config.noise_std = -0.1; }
  CHECK_THROWS_AS(config.validate(), ConfigError);
}
