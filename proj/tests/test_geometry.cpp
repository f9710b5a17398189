#include <doctest.h>

#include <cmath>
#include <random>

#include "gapcomp/errors.hpp"
#include "gapcomp/geometry.hpp"
#include "oracles.hpp"

using namespace gapcomp;

namespace {

EmbeddingStore two_point_store() {
  // Modality 0 at (1,0) and (0,1); modality 1 at (3,0) and (0,3).
  EmbeddingStore store;
  store.dim = 2;
  store.modality_names = {"a", "b"};
  auto add = [&](std::uint64_t c, std::uint32_t m, double x, double y) {
    EmbeddingRecord r;
    r.concept_id = c;
    r.modality_id = m;
    r.class_label = static_cast<std::uint32_t>(c);
    r.vector.resize(2);
    r.vector << x, y;
    store.records.push_back(std::move(r));
  };
  add(0, 0, 1.0, 0.0);
  add(1, 0, 0.0, 1.0);
  add(0, 1, 3.0, 0.0);
  add(1, 1, 0.0, 3.0);
  return store;
}

double scaled_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("modality centroids and gap on a hand-built store") {
  EmbeddingStore store = two_point_store();
  Eigen::VectorXd c0 = modality_centroid(store, 0);
  Eigen::VectorXd c1 = modality_centroid(store, 1);
  CHECK(c0[0] == doctest::Approx(0.5));
  CHECK(c0[1] == doctest::Approx(0.5));
  CHECK(c1[0] == doctest::Approx(1.5));
  CHECK(c1[1] == doctest::Approx(1.5));

  GapReport gap = modality_gap(store, 0, 1);
  CHECK(gap.gap == doctest::Approx(std::sqrt(2.0)));
  CHECK(modality_gap(store, 1, 0).gap == doctest::Approx(gap.gap));
  CHECK(gap.modality_pair.first == 0);

  CHECK_THROWS_AS(modality_centroid(store, 7), ConfigError);
}

TEST_CASE("identical clouds have zero gap") {
  std::mt19937_64 rng(31);
  EmbeddingStore store = oracle::random_store(6, 2, 4, 3, rng);
  // Copy modality 0 vectors onto modality 1 records, concept by concept.
  for (auto& r : store.records) {
    if (r.modality_id != 1) continue;
    for (const auto& other : store.records)
      if (other.modality_id == 0 && other.concept_id == r.concept_id) r.vector = other.vector;
  }
  CHECK(modality_gap(store, 0, 1).gap == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("fisher traces match brute-force scatter matrices") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 8; ++trial) {
    int concepts = 4 + static_cast<int>(rng() % 8);
    int dim = 2 + static_cast<int>(rng() % 6);
    int classes = 2 + static_cast<int>(rng() % 3);
    EmbeddingStore store = oracle::random_store(concepts, 2, dim, classes, rng);

    FisherReport report = fisher_ratio(store);
    auto cluster = [](const EmbeddingRecord& r) {
      return static_cast<std::int64_t>(r.class_label);
    };
    oracle::ScatterTraces truth = oracle::brute_force_scatter(store, cluster);

    CHECK(scaled_diff(report.trace_between, truth.between) < 1e-8);
    CHECK(scaled_diff(report.trace_within, truth.within) < 1e-8);
    // S_B + S_W = S_T, so the traces must add up.
    CHECK(scaled_diff(report.trace_between + report.trace_within, truth.total) < 1e-8);
    CHECK(report.fisher == doctest::Approx(truth.between / truth.within).epsilon(1e-10));
  }
}

TEST_CASE("fisher ratio is invariant under orthogonal rotation") {
  std::mt19937_64 rng(35);
  EmbeddingStore store = oracle::random_store(10, 2, 5, 3, rng);
  FisherReport before = fisher_ratio(store);

  Eigen::MatrixXd q = oracle::random_orthogonal(5, rng);
  EmbeddingStore rotated = store;
  for (auto& r : rotated.records) r.vector = q * r.vector;
  FisherReport after = fisher_ratio(rotated);

  CHECK(scaled_diff(before.fisher, after.fisher) < 1e-8);
}

TEST_CASE("degenerate fisher cases are defined") {
  EmbeddingStore store;
  store.dim = 2;
  store.modality_names = {"only"};
  auto add = [&](std::uint64_t c, std::uint32_t label, double x, double y) {
    EmbeddingRecord r;
    r.concept_id = c;
    r.modality_id = 0;
    r.class_label = label;
    r.vector.resize(2);
    r.vector << x, y;
    store.records.push_back(std::move(r));
  };

  SUBCASE("zero within-scatter, positive between-scatter") {
    add(0, 0, 1.0, 0.0);
    add(1, 0, 1.0, 0.0);
    add(2, 1, 0.0, 1.0);
    add(3, 1, 0.0, 1.0);
    FisherReport report = fisher_ratio(store);
    CHECK(std::isinf(report.fisher));
    CHECK(report.trace_within == 0.0);
    CHECK(report.trace_between > 0.0);
  }
  SUBCASE("all records identical") {
    add(0, 0, 1.0, 1.0);
    add(1, 1, 1.0, 1.0);
    FisherReport report = fisher_ratio(store);
    CHECK(report.fisher == 0.0);
  }
  SUBCASE("one cluster is rejected") {
    add(0, 0, 1.0, 0.0);
    add(1, 0, 0.0, 1.0);
    CHECK_THROWS_AS(fisher_ratio(store), ConfigError);
  }
}

TEST_CASE("custom cluster assignment can cluster by modality") {
  std::mt19937_64 rng(37);
  EmbeddingStore store = oracle::random_store(8, 2, 4, 1, rng);
  // All class labels equal: the default clustering has one cluster and throws,
  // but clustering by modality works.
  CHECK_THROWS_AS(fisher_ratio(store), ConfigError);
  FisherReport by_modality = fisher_ratio(store, [](const EmbeddingRecord& r) {
    return static_cast<std::int64_t>(r.modality_id);
  });
  CHECK(by_modality.num_clusters == 2);
  CHECK(std::isfinite(by_modality.fisher));
}

TEST_CASE("variance spectrum of an axis-aligned cloud") {
  EmbeddingStore store;
  store.dim = 3;
  store.modality_names = {"only"};
  for (int i = 0; i < 4; ++i) {
    EmbeddingRecord r;
    r.concept_id = static_cast<std::uint64_t>(i);
    r.modality_id = 0;
    r.class_label = 0;
    r.vector.resize(3);
    r.vector << static_cast<double>(i), 0.0, 0.0;  // all variance on axis 0
    store.records.push_back(std::move(r));
  }
  VarianceSpectrum spectrum = explained_variance_spectrum(store);
  REQUIRE(spectrum.eigenvalues.size() == 3);
  // Sample variance of {0,1,2,3} is 5/3.
  CHECK(spectrum.eigenvalues[0] == doctest::Approx(5.0 / 3.0));
  CHECK(spectrum.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(spectrum.cumulative_fraction[0] == doctest::Approx(1.0));
  CHECK(spectrum.cumulative_fraction[2] == doctest::Approx(1.0));
}

TEST_CASE("gram and covariance routes agree") {
  std::mt19937_64 rng(39);
  // n < d forces the Gram route; check it against the covariance eigenvalues
  // computed directly here.
  EmbeddingStore store = oracle::random_store(3, 2, 9, 2, rng);  // 6 records, dim 9
  VarianceSpectrum spectrum = explained_variance_spectrum(store);

  Eigen::MatrixXd x(6, 9);
  for (int i = 0; i < 6; ++i) x.row(i) = store.records[i].vector.transpose();
  x.rowwise() -= x.colwise().mean();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((x.transpose() * x) / 5.0);
  Eigen::VectorXd direct = solver.eigenvalues();

  REQUIRE(spectrum.eigenvalues.size() == 9);
  for (int i = 0; i < 9; ++i) {
    double expected = std::max(direct[8 - i], 0.0);
    CHECK(spectrum.eigenvalues[i] == doctest::Approx(expected).epsilon(1e-9));
  }
  // Descending, non-negative, cumulative ends at 1.
  for (int i = 1; i < 9; ++i) CHECK(spectrum.eigenvalues[i] <= spectrum.eigenvalues[i - 1]);
  CHECK(spectrum.cumulative_fraction.back() == doctest::Approx(1.0));
}

TEST_CASE("spectrum rejects degenerate stores") {
  EmbeddingStore store;
  store.dim = 2;
  store.modality_names = {"only"};
  EmbeddingRecord r;
  r.concept_id = 0;
  r.modality_id = 0;
  r.class_label = 0;
  r.vector = Eigen::VectorXd::Ones(2);

  SUBCASE("single record") {
    store.records.push_back(r);
    CHECK_THROWS_AS(explained_variance_spectrum(store), ConfigError);
  }
  SUBCASE("zero variance") {
    store.records.push_back(r);
    r.concept_id = 1;
    store.records.push_back(r);
    CHECK_THROWS_AS(explained_variance_spectrum(store), NumericError);
  }
}
