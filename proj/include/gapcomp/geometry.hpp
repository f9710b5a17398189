#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "gapcomp/embedding_store.hpp"

namespace gapcomp {

struct GapReport {
  std::pair<std::uint32_t, std::uint32_t> modality_pair;
  double gap = 0.0;  // symmetric, >= 0
};

// fisher is trace_between / trace_within, +infinity when the within-scatter
// vanishes but the between-scatter does not, and 0 when both vanish.
struct FisherReport {
  double fisher = 0.0;
  double trace_between = 0.0;
  double trace_within = 0.0;
  int num_clusters = 0;
};

struct VarianceSpectrum {
  std::vector<double> eigenvalues;          // descending, non-negative
  std::vector<double> cumulative_fraction;  // non-decreasing, ends at 1
};

// Mean of all embeddings of modality m. Throws ConfigError if the modality
// has no records.
Eigen::VectorXd modality_centroid(const EmbeddingStore& store, std::uint32_t modality);

// Euclidean distance between two modality centroids.
GapReport modality_gap(const EmbeddingStore& store, std::uint32_t m, std::uint32_t n);

using ClusterAssignment = std::function<std::int64_t(const EmbeddingRecord&)>;

// Scatter traces over all embeddings pooled across modalities, computed from
// squared norms without materializing D x D matrices. Requires >= 2 clusters.
FisherReport fisher_ratio(const EmbeddingStore& store, const ClusterAssignment& cluster_of);

// Default clustering: class labels.
FisherReport fisher_ratio(const EmbeddingStore& store);

// Eigenvalues of the sample covariance of all embeddings (mean-centered,
// pooled across modalities), descending, with cumulative variance fractions.
// Uses the Gram matrix when the sample count is below the dimension.
// Requires >= 2 records and nonzero total variance.
VarianceSpectrum explained_variance_spectrum(const EmbeddingStore& store);

}  // namespace gapcomp
