#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gapcomp/embedding_store.hpp"

namespace gapcomp {

enum class Granularity { per_concept, per_class };

struct CentroidEntry {
  std::uint64_t id = 0;  // concept id or class label, by granularity
  std::uint32_t class_label = 0;
  std::vector<std::uint32_t> multi_labels;
  Eigen::VectorXd vector;
};

struct CentroidStore {
  int dim = 0;
  Granularity granularity = Granularity::per_concept;
  std::vector<CentroidEntry> entries;
  bool renormalized = false;
};

// per_concept: one centroid per paired sample, the mean of its M modality
// embeddings. per_class: the mean over all records (every modality, every
// concept) sharing a class label. Requires a normalized, fully paired store.
// When an explicit class universe is given, labels without records are
// skipped and reported through skipped_labels.
CentroidStore concept_centroids(const EmbeddingStore& store, Granularity granularity,
                                const std::vector<std::uint32_t>* class_universe = nullptr,
                                std::vector<std::uint32_t>* skipped_labels = nullptr);

// Scales every centroid to unit norm. Throws NumericError naming the entry
// id on a zero-norm centroid (the antipodal large-gap failure mode).
CentroidStore renormalize_centroids(const CentroidStore& cs);

// A globally shared random coordinate subset: the row-subselection operator.
struct SelectionMask {
  int source_dim = 0;
  int target_dim = 0;
  std::vector<int> indices;  // strictly increasing, in [0, source_dim)
  std::uint64_t seed = 0;
};

// Uniformly random size-T subset of [0, D), sorted, deterministic given
// (D, T, seed). Throws ConfigError unless 1 <= T <= D.
SelectionMask make_rfs_mask(int source_dim, int target_dim, std::uint64_t seed);

// Keeps the masked coordinates of each row; optionally rescales each output
// to unit norm (zero-norm outputs raise NumericError).
Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& rows, const SelectionMask& mask,
                           bool renormalize);
Eigen::VectorXd apply_mask(const Eigen::VectorXd& vector, const SelectionMask& mask,
                           bool renormalize);

// One vector per concept: all M modality embeddings stacked in modality-id
// order (dimension M*D), concepts in ascending id order.
struct ConcatEntry {
  std::uint64_t concept_id = 0;
  std::uint32_t class_label = 0;
  std::vector<std::uint32_t> multi_labels;
  Eigen::VectorXd vector;
};
std::vector<ConcatEntry> concat_baseline(const EmbeddingStore& store);

struct ReprStats {
  std::int64_t entries = 0;
  std::int64_t dim = 0;
};

// (entries_out * dim_out) / (entries_in * dim_in); per-concept centroids
// without feature selection give exactly 1/M.
double compression_ratio(ReprStats original, ReprStats compressed);

// Centroid stores persist in the embedding store format with M = 1 and the
// granularity in the header's reserved byte (1 = per_concept, 2 = per_class).
void save_centroids(const CentroidStore& cs, const std::filesystem::path& path);
CentroidStore load_centroids(const std::filesystem::path& path);

// Masks serialize as JSON: {source_dim, target_dim, seed, indices}.
void save_mask(const SelectionMask& mask, const std::filesystem::path& path);
SelectionMask load_mask(const std::filesystem::path& path);

}  // namespace gapcomp
