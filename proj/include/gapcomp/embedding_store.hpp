#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gapcomp {

// One multimodal observation. concept_id identifies the paired instance
// (the i of a positive pair), class_label the single-label task target,
// multi_labels the multilabel task targets (kept sorted, may be empty).
struct EmbeddingRecord {
  std::uint64_t concept_id = 0;
  std::uint32_t modality_id = 0;
  std::uint32_t class_label = 0;
  std::vector<std::uint32_t> multi_labels;
  Eigen::VectorXd vector;
};

// A collection of embeddings, fully paired across modalities: every
// concept_id present for one modality must be present for all of them,
// and each (concept_id, modality_id) occurs at most once.
//
// Vectors are held as doubles in memory; the on-disk format stores 32-bit
// floats, so stores loaded from disk always have f32-representable
// coordinates and round-trip bit-exactly.
struct EmbeddingStore {
  int dim = 0;
  std::vector<std::string> modality_names;
  std::vector<EmbeddingRecord> records;
  bool normalized = false;

  int modality_count() const { return static_cast<int>(modality_names.size()); }
};

struct ValidationFinding {
  enum class Kind {
    duplicate_pair,
    missing_modality,
    norm_deviation,
    non_finite,
    dim_mismatch,
    bad_modality_id,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
};

// Binary store format ("GCMP" v1):
//   magic "GCMP", u32 version, u32 record count, u32 M, u32 D,
//   u8 normalized, u8 reserved (granularity flag for centroid stores),
//   M length-prefixed UTF-8 modality names, then per record:
//   u64 concept_id, u32 modality_id, u32 class_label,
//   u32 multilabel count + that many u32 labels, D little-endian f32.
EmbeddingStore load_store(const std::filesystem::path& path);
void save_store(const EmbeddingStore& store, const std::filesystem::path& path);

// Returns a copy with every vector scaled to unit L2 norm.
// Throws NumericError if any vector has zero norm.
EmbeddingStore normalize_store(const EmbeddingStore& store);

// Lists every invariant violation; empty report iff the store is valid.
// Norm deviations are only checked when the normalized flag is set.
ValidationReport validate_store(const EmbeddingStore& store);

// JSONL interop: one record object per line with fields concept_id,
// modality_id, class_label, multi_labels (optional) and vector. Dimension
// and modality count are inferred; modality names default to "modality_<i>".
EmbeddingStore load_jsonl(const std::filesystem::path& path);
void save_jsonl(const EmbeddingStore& store, const std::filesystem::path& path);

namespace detail {
// Shared by the centroid store, which persists in the same format with
// M = 1 and a nonzero reserved byte.
void write_store_file(const EmbeddingStore& store, const std::filesystem::path& path,
                      std::uint8_t reserved);
EmbeddingStore read_store_file(const std::filesystem::path& path, std::uint8_t* reserved_out);
}  // namespace detail

}  // namespace gapcomp
