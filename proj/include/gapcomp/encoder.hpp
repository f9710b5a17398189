#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace gapcomp {

// Affine map followed by row normalization: z = (x W + b) / ||x W + b||.
// weight is input_dim x embed_dim so that batches multiply as rows.
struct EncoderParams {
  std::uint32_t modality_id = 0;
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;

  int input_dim() const { return static_cast<int>(weight.rows()); }
  int embed_dim() const { return static_cast<int>(weight.cols()); }
};

// Maps a batch (rows of inputs) to unit-norm embeddings.
// Throws NumericError if any pre-normalization row has zero norm,
// ConfigError on a dimension mismatch.
Eigen::MatrixXd encode(const EncoderParams& params, const Eigen::MatrixXd& inputs);

// Binary sidecar ("GENC" v1): magic, u32 version, u32 M, u32 input_dim,
// u32 embed_dim, then per modality u32 modality_id + row-major f64 weight
// + f64 bias.
void save_encoders(const std::vector<EncoderParams>& encoders,
                   const std::filesystem::path& path);
std::vector<EncoderParams> load_encoders(const std::filesystem::path& path);

}  // namespace gapcomp
