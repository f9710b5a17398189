#include "gapcomp/encoder.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "gapcomp/binio.hpp"
#include "gapcomp/errors.hpp"

namespace gapcomp {

namespace {
constexpr char kMagic[4] = {'G', 'E', 'N', 'C'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

Eigen::MatrixXd encode(const EncoderParams& params, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != params.weight.rows())
    throw ConfigError("parameter error: input dimension " + std::to_string(inputs.cols()) +
                      " does not match encoder input dimension " +
                      std::to_string(params.weight.rows()));
  Eigen::MatrixXd out = inputs * params.weight;
  out.rowwise() += params.bias.transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    if (norm == 0.0)
      throw NumericError("degenerate-vector error: zero pre-normalization norm at row " +
                         std::to_string(i));
    out.row(i) /= norm;
  }
  return out;
}

void save_encoders(const std::vector<EncoderParams>& encoders,
                   const std::filesystem::path& path) {
  if (encoders.empty()) throw ConfigError("parameter error: no encoders to save");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("io error: cannot open for writing: " + path.string());

  os.write(kMagic, 4);
  binio::write_u32(os, kVersion);
  binio::write_u32(os, static_cast<std::uint32_t>(encoders.size()));
  binio::write_u32(os, static_cast<std::uint32_t>(encoders.front().input_dim()));
  binio::write_u32(os, static_cast<std::uint32_t>(encoders.front().embed_dim()));
  for (const auto& e : encoders) {
    binio::write_u32(os, e.modality_id);
    for (int i = 0; i < e.input_dim(); ++i)
      for (int j = 0; j < e.embed_dim(); ++j) binio::write_f64(os, e.weight(i, j));
    for (int j = 0; j < e.embed_dim(); ++j) binio::write_f64(os, e.bias[j]);
  }
  os.flush();
  if (!os) throw DataError("io error: write failed: " + path.string());
}

std::vector<EncoderParams> load_encoders(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("io error: cannot open: " + path.string());

  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("format error: bad magic bytes in " + path.string());
  std::uint32_t version = binio::read_u32(is, "version");
  if (version != kVersion)
    throw DataError("format error: unsupported version " + std::to_string(version));

  std::uint32_t m = binio::read_u32(is, "encoder count");
  std::uint32_t input_dim = binio::read_u32(is, "input_dim");
  std::uint32_t embed_dim = binio::read_u32(is, "embed_dim");

  std::vector<EncoderParams> encoders;
  encoders.reserve(m);
  for (std::uint32_t e = 0; e < m; ++e) {
    EncoderParams p;
    p.modality_id = binio::read_u32(is, "modality_id");
    p.weight.resize(input_dim, embed_dim);
    for (std::uint32_t i = 0; i < input_dim; ++i)
      for (std::uint32_t j = 0; j < embed_dim; ++j)
        p.weight(i, j) = binio::read_f64(is, "weight entry");
    p.bias.resize(embed_dim);
    for (std::uint32_t j = 0; j < embed_dim; ++j) p.bias[j] = binio::read_f64(is, "bias entry");
    encoders.push_back(std::move(p));
  }
  return encoders;
}

}  // namespace gapcomp
