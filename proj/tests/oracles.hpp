#pragma once

// Independent reference implementations the tests check the library against.
// These are deliberately the slow, obvious versions: direct formulas,
// central finite differences, explicit scatter matrices, exhaustive
// rankings. Keep them free of the library's own shortcuts.

#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gapcomp/embedding_store.hpp"
#include "gapcomp/encoder.hpp"
#include "gapcomp/geometry.hpp"
#include "gapcomp/infonce.hpp"

namespace oracle {

// Textbook InfoNCE, no max-subtraction stabilization. Only valid where the
// raw exponentials stay in range.
inline double naive_infonce_directed(const Eigen::MatrixXd& anchors,
                                     const Eigen::MatrixXd& targets, double temperature) {
  const Eigen::Index n = anchors.rows();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double denom = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      denom += std::exp(anchors.row(i).dot(targets.row(j)) / temperature);
    loss += -std::log(std::exp(anchors.row(i).dot(targets.row(i)) / temperature) / denom);
  }
  return loss / static_cast<double>(n);
}

// The full forward pass the trainer differentiates: encode every modality,
// average the symmetric pair losses.
inline double full_pair_loss(const std::vector<Eigen::MatrixXd>& inputs,
                             const std::vector<gapcomp::EncoderParams>& params,
                             double temperature) {
  std::vector<Eigen::MatrixXd> z;
  z.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i)
    z.push_back(gapcomp::encode(params[i], inputs[i]));
  double loss = 0.0;
  int pairs = 0;
  for (std::size_t a = 0; a < params.size(); ++a)
    for (std::size_t b = a + 1; b < params.size(); ++b) {
      loss += gapcomp::infonce_symmetric(z[a], z[b], temperature);
      ++pairs;
    }
  return loss / pairs;
}

// Central finite differences of full_pair_loss with respect to every weight
// and bias entry of every encoder.
inline std::vector<gapcomp::EncoderGradients> fd_encoder_gradients(
    const std::vector<Eigen::MatrixXd>& inputs, std::vector<gapcomp::EncoderParams> params,
    double temperature, double h) {
  std::vector<gapcomp::EncoderGradients> grads(params.size());
  for (std::size_t m = 0; m < params.size(); ++m) {
    grads[m].weight.resize(params[m].weight.rows(), params[m].weight.cols());
    grads[m].bias.resize(params[m].bias.size());
    for (Eigen::Index i = 0; i < params[m].weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < params[m].weight.cols(); ++j) {
        const double saved = params[m].weight(i, j);
        params[m].weight(i, j) = saved + h;
        const double up = full_pair_loss(inputs, params, temperature);
        params[m].weight(i, j) = saved - h;
        const double down = full_pair_loss(inputs, params, temperature);
        params[m].weight(i, j) = saved;
        grads[m].weight(i, j) = (up - down) / (2.0 * h);
      }
    }
    for (Eigen::Index j = 0; j < params[m].bias.size(); ++j) {
      const double saved = params[m].bias[j];
      params[m].bias[j] = saved + h;
      const double up = full_pair_loss(inputs, params, temperature);
      params[m].bias[j] = saved - h;
      const double down = full_pair_loss(inputs, params, temperature);
      params[m].bias[j] = saved;
      grads[m].bias[j] = (up - down) / (2.0 * h);
    }
  }
  return grads;
}

// Max over all parameter entries of |analytic - fd| / max(1, |fd|).
inline double max_gradient_error(const std::vector<gapcomp::EncoderGradients>& analytic,
                                 const std::vector<gapcomp::EncoderGradients>& fd) {
  double worst = 0.0;
  for (std::size_t m = 0; m < analytic.size(); ++m) {
    for (Eigen::Index i = 0; i < analytic[m].weight.size(); ++i) {
      double err = std::abs(analytic[m].weight(i) - fd[m].weight(i)) /
                   std::max(1.0, std::abs(fd[m].weight(i)));
      worst = std::max(worst, err);
    }
    for (Eigen::Index j = 0; j < analytic[m].bias.size(); ++j) {
      double err = std::abs(analytic[m].bias[j] - fd[m].bias[j]) /
                   std::max(1.0, std::abs(fd[m].bias[j]));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

struct ScatterTraces {
  double between = 0.0;
  double within = 0.0;
  double total = 0.0;  // scatter around the global mean
};

// Explicit D x D scatter matrices, traces taken at the end.
inline ScatterTraces brute_force_scatter(const gapcomp::EmbeddingStore& store,
                                         const gapcomp::ClusterAssignment& cluster_of) {
  const Eigen::Index d = store.dim;
  std::vector<std::int64_t> ids;
  for (const auto& r : store.records) ids.push_back(cluster_of(r));
  std::vector<std::int64_t> unique_ids = ids;
  std::sort(unique_ids.begin(), unique_ids.end());
  unique_ids.erase(std::unique(unique_ids.begin(), unique_ids.end()), unique_ids.end());

  Eigen::VectorXd global = Eigen::VectorXd::Zero(d);
  for (const auto& r : store.records) global += r.vector;
  global /= static_cast<double>(store.records.size());

  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd st = Eigen::MatrixXd::Zero(d, d);
  for (std::int64_t id : unique_ids) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < store.records.size(); ++i) {
      if (ids[i] != id) continue;
      mean += store.records[i].vector;
      ++count;
    }
    mean /= static_cast<double>(count);
    sb += static_cast<double>(count) * (mean - global) * (mean - global).transpose();
    for (std::size_t i = 0; i < store.records.size(); ++i) {
      if (ids[i] != id) continue;
      sw += (store.records[i].vector - mean) * (store.records[i].vector - mean).transpose();
    }
  }
  for (const auto& r : store.records)
    st += (r.vector - global) * (r.vector - global).transpose();

  return {sb.trace(), sw.trace(), st.trace()};
}

// Haar-ish random orthogonal matrix: QR of a gaussian with signs fixed from
// the diagonal of R.
inline Eigen::MatrixXd random_orthogonal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = gauss(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Top-k accuracy by sorting each score row outright (descending score,
// ascending index on ties) and scanning the first k entries.
inline double exhaustive_topk(const Eigen::MatrixXd& scores,
                              const std::vector<std::uint32_t>& classes,
                              const std::vector<std::uint32_t>& labels, int k) {
  int hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::vector<int> order(classes.size());
    for (std::size_t j = 0; j < classes.size(); ++j) order[j] = static_cast<int>(j);
    const Eigen::RowVectorXd row = scores.row(static_cast<Eigen::Index>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return a < b;
    });
    for (int pos = 0; pos < k && pos < static_cast<int>(order.size()); ++pos) {
      if (classes[static_cast<std::size_t>(order[pos])] == labels[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

inline double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

// Fully paired random store: n_concepts x m records, gaussian coordinates
// rounded through f32 so binary round trips are exact.
inline gapcomp::EmbeddingStore random_store(int n_concepts, int modalities, int dim,
                                            int n_classes, std::mt19937_64& rng,
                                            bool normalized = false) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  gapcomp::EmbeddingStore store;
  store.dim = dim;
  store.normalized = false;
  for (int mo = 0; mo < modalities; ++mo)
    store.modality_names.push_back("modality_" + std::to_string(mo));
  for (int c = 0; c < n_concepts; ++c) {
    for (int mo = 0; mo < modalities; ++mo) {
      gapcomp::EmbeddingRecord r;
      r.concept_id = static_cast<std::uint64_t>(c);
      r.modality_id = static_cast<std::uint32_t>(mo);
      r.class_label = static_cast<std::uint32_t>(c % n_classes);
      r.multi_labels = {r.class_label};
      r.vector.resize(dim);
      for (int j = 0; j < dim; ++j) r.vector[j] = quantize(gauss(rng));
      store.records.push_back(std::move(r));
    }
  }
  if (normalized) {
    for (auto& r : store.records) r.vector /= r.vector.norm();
    store.normalized = true;
  }
  return store;
}

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
