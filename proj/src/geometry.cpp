#include "gapcomp/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "gapcomp/errors.hpp"

namespace gapcomp {

Eigen::VectorXd modality_centroid(const EmbeddingStore& store, std::uint32_t modality) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(store.dim);
  std::int64_t count = 0;
  for (const auto& r : store.records) {
    if (r.modality_id != modality) continue;
    sum += r.vector;
    ++count;
  }
  if (count == 0)
    throw ConfigError("parameter error: modality " + std::to_string(modality) +
                      " has no records");
  return sum / static_cast<double>(count);
}

GapReport modality_gap(const EmbeddingStore& store, std::uint32_t m, std::uint32_t n) {
  GapReport report;
  report.modality_pair = {m, n};
  report.gap = (modality_centroid(store, m) - modality_centroid(store, n)).norm();
  return report;
}

FisherReport fisher_ratio(const EmbeddingStore& store, const ClusterAssignment& cluster_of) {
  std::map<std::int64_t, std::pair<Eigen::VectorXd, std::int64_t>> clusters;
  Eigen::VectorXd global_sum = Eigen::VectorXd::Zero(store.dim);
  for (const auto& r : store.records) {
    auto [it, inserted] =
        clusters.try_emplace(cluster_of(r), Eigen::VectorXd::Zero(store.dim), 0);
    it->second.first += r.vector;
    it->second.second += 1;
    global_sum += r.vector;
  }
  if (clusters.size() < 2)
    throw ConfigError("parameter error: fisher_ratio needs >= 2 clusters, got " +
                      std::to_string(clusters.size()));

  const double total = static_cast<double>(store.records.size());
  const Eigen::VectorXd global_mean = global_sum / total;

  FisherReport report;
  report.num_clusters = static_cast<int>(clusters.size());
  for (auto& [id, acc] : clusters) {
    acc.first /= static_cast<double>(acc.second);  // cluster mean
    report.trace_between += static_cast<double>(acc.second) *
                            (acc.first - global_mean).squaredNorm();
  }
  for (const auto& r : store.records) {
    const auto& mean = clusters.at(cluster_of(r)).first;
    report.trace_within += (r.vector - mean).squaredNorm();
  }

  if (report.trace_within > 0.0) {
    report.fisher = report.trace_between / report.trace_within;
  } else if (report.trace_between > 0.0) {
    report.fisher = std::numeric_limits<double>::infinity();
  } else {
    report.fisher = 0.0;
  }
  return report;
}

FisherReport fisher_ratio(const EmbeddingStore& store) {
  return fisher_ratio(store, [](const EmbeddingRecord& r) {
    return static_cast<std::int64_t>(r.class_label);
  });
}

VarianceSpectrum explained_variance_spectrum(const EmbeddingStore& store) {
  const Eigen::Index n = static_cast<Eigen::Index>(store.records.size());
  const Eigen::Index d = store.dim;
  if (n < 2)
    throw ConfigError("parameter error: explained_variance_spectrum needs >= 2 records");

  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) x.row(i) = store.records[i].vector.transpose();
  x.rowwise() -= x.colwise().mean();

  // X^T X and X X^T share nonzero eigenvalues; decompose the smaller one.
  Eigen::VectorXd eigs;
  if (n < d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((x * x.transpose()) /
                                                          static_cast<double>(n - 1));
    eigs = solver.eigenvalues();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((x.transpose() * x) /
                                                          static_cast<double>(n - 1));
    eigs = solver.eigenvalues();
  }

  VarianceSpectrum spectrum;
  spectrum.eigenvalues.assign(static_cast<std::size_t>(d), 0.0);
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    double v = eigs[eigs.size() - 1 - i];  // solver returns ascending order
    spectrum.eigenvalues[static_cast<std::size_t>(i)] = std::max(v, 0.0);
  }

  double total = 0.0;
  for (double v : spectrum.eigenvalues) total += v;
  if (total <= 0.0)
    throw NumericError("degenerate-spectrum error: zero total variance (all records identical)");

  spectrum.cumulative_fraction.reserve(spectrum.eigenvalues.size());
  double running = 0.0;
  for (double v : spectrum.eigenvalues) {
    running += v;
    spectrum.cumulative_fraction.push_back(running / total);
  }
  return spectrum;
}

}  // namespace gapcomp
