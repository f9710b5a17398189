#include "gapcomp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "gapcomp/errors.hpp"
#include "gapcomp/seeding.hpp"

namespace gapcomp {

namespace {

LabeledVectors take_rows(const LabeledVectors& data, const std::vector<int>& rows) {
  LabeledVectors out;
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), data.vectors.cols());
  out.class_labels.reserve(rows.size());
  out.multi_labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.vectors.row(static_cast<Eigen::Index>(i)) = data.vectors.row(rows[i]);
    out.class_labels.push_back(data.class_labels[rows[i]]);
    out.multi_labels.push_back(data.multi_labels[rows[i]]);
  }
  return out;
}

std::vector<std::uint32_t> sorted_classes(const std::vector<std::uint32_t>& labels) {
  std::set<std::uint32_t> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

}  // namespace

SplitResult split_train_test(const LabeledVectors& data, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0)
    throw ConfigError("parameter error: train_fraction must be in (0,1)");
  if (data.size() != static_cast<int>(data.multi_labels.size()) ||
      data.size() != static_cast<int>(data.vectors.rows()))
    throw ConfigError("parameter error: misaligned labeled vectors");

  std::map<std::uint32_t, std::vector<int>> by_class;
  for (int i = 0; i < data.size(); ++i) by_class[data.class_labels[i]].push_back(i);

  SplitResult result;
  std::vector<int> train_rows, test_rows;
  std::mt19937_64 rng = make_rng(spec.seed);
  for (auto& [label, rows] : by_class) {
    if (static_cast<int>(rows.size()) < spec.min_per_class) {
      result.dropped_classes.push_back(label);
      continue;
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    int n = static_cast<int>(rows.size());
    int n_train = static_cast<int>(spec.train_fraction * n);
    n_train = std::clamp(n_train, 1, n - 1);
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + n_train);
    test_rows.insert(test_rows.end(), rows.begin() + n_train, rows.end());
  }

  if (by_class.size() - result.dropped_classes.size() < 2)
    throw ConfigError("parameter error: fewer than 2 classes survive min_per_class=" +
                      std::to_string(spec.min_per_class));

  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  result.train = take_rows(data, train_rows);
  result.test = take_rows(data, test_rows);
  return result;
}

namespace {

Eigen::MatrixXd gaussian_init(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.01);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  return m;
}

// Shared descent driver: step with the given gradient evaluator, halving the
// step whenever a full step would increase the loss.
template <typename LossGrad>
void descend(Eigen::MatrixXd& weight, Eigen::VectorXd& bias, const ClassifierConfig& config,
             LossGrad&& loss_grad) {
  Eigen::MatrixXd grad_w(weight.rows(), weight.cols());
  Eigen::VectorXd grad_b(bias.size());
  double lr = config.learning_rate;
  double loss = loss_grad(weight, bias, grad_w, grad_b);
  if (!std::isfinite(loss)) throw NumericError("training error: non-finite classifier loss");

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Eigen::MatrixXd next_w;
    Eigen::VectorXd next_b;
    Eigen::MatrixXd next_gw(weight.rows(), weight.cols());
    Eigen::VectorXd next_gb(bias.size());
    double next_loss = 0.0;
    int halvings = 0;
    for (; halvings < 60; ++halvings) {
      next_w = weight - lr * grad_w;
      next_b = bias - lr * grad_b;
      next_loss = loss_grad(next_w, next_b, next_gw, next_gb);
      if (!std::isfinite(next_loss))
        throw NumericError("training error: non-finite classifier loss at epoch " +
                           std::to_string(epoch));
      if (next_loss <= loss + 1e-12) break;
      lr *= 0.5;
    }
    if (halvings == 60) break;  // stalled at numeric precision
    weight = std::move(next_w);
    bias = std::move(next_b);
    grad_w = std::move(next_gw);
    grad_b = std::move(next_gb);
    loss = next_loss;
  }
}

}  // namespace

LinearClassifier train_linear(const LabeledVectors& train, const ClassifierConfig& config) {
  LinearClassifier clf;
  clf.classes = sorted_classes(train.class_labels);
  if (clf.classes.size() < 2)
    throw ConfigError("parameter error: train_linear needs >= 2 classes");

  const Eigen::Index c = static_cast<Eigen::Index>(clf.classes.size());
  const Eigen::Index d = train.vectors.cols();
  const Eigen::Index n = train.vectors.rows();

  std::map<std::uint32_t, int> class_index;
  for (std::size_t i = 0; i < clf.classes.size(); ++i)
    class_index[clf.classes[i]] = static_cast<int>(i);
  std::vector<int> targets(train.class_labels.size());
  for (std::size_t i = 0; i < train.class_labels.size(); ++i)
    targets[i] = class_index.at(train.class_labels[i]);

  clf.weight = gaussian_init(c, d, config.seed);
  clf.bias = Eigen::VectorXd::Zero(c);
  if (config.epochs == 0) return clf;

  auto loss_grad = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                       Eigen::MatrixXd& gw, Eigen::VectorXd& gb) {
    Eigen::MatrixXd logits = train.vectors * w.transpose();
    logits.rowwise() += b.transpose();
    double loss = 0.0;
    Eigen::MatrixXd probs(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
      double row_max = logits.row(i).maxCoeff();
      Eigen::ArrayXd shifted = (logits.row(i).array() - row_max).exp();
      double denom = shifted.sum();
      probs.row(i) = (shifted / denom).matrix();
      loss += row_max + std::log(denom) - logits(i, targets[i]);
    }
    loss /= static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) probs(i, targets[i]) -= 1.0;
    probs /= static_cast<double>(n);
    gw = probs.transpose() * train.vectors + config.l2 * w;
    gb = probs.colwise().sum().transpose();
    return loss + 0.5 * config.l2 * w.squaredNorm();
  };

  descend(clf.weight, clf.bias, config, loss_grad);
  return clf;
}

Eigen::MatrixXd classifier_scores(const LinearClassifier& clf, const Eigen::MatrixXd& vectors) {
  Eigen::MatrixXd scores = vectors * clf.weight.transpose();
  scores.rowwise() += clf.bias.transpose();
  return scores;
}

namespace {

// Rank of the true class under descending score, ties by ascending index.
int score_rank(const Eigen::RowVectorXd& scores, int true_index) {
  int rank = 1;
  const double true_score = scores[true_index];
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (j == true_index) continue;
    if (scores[j] > true_score || (scores[j] == true_score && j < true_index)) ++rank;
  }
  return rank;
}

double topk_from_scores(const Eigen::MatrixXd& scores,
                        const std::vector<std::uint32_t>& classes,
                        const std::vector<std::uint32_t>& labels, int k) {
  if (k < 1) throw ConfigError("parameter error: k must be >= 1");
  if (labels.empty()) throw ConfigError("parameter error: empty test set");

  std::map<std::uint32_t, int> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) class_index[classes[i]] = static_cast<int>(i);

  int hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = class_index.find(labels[i]);
    if (it == class_index.end()) continue;  // unknown class can never be in top-k
    if (score_rank(scores.row(static_cast<Eigen::Index>(i)), it->second) <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace

double topk_accuracy(const LinearClassifier& clf, const LabeledVectors& test, int k) {
  return topk_from_scores(classifier_scores(clf, test.vectors), clf.classes,
                          test.class_labels, k);
}

double nearest_centroid_classify(const LabeledVectors& train, const LabeledVectors& test,
                                 int k) {
  std::map<std::uint32_t, std::pair<Eigen::VectorXd, std::int64_t>> sums;
  for (int i = 0; i < train.size(); ++i) {
    auto [it, inserted] = sums.try_emplace(train.class_labels[i],
                                           Eigen::VectorXd::Zero(train.vectors.cols()), 0);
    it->second.first += train.vectors.row(i).transpose();
    it->second.second += 1;
  }

  std::vector<std::uint32_t> classes;
  Eigen::MatrixXd centroids(static_cast<Eigen::Index>(sums.size()), train.vectors.cols());
  Eigen::Index row = 0;
  for (auto& [label, acc] : sums) {
    classes.push_back(label);
    Eigen::VectorXd mean = acc.first / static_cast<double>(acc.second);
    double norm = mean.norm();
    if (norm == 0.0)
      throw NumericError("degenerate-centroid error: zero norm for class " +
                         std::to_string(label));
    centroids.row(row++) = (mean / norm).transpose();
  }

  // Cosine similarity; test rows are not assumed unit-norm.
  Eigen::MatrixXd scores = test.vectors * centroids.transpose();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double norm = test.vectors.row(i).norm();
    if (norm > 0.0) scores.row(i) /= norm;
  }
  return topk_from_scores(scores, classes, test.class_labels, k);
}

double average_precision(const std::vector<double>& scores, const std::vector<char>& relevance) {
  if (scores.size() != relevance.size())
    throw ConfigError("parameter error: scores and relevance must align");
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  int relevant_seen = 0;
  double precision_sum = 0.0;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    if (!relevance[order[pos]]) continue;
    ++relevant_seen;
    precision_sum += static_cast<double>(relevant_seen) / static_cast<double>(pos + 1);
  }
  if (relevant_seen == 0)
    throw ConfigError("parameter error: average_precision needs >= 1 relevant sample");
  return precision_sum / static_cast<double>(relevant_seen);
}

MultilabelClassifier train_one_vs_rest(const LabeledVectors& train,
                                       const ClassifierConfig& config) {
  std::vector<int> rows;
  std::set<std::uint32_t> label_set;
  for (int i = 0; i < train.size(); ++i) {
    if (train.multi_labels[i].empty()) continue;  // multilabel task skips unlabeled records
    rows.push_back(i);
    label_set.insert(train.multi_labels[i].begin(), train.multi_labels[i].end());
  }
  if (rows.empty() || label_set.empty())
    throw ConfigError("parameter error: no multilabel training data");

  MultilabelClassifier clf;
  clf.classes.assign(label_set.begin(), label_set.end());
  const Eigen::Index c = static_cast<Eigen::Index>(clf.classes.size());
  const Eigen::Index d = train.vectors.cols();
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());

  Eigen::MatrixXd x(n, d);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, c);
  std::map<std::uint32_t, int> class_index;
  for (std::size_t i = 0; i < clf.classes.size(); ++i)
    class_index[clf.classes[i]] = static_cast<int>(i);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = train.vectors.row(rows[static_cast<std::size_t>(i)]);
    for (std::uint32_t l : train.multi_labels[rows[static_cast<std::size_t>(i)]])
      y(i, class_index.at(l)) = 1.0;
  }

  clf.weight = gaussian_init(c, d, mix_seed(config.seed, 0x0517));
  clf.bias = Eigen::VectorXd::Zero(c);
  if (config.epochs == 0) return clf;

  // Mean sigmoid cross-entropy over all (sample, class) pairs, written in
  // the softplus form log(1+e^z) - y z for stability.
  auto loss_grad = [&](const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                       Eigen::MatrixXd& gw, Eigen::VectorXd& gb) {
    Eigen::MatrixXd logits = x * w.transpose();
    logits.rowwise() += b.transpose();
    double loss = 0.0;
    Eigen::MatrixXd probs(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < c; ++j) {
        double z = logits(i, j);
        double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        loss += softplus - y(i, j) * z;
        probs(i, j) = 1.0 / (1.0 + std::exp(-z));
      }
    }
    const double scale = 1.0 / static_cast<double>(n * c);
    loss *= scale;
    Eigen::MatrixXd delta = (probs - y) * scale;
    gw = delta.transpose() * x + config.l2 * w;
    gb = delta.colwise().sum().transpose();
    return loss + 0.5 * config.l2 * w.squaredNorm();
  };

  descend(clf.weight, clf.bias, config, loss_grad);
  return clf;
}

Eigen::MatrixXd multilabel_scores(const MultilabelClassifier& clf,
                                  const Eigen::MatrixXd& vectors) {
  Eigen::MatrixXd logits = vectors * clf.weight.transpose();
  logits.rowwise() += clf.bias.transpose();
  return logits.unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
}

double mean_average_precision(const Eigen::MatrixXd& scores,
                              const std::vector<std::vector<std::uint32_t>>& truth,
                              const std::vector<std::uint32_t>& classes,
                              std::vector<std::uint32_t>* skipped_classes) {
  if (scores.rows() != static_cast<Eigen::Index>(truth.size()))
    throw ConfigError("parameter error: scores and truth must align");

  double ap_sum = 0.0;
  int counted = 0;
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    std::vector<double> class_scores(truth.size());
    std::vector<char> relevance(truth.size(), 0);
    bool any_positive = false;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      class_scores[i] = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ci));
      bool rel = std::find(truth[i].begin(), truth[i].end(), classes[ci]) != truth[i].end();
      relevance[i] = rel ? 1 : 0;
      any_positive = any_positive || rel;
    }
    if (!any_positive) {
      if (skipped_classes) skipped_classes->push_back(classes[ci]);
      continue;
    }
    ap_sum += average_precision(class_scores, relevance);
    ++counted;
  }
  if (counted == 0)
    throw ConfigError("parameter error: no class has a positive sample");
  return ap_sum / static_cast<double>(counted);
}

double micro_f1_sets(const std::vector<std::vector<std::uint32_t>>& predicted,
                     const std::vector<std::vector<std::uint32_t>>& truth) {
  if (predicted.size() != truth.size())
    throw ConfigError("parameter error: predictions and truth must align");
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    std::set<std::uint32_t> pred(predicted[i].begin(), predicted[i].end());
    std::set<std::uint32_t> real(truth[i].begin(), truth[i].end());
    for (std::uint32_t l : pred) {
      if (real.count(l)) ++tp;
      else ++fp;
    }
    for (std::uint32_t l : real) {
      if (!pred.count(l)) ++fn;
    }
  }
  const std::int64_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 0.0;
  return static_cast<double>(2 * tp) / static_cast<double>(denom);
}

double micro_f1(const Eigen::MatrixXd& scores,
                const std::vector<std::vector<std::uint32_t>>& truth,
                const std::vector<std::uint32_t>& classes, double threshold) {
  if (scores.rows() != static_cast<Eigen::Index>(truth.size()))
    throw ConfigError("parameter error: scores and truth must align");
  std::vector<std::vector<std::uint32_t>> predicted(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t ci = 0; ci < classes.size(); ++ci) {
      if (scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(ci)) >= threshold)
        predicted[i].push_back(classes[ci]);
    }
  }
  return micro_f1_sets(predicted, truth);
}

}  // namespace gapcomp
