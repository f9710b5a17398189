#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace gapcomp {

// Row-aligned classification samples. multi_labels entries may be empty;
// multilabel routines skip such rows.
struct LabeledVectors {
  Eigen::MatrixXd vectors;  // n x dim
  std::vector<std::uint32_t> class_labels;
  std::vector<std::vector<std::uint32_t>> multi_labels;

  int size() const { return static_cast<int>(class_labels.size()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
};

struct SplitSpec {
  double train_fraction = 0.8;
  int min_per_class = 5;
  std::uint64_t seed = 0;
};

struct SplitResult {
  LabeledVectors train;
  LabeledVectors test;
  std::vector<std::uint32_t> dropped_classes;  // below min_per_class
};

// Per-class stratified split, seeded and deterministic. Classes below
// min_per_class are dropped and reported; every retained class lands in
// both splits. Throws ConfigError if fewer than 2 classes survive.
SplitResult split_train_test(const LabeledVectors& data, const SplitSpec& spec);

// Multinomial logistic regression, one row of scores per class.
struct LinearClassifier {
  Eigen::MatrixXd weight;  // C x dim
  Eigen::VectorXd bias;    // C
  std::vector<std::uint32_t> classes;  // ascending
};

struct ClassifierConfig {
  double learning_rate = 5.0;  // step-halving makes a large initial step safe
  int epochs = 600;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  double multilabel_threshold = 0.5;
};

// Seeded full-batch gradient descent on softmax cross-entropy. The step is
// halved whenever it would increase the loss, so the recorded loss is
// non-increasing. Throws NumericError on a non-finite loss.
LinearClassifier train_linear(const LabeledVectors& train, const ClassifierConfig& config);

Eigen::MatrixXd classifier_scores(const LinearClassifier& clf, const Eigen::MatrixXd& vectors);

// Fraction of test samples whose true class is among the k highest scores;
// score ties are broken by ascending class index.
double topk_accuracy(const LinearClassifier& clf, const LabeledVectors& test, int k);

// Renormalized per-class train centroids, test samples ranked by cosine
// similarity. Returns top-k accuracy with the same tie rule.
double nearest_centroid_classify(const LabeledVectors& train, const LabeledVectors& test, int k);

// AP with ranking by descending score, ties by ascending sample index:
// the mean of precision@rank over relevant positions. Requires >= 1
// relevant sample.
double average_precision(const std::vector<double>& scores, const std::vector<char>& relevance);

// One-vs-rest sigmoid classifier for the multilabel task. Samples with an
// empty label set are excluded from training.
struct MultilabelClassifier {
  Eigen::MatrixXd weight;  // C x dim
  Eigen::VectorXd bias;
  std::vector<std::uint32_t> classes;  // ascending
};

MultilabelClassifier train_one_vs_rest(const LabeledVectors& train,
                                       const ClassifierConfig& config);

// Sigmoid scores, n x C.
Eigen::MatrixXd multilabel_scores(const MultilabelClassifier& clf,
                                  const Eigen::MatrixXd& vectors);

// Unweighted mean of per-class AP over classes with at least one positive;
// classes without positives are skipped and reported.
double mean_average_precision(const Eigen::MatrixXd& scores,
                              const std::vector<std::vector<std::uint32_t>>& truth,
                              const std::vector<std::uint32_t>& classes,
                              std::vector<std::uint32_t>* skipped_classes = nullptr);

// Pooled micro-F1 over (sample, class) pairs; 0 when the denominator is 0.
double micro_f1_sets(const std::vector<std::vector<std::uint32_t>>& predicted,
                     const std::vector<std::vector<std::uint32_t>>& truth);

// Thresholds scores at `threshold` to form predicted label sets, then pools.
double micro_f1(const Eigen::MatrixXd& scores,
                const std::vector<std::vector<std::uint32_t>>& truth,
                const std::vector<std::uint32_t>& classes, double threshold);

}  // namespace gapcomp
