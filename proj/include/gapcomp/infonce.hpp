#pragma once

#include <Eigen/Core>
#include <vector>

#include "gapcomp/encoder.hpp"

namespace gapcomp {

// Temperature-scaled contrastive loss over unit-norm embedding rows.
// Similarity is the dot product (cosine on unit vectors); softmax rows are
// stabilized by per-row max subtraction so small temperatures cannot
// overflow.
//
// anchors and targets are N x D with matching row pairing: row i of anchors
// and row i of targets form the positive pair.
double infonce_directed(const Eigen::MatrixXd& anchors, const Eigen::MatrixXd& targets,
                        double temperature);

// Mean of both directions.
double infonce_symmetric(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double temperature);

struct EncoderGradients {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

struct InfoNceValue {
  double loss = 0.0;
  std::vector<EncoderGradients> gradients;  // one per modality, aligned with params
};

// Analytic gradients of the symmetric loss through encode() (affine map plus
// row normalization), averaged over all modality pairs when more than two
// modalities are given. inputs[m] is the batch for modality m.
InfoNceValue infonce_gradients(const std::vector<Eigen::MatrixXd>& inputs,
                               const std::vector<EncoderParams>& params,
                               double temperature);

}  // namespace gapcomp
