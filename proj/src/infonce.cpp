#include "gapcomp/infonce.hpp"

#include <cmath>
#include <string>

#include "gapcomp/errors.hpp"

namespace gapcomp {

namespace {

void check_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double temperature) {
  if (temperature <= 0.0)
    throw ConfigError("parameter error: temperature must be > 0, got " +
                      std::to_string(temperature));
  if (a.rows() < 1) throw ConfigError("parameter error: batch must contain at least one pair");
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("parameter error: embedding batches must have matching shapes");
}

// Row softmax with max subtraction. Also accumulates the directed loss
// sum_i (logsumexp_j S_ij - S_ii); each term is non-negative because the
// positive similarity is one of the logsumexp arguments.
Eigen::MatrixXd row_softmax(const Eigen::MatrixXd& scores, double* directed_sum) {
  Eigen::MatrixXd probs(scores.rows(), scores.cols());
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    double row_max = scores.row(i).maxCoeff();
    Eigen::ArrayXd shifted = (scores.row(i).array() - row_max).exp();
    double denom = shifted.sum();
    probs.row(i) = (shifted / denom).matrix();
    if (directed_sum) *directed_sum += row_max + std::log(denom) - scores(i, i);
  }
  return probs;
}

}  // namespace

double infonce_directed(const Eigen::MatrixXd& anchors, const Eigen::MatrixXd& targets,
                        double temperature) {
  check_pair(anchors, targets, temperature);
  const Eigen::MatrixXd scores = (anchors * targets.transpose()) / temperature;
  double sum = 0.0;
  row_softmax(scores, &sum);
  return sum / static_cast<double>(anchors.rows());
}

double infonce_symmetric(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         double temperature) {
  return 0.5 * (infonce_directed(a, b, temperature) + infonce_directed(b, a, temperature));
}

namespace {

struct ForwardState {
  Eigen::MatrixXd pre_norm;   // A = X W + 1 b^T
  Eigen::VectorXd row_norms;  // ||A_i||
  Eigen::MatrixXd embedded;   // Z = A / ||A|| rowwise
};

ForwardState forward(const Eigen::MatrixXd& inputs, const EncoderParams& params) {
  ForwardState s;
  s.pre_norm = inputs * params.weight;
  s.pre_norm.rowwise() += params.bias.transpose();
  s.row_norms = s.pre_norm.rowwise().norm();
  for (Eigen::Index i = 0; i < s.row_norms.size(); ++i) {
    if (s.row_norms[i] == 0.0)
      throw NumericError("degenerate-vector error: zero pre-normalization norm at row " +
                         std::to_string(i));
  }
  s.embedded = s.pre_norm.array().colwise() / s.row_norms.array();
  return s;
}

// Gradient of one symmetric pair loss with respect to both embedding
// matrices. With P the row softmax of S = Z_a Z_b^T / tau and Q the row
// softmax of S^T, the symmetric loss has
//   dL/dS = ((P - I) + (Q - I)^T) / (2N)
// and the embedding gradients follow by the chain rule through S.
double pair_embedding_gradients(const Eigen::MatrixXd& za, const Eigen::MatrixXd& zb,
                                double temperature, Eigen::MatrixXd& dza,
                                Eigen::MatrixXd& dzb) {
  const Eigen::Index n = za.rows();
  const Eigen::MatrixXd scores = (za * zb.transpose()) / temperature;

  double fwd_sum = 0.0;
  Eigen::MatrixXd p = row_softmax(scores, &fwd_sum);
  double bwd_sum = 0.0;
  Eigen::MatrixXd q = row_softmax(scores.transpose(), &bwd_sum);

  Eigen::MatrixXd g = p + q.transpose();
  g.diagonal().array() -= 2.0;
  g /= 2.0 * static_cast<double>(n);

  dza = (g * zb) / temperature;
  dzb = (g.transpose() * za) / temperature;
  return 0.5 * (fwd_sum + bwd_sum) / static_cast<double>(n);
}

// Backpropagates an embedding gradient through row normalization and the
// affine map: dA_i = (dZ_i - (dZ_i . Z_i) Z_i) / ||A_i||, dW = X^T dA,
// db = column sums of dA.
void accumulate_encoder_gradients(const Eigen::MatrixXd& inputs, const ForwardState& state,
                                  const Eigen::MatrixXd& dz, double scale,
                                  EncoderGradients& grads) {
  Eigen::MatrixXd da(dz.rows(), dz.cols());
  for (Eigen::Index i = 0; i < dz.rows(); ++i) {
    double radial = dz.row(i).dot(state.embedded.row(i));
    da.row(i) = (dz.row(i) - radial * state.embedded.row(i)) / state.row_norms[i];
  }
  grads.weight.noalias() += scale * (inputs.transpose() * da);
  grads.bias.noalias() += scale * da.colwise().sum().transpose();
}

}  // namespace

InfoNceValue infonce_gradients(const std::vector<Eigen::MatrixXd>& inputs,
                               const std::vector<EncoderParams>& params,
                               double temperature) {
  if (temperature <= 0.0)
    throw ConfigError("parameter error: temperature must be > 0, got " +
                      std::to_string(temperature));
  if (inputs.size() != params.size() || params.size() < 2)
    throw ConfigError("parameter error: need matching inputs and params for >= 2 modalities");

  const std::size_t m = params.size();
  std::vector<ForwardState> states;
  states.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (inputs[i].rows() != inputs[0].rows())
      throw ConfigError("parameter error: modality batches must have equal sizes");
    states.push_back(forward(inputs[i], params[i]));
  }

  InfoNceValue out;
  out.gradients.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    out.gradients[i].weight = Eigen::MatrixXd::Zero(params[i].weight.rows(),
                                                    params[i].weight.cols());
    out.gradients[i].bias = Eigen::VectorXd::Zero(params[i].bias.size());
  }

  const double pair_count = static_cast<double>(m * (m - 1) / 2);
  const double scale = 1.0 / pair_count;
  Eigen::MatrixXd dza, dzb;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      out.loss += scale * pair_embedding_gradients(states[a].embedded, states[b].embedded,
                                                   temperature, dza, dzb);
      accumulate_encoder_gradients(inputs[a], states[a], dza, scale, out.gradients[a]);
      accumulate_encoder_gradients(inputs[b], states[b], dzb, scale, out.gradients[b]);
    }
  }
  return out;
}

}  // namespace gapcomp
