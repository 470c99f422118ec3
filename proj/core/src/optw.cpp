#include "eegssm/optw.hpp"

#include <cmath>
#include <stdexcept>

#include "eegssm/errors.hpp"
#include "eegssm/model.hpp"

namespace eegssm {

EnsembleWeights init_crowd_weights(std::size_t n_heads, std::size_t n_classes) {
  if (n_heads < 1) throw std::invalid_argument("init_crowd_weights: need at least one head");
  EnsembleWeights weights;
  weights.w.reserve(n_heads);
  for (std::size_t r = 0; r < n_heads; ++r) {
    Matrix eye(n_classes, n_classes, 0.0);
    for (std::size_t i = 0; i < n_classes; ++i) eye(i, i) = 1.0;
    weights.w.push_back(std::move(eye));
  }
  return weights;
}

EnsembleOutput ensemble_forward(const std::vector<double>& xi, const EnsembleWeights& weights) {
  double sum = 0.0;
  for (const double v : xi) sum += v;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("ensemble_forward: xi is not a probability vector");
  }
  EnsembleOutput out;
  out.m.reserve(weights.n_heads());
  out.psi.reserve(weights.n_heads());
  for (const Matrix& w : weights.w) {
    std::vector<double> m(w.rows(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double* row = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) m[i] += row[j] * xi[j];
    }
    out.psi.push_back(softmax(m));
    out.m.push_back(std::move(m));
  }
  return out;
}

double ensemble_loss(const EnsembleOutput& output, std::size_t true_class) {
  double total = 0.0;
  for (const std::vector<double>& psi : output.psi) {
    if (true_class >= psi.size()) throw std::invalid_argument("ensemble_loss: label out of range");
    total += -std::log(psi[true_class] + 1e-12);
  }
  return total;
}

EnsembleGradients ensemble_backward(const std::vector<double>& xi, const EnsembleWeights& weights,
                                    const std::vector<std::vector<double>>& grads_m) {
  if (grads_m.size() != weights.n_heads()) {
    throw std::invalid_argument("ensemble_backward: head count mismatch");
  }
  EnsembleGradients grads;
  grads.d_xi.assign(xi.size(), 0.0);
  grads.d_w.reserve(weights.n_heads());
  for (std::size_t r = 0; r < weights.n_heads(); ++r) {
    const Matrix& w = weights.w[r];
    const std::vector<double>& gm = grads_m[r];
    if (gm.size() != w.rows()) throw std::invalid_argument("ensemble_backward: shape mismatch");
    // Chain rule through m^r = W^r xi needs the transpose of W^r.
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double* row = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) grads.d_xi[j] += row[j] * gm[i];
    }
    Matrix dw(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) dw(i, j) = gm[i] * xi[j];
    }
    grads.d_w.push_back(std::move(dw));
  }
  return grads;
}

BandReliability band_weight_summary(const EnsembleWeights& weights) {
  BandReliability rel;
  rel.scores.reserve(weights.n_heads());
  for (const Matrix& w : weights.w) {
    double trace = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      trace += w(i, i);
      for (std::size_t j = 0; j < w.cols(); ++j) abs_sum += std::abs(w(i, j));
    }
    rel.scores.push_back(abs_sum > 0.0 ? trace / abs_sum : 0.0);
  }
  return rel;
}

}  // namespace eegssm
