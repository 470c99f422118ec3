#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "eegssm/matrix.hpp"

namespace eegssm {

/// The ensemble bottleneck layer: one square matrix per wavelet band mapping
/// the shared class-probability vector to band-specific activations.
struct EnsembleWeights {
  std::vector<Matrix> w;  // R matrices, each n_classes x n_classes

  std::size_t n_heads() const { return w.size(); }
};

/// Identity-initialized heads: an unbiased pass-through per band.
EnsembleWeights init_crowd_weights(std::size_t n_heads, std::size_t n_classes);

struct EnsembleOutput {
  std::vector<std::vector<double>> m;    // activations m^r = W^r xi
  std::vector<std::vector<double>> psi;  // softmax(m^r), each sums to 1
};

/// Requires xi to be a probability vector (sums to 1 within 1e-9).
EnsembleOutput ensemble_forward(const std::vector<double>& xi, const EnsembleWeights& weights);

/// Sum of per-band cross-entropies against the replicated true label.
double ensemble_loss(const EnsembleOutput& output, std::size_t true_class);

struct EnsembleGradients {
  std::vector<double> d_xi;   // sum_r (W^r)^T dE/dm^r
  std::vector<Matrix> d_w;    // dE/dW^r = dE/dm^r xi^T
};

EnsembleGradients ensemble_backward(const std::vector<double>& xi, const EnsembleWeights& weights,
                                    const std::vector<std::vector<double>>& grads_m);

/// Per-band diagonal-dominance diagnostic: trace(W^r) / sum |entries|.
struct BandReliability {
  std::vector<double> scores;
};

BandReliability band_weight_summary(const EnsembleWeights& weights);

}  // namespace eegssm
