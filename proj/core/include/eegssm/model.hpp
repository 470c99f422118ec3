#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eegssm/matrix.hpp"
#include "eegssm/optw.hpp"
#include "eegssm/spectral.hpp"
#include "eegssm/ssm.hpp"

namespace eegssm {

enum class Variant { Temporal, Spectral, Combined };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::Combined;
  std::size_t d_model = 19;  // must equal the input channel count
  std::size_t n_state = 16;
  std::size_t n_blocks = 2;
  std::size_t n_classes = 3;
  std::size_t conv_kernel_len = 5;
  std::uint64_t seed = 0;
};

/// Depth-mixing causal 1-D convolution. weight is d_out x d_in x k flattened
/// row-major; tap k-1 aligns with the current sample (left zero padding).
struct ConvWeights {
  std::size_t d = 0;
  std::size_t kernel_len = 0;
  std::vector<double> weight;  // d * d * k
  std::vector<double> bias;    // d
};

struct BlockWeights {
  std::vector<SsmParams> heads;    // one SISO head per channel
  std::vector<double> gate;        // per-channel gate
  std::vector<double> norm_scale;  // per-channel affine after normalization
  std::vector<double> norm_shift;
};

struct ModelWeights {
  ModelConfig config;
  ConvWeights conv_temporal;  // present for temporal / combined
  ConvWeights conv_spectral;  // present for spectral / combined
  std::vector<BlockWeights> blocks;
  Matrix classifier;                  // n_classes x d_model
  std::vector<double> classifier_bias;
  std::optional<EnsembleWeights> optw;
};

ModelWeights init_model(const ModelConfig& cfg);

Matrix conv1d_embed(const Matrix& x, const ConvWeights& w);

/// Per-channel normalization over the sequence axis (zero mean, unit
/// variance, then learned scale/shift).
Matrix channel_norm(const Matrix& x, std::span<const double> scale,
                    std::span<const double> shift);

/// Activations an encoder block records for the backward pass.
struct BlockTape {
  Matrix x_in;
  Matrix x_norm;
  Matrix y_ssm;
};

/// norm -> per-channel SSM head -> per-channel gated silu -> residual:
/// out[c][t] = x[c][t] + gate[c] * silu(ssm_c(norm(x)[c])[t]).
Matrix encoder_block(const Matrix& x, const BlockWeights& w, BlockTape* tape = nullptr);

/// Activations of a full forward pass, for training.
struct ModelTape {
  Matrix embedded;  // encoder input after conv embedding (and concat)
  std::vector<BlockTape> blocks;
  std::vector<double> pooled;
  std::vector<double> logits;
};

std::vector<double> forward_temporal(const Matrix& segment, const ModelWeights& w,
                                     ModelTape* tape = nullptr);
std::vector<double> forward_spectral(const BandFeatures& features, const ModelWeights& w,
                                     ModelTape* tape = nullptr);
std::vector<double> forward_combined(const Matrix& segment, const BandFeatures& features,
                                     const ModelWeights& w, ModelTape* tape = nullptr);

/// Max-subtracted softmax; exact for finite inputs.
std::vector<double> softmax(std::span<const double> logits);

std::size_t parameter_count(const ModelWeights& w);

/// Visits every trainable tensor in a fixed canonical order (the order the
/// optimizer, serializer and gradient checker all share). Inactive conv
/// embeddings are skipped; the ensemble weights are visited when present.
using TensorVisitor = std::function<void(const std::string&, std::span<double>)>;
void visit_tensors(ModelWeights& w, const TensorVisitor& visit);

/// Same-shaped copy with every tensor zeroed (gradient / moment buffers).
ModelWeights zeroed_like(const ModelWeights& w);

}  // namespace eegssm
