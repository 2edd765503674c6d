#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace gkpinn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// A point in the unit domain. For 1D problems only c[0] is meaningful;
/// for time problems c[0] = x and c[1] = t.
using Point = std::array<double, 2>;

enum class Activation { Sigmoid, Tanh };

/// Value and input-derivatives of a scalar field at one point. Only pure
/// (diagonal) second derivatives are carried; no benchmark residual needs
/// mixed partials.
struct FieldJet {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
  std::array<double, 2> diag_hess{0.0, 0.0};
};

/// Anything that can be evaluated as a scalar field with derivatives:
/// an MLP, a composite model, or a closed-form test double.
using FieldEvaluator = std::function<FieldJet(const Point&)>;

/// Fully connected network with scalar output. weights[l] has shape
/// (layer_sizes[l+1] x layer_sizes[l]); the last layer is linear.
struct MlpParams {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation activation = Activation::Sigmoid;

  int input_dim() const { return layer_sizes.front(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

/// Gradient of a scalar loss with respect to every parameter of one network;
/// shapes mirror MlpParams.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static MlpGrads zeros_like(const MlpParams& p);
  MlpGrads& operator+=(const MlpGrads& other);
  bool all_finite() const;
};

/// Which derivative channels a batched evaluation propagates. Requesting a
/// second derivative along an axis forces the first-derivative channel for
/// that axis as well.
struct ChannelMask {
  std::array<bool, 2> grad{false, false};
  std::array<bool, 2> hess{false, false};

  static ChannelMask value_only() { return {}; }
  static ChannelMask full(int dim);
  bool grad_active(int k) const { return grad[k] || hess[k]; }
};

/// Jets for a batch of points, stored channel-wise as 1xN rows.
struct JetBatch {
  RowVector value;
  std::array<RowVector, 2> grad;
  std::array<RowVector, 2> hess;

  static JetBatch zeros(int dim, Eigen::Index n, const ChannelMask& mask);
};

/// Forward-pass state retained for the reverse pass, plus scratch buffers.
/// Reusing one cache across calls with the same batch shape avoids
/// reallocating the per-layer matrices, which dominates the cost otherwise.
struct ForwardCache {
  ChannelMask mask;
  int dim = 0;
  Matrix input;                                   // d x N
  std::vector<Matrix> act;                        // post-activation per hidden layer
  std::vector<Matrix> s1;                         // activation first derivative
  std::vector<std::array<Matrix, 2>> pre_grad;    // W-propagated grad channel
  std::vector<std::array<Matrix, 2>> pre_hess;    // W-propagated hess channel
  std::vector<std::array<Matrix, 2>> post_grad;   // s1 .* pre_grad
  std::vector<std::array<Matrix, 2>> post_hess;   // s2 .* pre_grad^2 + s1 .* pre_hess
  // reverse-pass scratch
  Matrix a_adj, z_adj;
  std::array<Matrix, 2> g_adj, h_adj, p_adj, q_adj;
};

/// Glorot-uniform weights, zero biases, reproducible from seed.
/// Requires input dim in {1,2}, output width 1 and at least one hidden layer.
MlpParams init_mlp(const std::vector<int>& layer_sizes, Activation activation,
                   std::uint64_t seed);

/// Exact value/gradient/diagonal-Hessian of the network at one point.
FieldJet eval_jet(const MlpParams& params, const Point& x);

/// Batched forward pass over points (d x N), propagating the channels
/// selected by mask. The cache feeds mlp_backward.
JetBatch mlp_forward(const MlpParams& params, const Matrix& points,
                     const ChannelMask& mask, ForwardCache& cache);

/// Reverse pass: given dLoss/d(jet channels) for every point of a previous
/// mlp_forward, accumulate exact dLoss/d(parameters) into grads. The cache
/// is mutable only for its scratch buffers; the stored forward state is
/// left untouched.
void mlp_backward(const MlpParams& params, ForwardCache& cache,
                  const JetBatch& adjoint, MlpGrads& grads);

/// A scalar functional of the jets of one network on a fixed point batch.
/// `eval` must return the loss value and fill the adjoint (dLoss/d jets).
struct JetFunctional {
  Matrix points;  // d x N
  ChannelMask mask;
  std::function<double(const JetBatch& jets, JetBatch& adjoint)> eval;
};

/// Exact gradient of the functional with respect to every parameter.
/// Throws std::runtime_error if the loss or any gradient entry is not finite.
MlpGrads loss_param_gradient(const MlpParams& params, const JetFunctional& loss);

/// Wrap a network as a generic FieldEvaluator.
FieldEvaluator as_field(const MlpParams& params);

/// splitmix64 stream derivation so that samplers and initializers seeded
/// from one user seed do not share raw engine streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gkpinn
