#include "gkpinn/mlp.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gkpinn {

namespace {

// Activation derivative chains expressed in the post-activation value a, so
// the pre-activation never has to be stored. s1 = f', s2 = f'', s3 = f'''.
//   sigmoid: s1 = a(1-a), s2 = s1(1-2a), s3 = s1(1-6a+6a^2)
//   tanh:    s1 = 1-a^2,  s2 = -2a s1,   s3 = -2 s1 (1-3a^2)
// The derivative chains below are expressed in the post-activation value a,
// so the pre-activation never has to be stored:
//   sigmoid: s1 = a(1-a), s2 = s1(1-2a), s3 = s1(1-6a+6a^2)
//   tanh:    s1 = 1-a^2,  s2 = -2a s1,   s3 = -2 s1 (1-3a^2)
void activate_in_place(Activation act, Matrix& z) {
  if (act == Activation::Sigmoid)
    z = ((-z.array()).exp() + 1.0).inverse();
  else
    z = z.array().tanh();
}

}  // namespace

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  g.weights.reserve(p.weights.size());
  g.biases.reserve(p.biases.size());
  for (const auto& w : p.weights) g.weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const auto& b : p.biases) g.biases.push_back(Vector::Zero(b.size()));
  return g;
}

MlpGrads& MlpGrads::operator+=(const MlpGrads& other) {
  for (std::size_t i = 0; i < weights.size(); ++i) weights[i] += other.weights[i];
  for (std::size_t i = 0; i < biases.size(); ++i) biases[i] += other.biases[i];
  return *this;
}

bool MlpGrads::all_finite() const {
  for (const auto& w : weights)
    if (!w.allFinite()) return false;
  for (const auto& b : biases)
    if (!b.allFinite()) return false;
  return true;
}

ChannelMask ChannelMask::full(int dim) {
  ChannelMask m;
  for (int k = 0; k < dim; ++k) {
    m.grad[k] = true;
    m.hess[k] = true;
  }
  return m;
}

JetBatch JetBatch::zeros(int dim, Eigen::Index n, const ChannelMask& mask) {
  JetBatch j;
  j.value = RowVector::Zero(n);
  for (int k = 0; k < dim; ++k) {
    if (mask.grad_active(k)) j.grad[k] = RowVector::Zero(n);
    if (mask.hess[k]) j.hess[k] = RowVector::Zero(n);
  }
  return j;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MlpParams init_mlp(const std::vector<int>& layer_sizes, Activation activation,
                   std::uint64_t seed) {
  if (layer_sizes.size() < 3)
    throw std::invalid_argument("init_mlp: need at least one hidden layer");
  if (layer_sizes.back() != 1)
    throw std::invalid_argument("init_mlp: output width must be 1");
  if (layer_sizes.front() != 1 && layer_sizes.front() != 2)
    throw std::invalid_argument("init_mlp: input dim must be 1 or 2");
  for (int s : layer_sizes)
    if (s <= 0) throw std::invalid_argument("init_mlp: layer sizes must be positive");

  MlpParams p;
  p.layer_sizes = layer_sizes;
  p.activation = activation;
  std::mt19937_64 eng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int fan_in = layer_sizes[l];
    const int fan_out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = dist(eng);
    p.weights.push_back(std::move(w));
    p.biases.push_back(Vector::Zero(fan_out));
  }
  return p;
}

JetBatch mlp_forward(const MlpParams& params, const Matrix& points,
                     const ChannelMask& mask, ForwardCache& cache) {
  const int d = params.input_dim();
  if (points.rows() != d)
    throw std::invalid_argument("mlp_forward: point dimension mismatch");
  const Eigen::Index n = points.cols();
  const int hidden = params.num_layers() - 1;

  cache.mask = mask;
  cache.dim = d;
  cache.input = points;
  if (static_cast<int>(cache.act.size()) != hidden) {
    cache.act.resize(hidden);
    cache.s1.resize(hidden);
    cache.pre_grad.resize(hidden);
    cache.pre_hess.resize(hidden);
    cache.post_grad.resize(hidden);
    cache.post_hess.resize(hidden);
  }

  const Matrix* a_prev = &cache.input;
  for (int l = 0; l < hidden; ++l) {
    const Matrix& w = params.weights[l];
    Matrix& a = cache.act[l];
    a.noalias() = w * (*a_prev);
    a.colwise() += params.biases[l];
    for (int k = 0; k < d; ++k) {
      if (!mask.grad_active(k)) continue;
      if (l == 0)
        cache.pre_grad[l][k] = w.col(k).replicate(1, n);
      else
        cache.pre_grad[l][k].noalias() = w * cache.post_grad[l - 1][k];
      if (mask.hess[k]) {
        if (l == 0) {
          cache.pre_hess[l][k].resize(w.rows(), n);
          cache.pre_hess[l][k].setZero();
        } else {
          cache.pre_hess[l][k].noalias() = w * cache.post_hess[l - 1][k];
        }
      }
    }
    activate_in_place(params.activation, a);

    // One fused pass for the polynomial derivative chains: reading the
    // channel arrays once dominates the cost at production batch sizes.
    Matrix& s1m = cache.s1[l];
    s1m.resize(a.rows(), n);
    struct Chan {
      const double* p;
      const double* q;
      double* g;
      double* h;
    };
    Chan chan[2];
    int nchan = 0;
    bool any_hess = false;
    for (int k = 0; k < d; ++k) {
      if (!mask.grad_active(k)) continue;
      Chan& ch = chan[nchan++];
      ch.p = cache.pre_grad[l][k].data();
      if (mask.hess[k]) {
        any_hess = true;
        ch.q = cache.pre_hess[l][k].data();
        cache.post_hess[l][k].resize(a.rows(), n);
        ch.h = cache.post_hess[l][k].data();
      } else {
        ch.q = nullptr;
        ch.h = nullptr;
      }
      cache.post_grad[l][k].resize(a.rows(), n);
      ch.g = cache.post_grad[l][k].data();
    }
    const Eigen::Index count = a.size();
    const double* av = a.data();
    double* s1p = s1m.data();
    const bool sigmoid = params.activation == Activation::Sigmoid;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double ai = av[i];
      const double s1v = sigmoid ? ai * (1.0 - ai) : 1.0 - ai * ai;
      s1p[i] = s1v;
      const double s2v = any_hess ? (sigmoid ? s1v * (1.0 - 2.0 * ai) : -2.0 * ai * s1v)
                                  : 0.0;
      for (int c = 0; c < nchan; ++c) {
        const double pv = chan[c].p[i];
        chan[c].g[i] = s1v * pv;
        if (chan[c].h != nullptr)
          chan[c].h[i] = s2v * pv * pv + s1v * chan[c].q[i];
      }
    }
    a_prev = &a;
  }

  const Matrix& wout = params.weights[hidden];
  JetBatch out;
  out.value = (wout * (*a_prev)).row(0);
  out.value.array() += params.biases[hidden](0);
  for (int k = 0; k < d; ++k) {
    if (hidden == 0) {
      // Affine network: the gradient is the constant weight entry.
      if (mask.grad_active(k)) out.grad[k] = RowVector::Constant(n, wout(0, k));
      if (mask.hess[k]) out.hess[k] = RowVector::Zero(n);
    } else {
      if (mask.grad_active(k)) out.grad[k] = (wout * cache.post_grad[hidden - 1][k]).row(0);
      if (mask.hess[k]) out.hess[k] = (wout * cache.post_hess[hidden - 1][k]).row(0);
    }
  }
  return out;
}

void mlp_backward(const MlpParams& params, ForwardCache& cache,
                  const JetBatch& adjoint, MlpGrads& grads) {
  const int d = cache.dim;
  const ChannelMask& mask = cache.mask;
  const int hidden = params.num_layers() - 1;
  const Eigen::Index n = cache.input.cols();
  const Activation act = params.activation;

  const Matrix& a_last = hidden > 0 ? cache.act[hidden - 1] : cache.input;
  const bool has_value = adjoint.value.size() > 0;

  // Output layer (linear, one row).
  {
    Matrix& dw = grads.weights[hidden];
    if (has_value) {
      dw.row(0).noalias() += adjoint.value * a_last.transpose();
      grads.biases[hidden](0) += adjoint.value.sum();
    }
    for (int k = 0; k < d; ++k) {
      if (hidden == 0) break;
      if (mask.grad_active(k) && adjoint.grad[k].size() > 0)
        dw.row(0).noalias() += adjoint.grad[k] * cache.post_grad[hidden - 1][k].transpose();
      if (mask.hess[k] && adjoint.hess[k].size() > 0)
        dw.row(0).noalias() += adjoint.hess[k] * cache.post_hess[hidden - 1][k].transpose();
    }
  }
  if (hidden == 0) {
    // Affine network: grad channels depend linearly on the input weights;
    // the zero hess channel contributes nothing.
    for (int k = 0; k < d; ++k)
      if (mask.grad_active(k) && adjoint.grad[k].size() > 0)
        grads.weights[0](0, k) += adjoint.grad[k].sum();
    return;
  }

  // Adjoints on the post-activation channels of the last hidden layer.
  const Matrix& wout = params.weights[hidden];
  cache.a_adj.resize(a_last.rows(), n);
  if (has_value) cache.a_adj.noalias() = wout.transpose() * adjoint.value;
  else cache.a_adj.setZero();
  for (int k = 0; k < d; ++k) {
    if (mask.grad_active(k)) {
      cache.g_adj[k].resize(a_last.rows(), n);
      if (adjoint.grad[k].size() > 0)
        cache.g_adj[k].noalias() = wout.transpose() * adjoint.grad[k];
      else
        cache.g_adj[k].setZero();
    }
    if (mask.hess[k]) {
      cache.h_adj[k].resize(a_last.rows(), n);
      if (adjoint.hess[k].size() > 0)
        cache.h_adj[k].noalias() = wout.transpose() * adjoint.hess[k];
      else
        cache.h_adj[k].setZero();
    }
  }

  for (int l = hidden - 1; l >= 0; --l) {
    const Matrix& a = cache.act[l];
    const Matrix& s1 = cache.s1[l];
    // One fused pass computing
    //   aZ   = s1.aA + sum_k [ s2.P_k.aG_k + (s3.P_k^2 + s2.Q_k).aH_k ]
    //   aP_k = s1.aG_k + 2 s2.P_k.aH_k
    //   aQ_k = s1.aH_k
    Matrix& z_adj = cache.z_adj;
    z_adj.resize(a.rows(), n);
    struct Chan {
      const double* p;
      const double* q;
      const double* ga;
      const double* ha;
      double* pa;
      double* qa;
    };
    Chan chan[2];
    int nchan = 0;
    bool any_hess = false;
    for (int k = 0; k < d; ++k) {
      if (!mask.grad_active(k)) continue;
      Chan& ch = chan[nchan++];
      ch.p = cache.pre_grad[l][k].data();
      ch.ga = cache.g_adj[k].data();
      cache.p_adj[k].resize(a.rows(), n);
      ch.pa = cache.p_adj[k].data();
      if (mask.hess[k]) {
        any_hess = true;
        ch.q = cache.pre_hess[l][k].data();
        ch.ha = cache.h_adj[k].data();
        cache.q_adj[k].resize(a.rows(), n);
        ch.qa = cache.q_adj[k].data();
      } else {
        ch.q = nullptr;
        ch.ha = nullptr;
        ch.qa = nullptr;
      }
    }
    const Eigen::Index count = a.size();
    const double* av = a.data();
    const double* s1p = s1.data();
    const double* aa = cache.a_adj.data();
    double* za = z_adj.data();
    const bool sigmoid = act == Activation::Sigmoid;
    for (Eigen::Index i = 0; i < count; ++i) {
      const double ai = av[i];
      const double s1v = s1p[i];
      const double s2v = sigmoid ? s1v * (1.0 - 2.0 * ai) : -2.0 * ai * s1v;
      const double s3v =
          any_hess ? (sigmoid ? s1v * (1.0 - 6.0 * ai + 6.0 * ai * ai)
                              : -2.0 * s1v * (1.0 - 3.0 * ai * ai))
                   : 0.0;
      double z = s1v * aa[i];
      for (int c = 0; c < nchan; ++c) {
        const Chan& ch = chan[c];
        const double pv = ch.p[i];
        const double gav = ch.ga[i];
        z += s2v * pv * gav;
        double pa = s1v * gav;
        if (ch.ha != nullptr) {
          const double hav = ch.ha[i];
          z += (s3v * pv * pv + s2v * ch.q[i]) * hav;
          pa += 2.0 * s2v * pv * hav;
          ch.qa[i] = s1v * hav;
        }
        ch.pa[i] = pa;
      }
      za[i] = z;
    }

    const Matrix& w = params.weights[l];
    grads.biases[l] += z_adj.rowwise().sum();
    if (l == 0) {
      grads.weights[0].noalias() += z_adj * cache.input.transpose();
      for (int k = 0; k < d; ++k) {
        if (!mask.grad_active(k)) continue;
        // The input grad channel is the constant unit vector e_k, so the
        // P-channel weight gradient lands in column k; the input hess
        // channel is identically zero and contributes nothing.
        grads.weights[0].col(k) += cache.p_adj[k].rowwise().sum();
      }
      break;
    }

    grads.weights[l].noalias() += z_adj * cache.act[l - 1].transpose();
    for (int k = 0; k < d; ++k) {
      if (!mask.grad_active(k)) continue;
      grads.weights[l].noalias() += cache.p_adj[k] * cache.post_grad[l - 1][k].transpose();
      if (mask.hess[k])
        grads.weights[l].noalias() += cache.q_adj[k] * cache.post_hess[l - 1][k].transpose();
    }

    cache.a_adj.noalias() = w.transpose() * z_adj;
    for (int k = 0; k < d; ++k) {
      if (!mask.grad_active(k)) continue;
      cache.g_adj[k].noalias() = w.transpose() * cache.p_adj[k];
      if (mask.hess[k]) cache.h_adj[k].noalias() = w.transpose() * cache.q_adj[k];
    }
  }
}

FieldJet eval_jet(const MlpParams& params, const Point& x) {
  const int d = params.input_dim();
  Matrix pt(d, 1);
  for (int k = 0; k < d; ++k) pt(k, 0) = x[k];
  ForwardCache cache;
  JetBatch jets = mlp_forward(params, pt, ChannelMask::full(d), cache);
  FieldJet out;
  out.value = jets.value(0);
  for (int k = 0; k < d; ++k) {
    out.grad[k] = jets.grad[k](0);
    out.diag_hess[k] = jets.hess[k](0);
  }
  return out;
}

MlpGrads loss_param_gradient(const MlpParams& params, const JetFunctional& loss) {
  ForwardCache cache;
  JetBatch jets = mlp_forward(params, loss.points, loss.mask, cache);
  JetBatch adj = JetBatch::zeros(params.input_dim(), loss.points.cols(), loss.mask);
  const double value = loss.eval(jets, adj);
  if (!std::isfinite(value))
    throw std::runtime_error("loss_param_gradient: non-finite loss value");
  MlpGrads grads = MlpGrads::zeros_like(params);
  mlp_backward(params, cache, adj, grads);
  if (!grads.all_finite())
    throw std::runtime_error("loss_param_gradient: non-finite gradient");
  return grads;
}

FieldEvaluator as_field(const MlpParams& params) {
  return [params](const Point& x) { return eval_jet(params, x); };
}

}  // namespace gkpinn
