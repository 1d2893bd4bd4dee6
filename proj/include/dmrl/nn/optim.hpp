#pragma once

#include <cmath>

#include "dmrl/errors.hpp"
#include "dmrl/nn/param_set.hpp"

namespace dmrl::nn {

inline constexpr double kClipLow = -10.0;
inline constexpr double kClipHigh = 10.0;

// Elementwise clamp of every gradient entry to [lo, hi].
template <typename T>
void clip_gradients(GradientSet<T>& g, T lo = T(kClipLow), T hi = T(kClipHigh)) {
  for (auto& t : g.tensors()) t.value = t.value.cwiseMax(lo).cwiseMin(hi);
}

enum class OptimizerKind { sgd, adam };

template <typename T>
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, double beta1 = 0.9, double beta2 = 0.999,
            double eps = 1e-8)
      : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  }

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }
  long steps() const { return t_; }

  void step(ParamSet<T>& params, const GradientSet<T>& grads) {
    if (!params.same_shape(grads)) throw ShapeError("optimizer: gradient/parameter shape mismatch");
    ++t_;
    if (kind_ == OptimizerKind::sgd) {
      for (int i = 0; i < params.size(); ++i) params[i] -= T(lr_) * grads[i];
      return;
    }
    if (m_.size() != params.size()) {
      m_ = params.zeros_like();
      v_ = params.zeros_like();
    }
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    const T step = T(lr_ / bc1);
    const T sqrt_bc2 = T(std::sqrt(bc2));
    for (int i = 0; i < params.size(); ++i) {
      m_[i] = T(beta1_) * m_[i] + T(1.0 - beta1_) * grads[i];
      v_[i] = T(beta2_) * v_[i] + T(1.0 - beta2_) * grads[i].cwiseAbs2();
      params[i].array() -= step * m_[i].array() / ((v_[i].array().sqrt() / sqrt_bc2) + T(eps_));
    }
  }

 private:
  OptimizerKind kind_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  ParamSet<T> m_, v_;
};

}  // namespace dmrl::nn
