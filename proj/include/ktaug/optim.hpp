#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "ktaug/model.hpp"

namespace ktaug {

// Noam warm-up: linear ramp to base_lr at `warmup`, then inverse square-root decay.
inline double noam_lr(std::uint64_t step, double base_lr, std::uint64_t warmup) {
  if (step == 0) throw std::invalid_argument("noam_lr: step must be >= 1");
  if (warmup == 0) throw std::invalid_argument("noam_lr: warmup must be >= 1");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return base_lr * std::sqrt(w) * std::min(1.0 / std::sqrt(s), s * std::pow(w, -1.5));
}

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First and second moments for every tensor of a parameter set.
template <typename Scalar>
struct AdamState {
  DktParams<Scalar> m;
  DktParams<Scalar> v;
  std::uint64_t step = 0;

  explicit AdamState(const ModelDims& dims)
      : m(DktParams<Scalar>::zeros(dims)), v(DktParams<Scalar>::zeros(dims)) {}
};

// Element-wise bias-corrected Adam update on one tensor.
template <typename Tensor>
void adam_update(Tensor& x, const Tensor& g, Tensor& m, Tensor& v, std::uint64_t step, double lr,
                 const AdamConfig& cfg) {
  using S = typename Tensor::Scalar;
  const S b1(cfg.beta1), b2(cfg.beta2);
  m = b1 * m + (S(1) - b1) * g;
  v.array() = b2 * v.array() + (S(1) - b2) * g.array().square();
  const S c1 = S(1) - std::pow(b1, S(step));
  const S c2 = S(1) - std::pow(b2, S(step));
  x.array() -= S(lr) * (m.array() / c1) / ((v.array() / c2).sqrt() + S(cfg.epsilon));
}

// One Adam step over a whole parameter set. Throws before touching anything if a
// gradient is not finite.
template <typename Scalar>
void adam_step(DktParams<Scalar>& params, const GradientSet<Scalar>& grads, AdamState<Scalar>& state,
               double lr, const AdamConfig& cfg = {}) {
  if (!(params.dims == grads.dims)) throw std::invalid_argument("adam_step: shape mismatch");
  grads.for_each([&](const char* name, const auto& g) {
    if (!g.allFinite())
      throw std::runtime_error(std::string("adam_step: non-finite gradient in '") + name + "'");
  });
  ++state.step;
  adam_update(params.embedding, grads.embedding, state.m.embedding, state.v.embedding, state.step, lr, cfg);
  adam_update(params.start, grads.start, state.m.start, state.v.start, state.step, lr, cfg);
  adam_update(params.w_input, grads.w_input, state.m.w_input, state.v.w_input, state.step, lr, cfg);
  adam_update(params.w_recurrent, grads.w_recurrent, state.m.w_recurrent, state.v.w_recurrent,
              state.step, lr, cfg);
  adam_update(params.bias, grads.bias, state.m.bias, state.v.bias, state.step, lr, cfg);
  adam_update(params.w_out, grads.w_out, state.m.w_out, state.v.w_out, state.step, lr, cfg);
  adam_update(params.b_out, grads.b_out, state.m.b_out, state.v.b_out, state.step, lr, cfg);
}

}  // namespace ktaug
