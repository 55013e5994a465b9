#pragma once

// Scalar training objectives over prediction traces.
//
// Every loss returns its value together with the gradient with respect to each
// probability input, so the training code can chain it into the model backward pass.
// Expectations are means over the stated index set; an empty index set gives 0.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ktaug/core.hpp"

namespace ktaug {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ConstVecRef = Eigen::Ref<const Vec<Scalar>>;
template <typename Scalar>
using ConstMatRef = Eigen::Ref<const Mat<Scalar>>;

using Sigma = std::vector<std::optional<std::size_t>>;

inline constexpr double kProbEpsilon = 1e-7;

template <typename Scalar>
struct Loss {
  Scalar value{0};
  Vec<Scalar> grad;
};

template <typename Scalar>
struct PairLoss {
  Scalar value{0};
  Vec<Scalar> grad_first;
  Vec<Scalar> grad_second;
};

struct LossWeights {
  double lambda_aug = 0.0;
  double lambda_reg = 0.0;
};

enum class ConsistencyVariant { excluded, replaced_only, full };

namespace detail {

inline std::vector<bool> index_flags(std::size_t n, std::span<const std::size_t> idx) {
  std::vector<bool> flags(n, false);
  for (auto i : idx) {
    if (i >= n) throw std::out_of_range("index set entry outside the trace");
    flags[i] = true;
  }
  return flags;
}

}  // namespace detail

// Mean binary cross-entropy over `mask` with probabilities clamped to [eps, 1 - eps].
template <typename Scalar>
Loss<Scalar> kt_bce(const ConstVecRef<Scalar>& probs, std::span<const int> labels,
                    std::span<const std::size_t> mask) {
  const auto n = static_cast<std::size_t>(probs.size());
  if (labels.size() != n) throw std::invalid_argument("kt_bce: trace/label length mismatch");
  if (mask.empty()) throw std::invalid_argument("kt_bce: empty mask");
  const Scalar eps(kProbEpsilon);
  Loss<Scalar> out{Scalar(0), Vec<Scalar>::Zero(probs.size())};
  const Scalar inv = Scalar(1) / Scalar(mask.size());
  for (auto t : mask) {
    if (t >= n) throw std::out_of_range("kt_bce: mask index outside the trace");
    const Scalar p = probs(static_cast<Eigen::Index>(t));
    const Scalar pc = std::clamp(p, eps, Scalar(1) - eps);
    const bool inside = p > eps && p < Scalar(1) - eps;
    if (labels[t] == 1) {
      out.value -= std::log(pc) * inv;
      if (inside) out.grad(static_cast<Eigen::Index>(t)) -= inv / pc;
    } else {
      out.value -= std::log(Scalar(1) - pc) * inv;
      if (inside) out.grad(static_cast<Eigen::Index>(t)) += inv / (Scalar(1) - pc);
    }
  }
  return out;
}

// Full-trace convenience overload.
template <typename Scalar>
Loss<Scalar> kt_bce(const ConstVecRef<Scalar>& probs, std::span<const int> labels) {
  std::vector<std::size_t> all(labels.size());
  for (std::size_t t = 0; t < all.size(); ++t) all[t] = t;
  return kt_bce<Scalar>(probs, labels, all);
}

// Squared prediction gap between an original and a replaced trace.
// excluded: mean over t outside `replaced`; replaced_only: mean over `replaced`; full: all t.
template <typename Scalar>
PairLoss<Scalar> consistency_rep(const ConstVecRef<Scalar>& p, const ConstVecRef<Scalar>& p_rep,
                                 std::span<const std::size_t> replaced,
                                 ConsistencyVariant variant = ConsistencyVariant::excluded) {
  if (p.size() != p_rep.size()) throw std::invalid_argument("consistency_rep: length mismatch");
  const auto n = static_cast<std::size_t>(p.size());
  const auto flags = detail::index_flags(n, replaced);
  PairLoss<Scalar> out{Scalar(0), Vec<Scalar>::Zero(p.size()), Vec<Scalar>::Zero(p.size())};
  std::size_t count = 0;
  auto included = [&](std::size_t t) {
    switch (variant) {
      case ConsistencyVariant::excluded: return !flags[t];
      case ConsistencyVariant::replaced_only: return bool(flags[t]);
      case ConsistencyVariant::full: return true;
    }
    return false;
  };
  for (std::size_t t = 0; t < n; ++t) count += included(t) ? 1 : 0;
  if (count == 0) return out;
  const Scalar inv = Scalar(1) / Scalar(count);
  for (std::size_t t = 0; t < n; ++t) {
    if (!included(t)) continue;
    const auto i = static_cast<Eigen::Index>(t);
    const Scalar d = p(i) - p_rep(i);
    out.value += d * d * inv;
    out.grad_first(i) = Scalar(2) * d * inv;
    out.grad_second(i) = -Scalar(2) * d * inv;
  }
  return out;
}

// Mean over aligned pairs of max(0, p_t - p_aug[sigma(t)]) when the augmented predictions
// are expected to increase, or max(0, p_aug[sigma(t)] - p_t) when expected to decrease.
// Originals with sigma(t) = nullopt are skipped.
template <typename Scalar>
PairLoss<Scalar> aligned_hinge(const ConstVecRef<Scalar>& p, const ConstVecRef<Scalar>& p_aug,
                               const Sigma& sigma, bool expect_increase) {
  if (sigma.size() != static_cast<std::size_t>(p.size()))
    throw std::invalid_argument("monotonicity: sigma does not cover the original trace");
  PairLoss<Scalar> out{Scalar(0), Vec<Scalar>::Zero(p.size()), Vec<Scalar>::Zero(p_aug.size())};
  std::size_t count = 0;
  for (const auto& s : sigma) {
    if (!s) continue;
    if (*s >= static_cast<std::size_t>(p_aug.size()))
      throw std::invalid_argument("monotonicity: sigma maps outside the augmented trace");
    ++count;
  }
  if (count == 0) return out;
  const Scalar inv = Scalar(1) / Scalar(count);
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    if (!sigma[t]) continue;
    const auto i = static_cast<Eigen::Index>(t);
    const auto j = static_cast<Eigen::Index>(*sigma[t]);
    const Scalar gap = expect_increase ? p(i) - p_aug(j) : p_aug(j) - p(i);
    if (gap <= Scalar(0)) continue;
    out.value += gap * inv;
    out.grad_first(i) += expect_increase ? inv : -inv;
    out.grad_second(j) += expect_increase ? -inv : inv;
  }
  return out;
}

// Insertion monotonicity. Inserting correct answers (target 1) should not lower predictions
// for the original interactions; inserting incorrect ones should not raise them.
// `reversed` imposes the opposite inequality.
template <typename Scalar>
PairLoss<Scalar> monotonicity_ins(const ConstVecRef<Scalar>& p, const ConstVecRef<Scalar>& p_ins,
                                  const Sigma& sigma, int target_response, bool reversed = false) {
  for (const auto& s : sigma)
    if (!s) throw std::invalid_argument("monotonicity_ins: insertion sigma must be total");
  const bool expect_increase = (target_response == 1) != reversed;
  return aligned_hinge<Scalar>(p, p_ins, sigma, expect_increase);
}

// Deletion monotonicity. Removing correct answers (target 1) should not raise predictions
// for the surviving interactions; removing incorrect ones should not lower them.
template <typename Scalar>
PairLoss<Scalar> monotonicity_del(const ConstVecRef<Scalar>& p, const ConstVecRef<Scalar>& p_del,
                                  const Sigma& sigma, int target_response, bool reversed = false) {
  const bool expect_increase = (target_response == 0) != reversed;
  return aligned_hinge<Scalar>(p, p_del, sigma, expect_increase);
}

struct AugLossTerms {
  double l_aug = 0.0;
  double l_reg = 0.0;
  LossWeights weights;
};

// L_ori + sum over augmentations of (lambda_aug * L_aug + lambda_reg * L_reg).
inline double total_loss(double l_ori, std::span<const AugLossTerms> per_aug) {
  double total = l_ori;
  for (const auto& a : per_aug) {
    if (a.weights.lambda_aug < 0 || a.weights.lambda_reg < 0)
      throw std::invalid_argument("total_loss: negative weight");
    total += a.weights.lambda_aug * a.l_aug + a.weights.lambda_reg * a.l_reg;
  }
  return total;
}

template <typename Scalar>
struct DktPlusLosses {
  Scalar reconstruction{0};
  Scalar waviness_l1{0};
  Scalar waviness_l2{0};
  Mat<Scalar> grad_reconstruction;
  Mat<Scalar> grad_waviness_l1;
  Mat<Scalar> grad_waviness_l2;
};

// Reconstruction and waviness regularizers over the full probability matrix
// (rows = timesteps, columns = questions). Row t holds predictions made after
// interactions 1..t-1, so the reconstruction of R_t reads row t + 1.
template <typename Scalar>
DktPlusLosses<Scalar> dktplus_losses(const ConstMatRef<Scalar>& full,
                                     const InteractionSequence& seq) {
  const Eigen::Index T = full.rows();
  const Eigen::Index Q = full.cols();
  if (static_cast<std::size_t>(T) != seq.size())
    throw std::invalid_argument("dktplus_losses: matrix rows differ from sequence length");
  DktPlusLosses<Scalar> out;
  out.grad_reconstruction = Mat<Scalar>::Zero(T, Q);
  out.grad_waviness_l1 = Mat<Scalar>::Zero(T, Q);
  out.grad_waviness_l2 = Mat<Scalar>::Zero(T, Q);
  if (T < 2) return out;

  const Scalar eps(kProbEpsilon);
  const Scalar inv_rec = Scalar(1) / Scalar(T - 1);
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    const auto& it = seq.interactions[static_cast<std::size_t>(t)];
    const auto j = static_cast<Eigen::Index>(it.question);
    if (j >= Q) throw std::out_of_range("dktplus_losses: question outside the matrix");
    const Scalar p = full(t + 1, j);
    const Scalar pc = std::clamp(p, eps, Scalar(1) - eps);
    const bool inside = p > eps && p < Scalar(1) - eps;
    if (it.response == 1) {
      out.reconstruction -= std::log(pc) * inv_rec;
      if (inside) out.grad_reconstruction(t + 1, j) -= inv_rec / pc;
    } else {
      out.reconstruction -= std::log(Scalar(1) - pc) * inv_rec;
      if (inside) out.grad_reconstruction(t + 1, j) += inv_rec / (Scalar(1) - pc);
    }
  }

  const Scalar inv_w = Scalar(1) / Scalar((T - 1) * Q);
  for (Eigen::Index t = 0; t + 1 < T; ++t) {
    for (Eigen::Index j = 0; j < Q; ++j) {
      const Scalar d = full(t + 1, j) - full(t, j);
      const Scalar sgn = d > Scalar(0) ? Scalar(1) : (d < Scalar(0) ? Scalar(-1) : Scalar(0));
      out.waviness_l1 += std::abs(d) * inv_w;
      out.waviness_l2 += d * d * inv_w;
      out.grad_waviness_l1(t + 1, j) += sgn * inv_w;
      out.grad_waviness_l1(t, j) -= sgn * inv_w;
      out.grad_waviness_l2(t + 1, j) += Scalar(2) * d * inv_w;
      out.grad_waviness_l2(t, j) -= Scalar(2) * d * inv_w;
    }
  }
  return out;
}

// Skill-pair Laplacian: mean over ordered pairs i != j of 1[i, j share a skill] (p_i - p_j)^2.
template <typename Scalar>
Loss<Scalar> qdkt_laplacian(const ConstVecRef<Scalar>& question_probs, const SkillMap* skills) {
  if (!skills) throw std::invalid_argument("qdkt_laplacian: skill map required");
  const Eigen::Index Q = question_probs.size();
  Loss<Scalar> out{Scalar(0), Vec<Scalar>::Zero(Q)};
  if (Q < 2) return out;
  const Scalar inv = Scalar(1) / Scalar(Q * (Q - 1));
  for (Eigen::Index i = 0; i < Q; ++i) {
    for (Eigen::Index j = 0; j < Q; ++j) {
      if (i == j) continue;
      if (!skills->shares_skill(static_cast<QuestionId>(i), static_cast<QuestionId>(j))) continue;
      const Scalar d = question_probs(i) - question_probs(j);
      out.value += d * d * inv;
      out.grad(i) += Scalar(2) * d * inv;
      out.grad(j) -= Scalar(2) * d * inv;
    }
  }
  return out;
}

}  // namespace ktaug
