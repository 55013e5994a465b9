#pragma once

// Batch objective: original KT loss plus, for every augmentation, the KT loss on the
// augmented batch and its consistency / monotonicity regulariser, optionally with the
// DKT+ and qDKT comparison terms. Per-sequence losses are averaged over the batch.

#include <span>
#include <string>
#include <vector>

#include "ktaug/augment.hpp"
#include "ktaug/losses.hpp"
#include "ktaug/model.hpp"

namespace ktaug {

struct AugmentationSpec {
  std::string name;
  AugmentKind kind = AugmentKind::replacement;
  AugmentConfig config;  // seed is ignored; draws are seeded per training step
  LossWeights weights;
  bool reversed = false;                                       // insertion / deletion
  ConsistencyVariant variant = ConsistencyVariant::excluded;   // replacement
};

struct ComparisonWeights {
  double reconstruction = 0.0;  // DKT+ lambda_r
  double waviness_l1 = 0.0;     // DKT+ lambda_w1
  double waviness_l2 = 0.0;     // DKT+ lambda_w2
  double laplacian = 0.0;       // qDKT lambda

  bool any() const {
    return reconstruction > 0 || waviness_l1 > 0 || waviness_l2 > 0 || laplacian > 0;
  }
};

struct AugTermLog {
  std::string name;
  double l_aug = 0.0;
  double l_reg = 0.0;
};

struct ObjectiveTerms {
  double l_ori = 0.0;
  std::vector<AugTermLog> augmentations;
  double reconstruction = 0.0;
  double waviness_l1 = 0.0;
  double waviness_l2 = 0.0;
  double laplacian = 0.0;
  double total = 0.0;
};

template <typename Scalar>
struct ObjectiveResult {
  ObjectiveTerms terms;
  GradientSet<Scalar> grads;
  Scalar total{0};  // terms.total at full working precision
};

// Input positions excluded from L_aug: replaced and inserted interactions.
inline std::vector<std::size_t> aug_kt_mask(const AugmentedSequence& aug) {
  std::vector<bool> skip(aug.size(), false);
  if (aug.kind != AugmentKind::deletion)
    for (auto t : aug.touched) skip[t] = true;
  std::vector<std::size_t> mask;
  for (std::size_t t = 0; t < aug.size(); ++t)
    if (!skip[t]) mask.push_back(t);
  return mask;
}

inline std::vector<int> responses_of(const InteractionSequence& seq) {
  std::vector<int> r(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) r[t] = seq.interactions[t].response;
  return r;
}

// Draws one augmentation of every sequence for every spec. Stream = (seed, spec index).
inline std::vector<std::vector<AugmentedSequence>> draw_augmentations(
    std::span<const InteractionSequence* const> seqs, std::span<const AugmentationSpec> specs,
    const QuestionPool& pool, std::uint64_t seed) {
  std::vector<std::vector<AugmentedSequence>> out(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    AugmentConfig cfg = specs[s].config;
    cfg.seed = mix_seed(seed, s);
    out[s].reserve(seqs.size());
    for (const auto* seq : seqs) out[s].push_back(augment(specs[s].kind, *seq, pool, cfg));
  }
  return out;
}

template <typename Scalar>
ObjectiveResult<Scalar> objective(const DktParams<Scalar>& params,
                                  std::span<const InteractionSequence* const> seqs,
                                  std::span<const AugmentationSpec> specs,
                                  const std::vector<std::vector<AugmentedSequence>>& augmented,
                                  const ComparisonWeights& comparison = {},
                                  const SkillMap* skills = nullptr) {
  if (seqs.empty()) throw std::invalid_argument("objective: empty batch");
  if (augmented.size() != specs.size())
    throw std::invalid_argument("objective: one augmentation draw per spec required");
  const Eigen::Index B = static_cast<Eigen::Index>(seqs.size());
  const Scalar inv_b = Scalar(1) / Scalar(B);
  const auto Q = static_cast<Eigen::Index>(params.dims.num_questions);

  ObjectiveResult<Scalar> res{{}, GradientSet<Scalar>::zeros(params.dims), Scalar(0)};
  const Batch batch = make_batch(seqs);
  const auto fp = forward(params, batch);
  Mat<Scalar> d_ori = Mat<Scalar>::Zero(batch.max_len, B);

  std::vector<std::vector<int>> labels(seqs.size());
  Scalar l_ori(0);
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto sb = std::size_t(b);
    labels[sb] = responses_of(*seqs[sb]);
    const auto n = static_cast<Eigen::Index>(seqs[sb]->size());
    const auto loss = kt_bce<Scalar>(fp.probs.col(b).head(n), labels[sb]);
    l_ori += loss.value * inv_b;
    d_ori.col(b).head(n) += loss.grad * inv_b;
  }
  res.terms.l_ori = double(l_ori);
  Scalar total = l_ori;

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& spec = specs[s];
    if (augmented[s].size() != seqs.size())
      throw std::invalid_argument("objective: augmentation draw size differs from the batch");
    std::vector<const InteractionSequence*> aug_ptrs;
    for (const auto& a : augmented[s]) aug_ptrs.push_back(&a.sequence);
    const Batch aug_batch = make_batch(aug_ptrs);
    const auto afp = forward(params, aug_batch);
    Mat<Scalar> d_aug = Mat<Scalar>::Zero(aug_batch.max_len, B);

    std::vector<std::vector<std::size_t>> masks(seqs.size());
    std::size_t kt_count = 0;
    for (std::size_t b = 0; b < seqs.size(); ++b) {
      masks[b] = aug_kt_mask(augmented[s][b]);
      if (!masks[b].empty()) ++kt_count;
    }

    const Scalar lam_aug(spec.weights.lambda_aug);
    const Scalar lam_reg(spec.weights.lambda_reg);
    Scalar l_aug(0), l_reg(0);
    for (Eigen::Index b = 0; b < B; ++b) {
      const auto sb = std::size_t(b);
      const auto& a = augmented[s][sb];
      const auto n = static_cast<Eigen::Index>(seqs[sb]->size());
      const auto na = static_cast<Eigen::Index>(a.size());
      const auto p = fp.probs.col(b).head(n);
      const auto pa = afp.probs.col(b).head(na);

      if (!masks[sb].empty()) {
        const auto aug_labels = responses_of(a.sequence);
        const auto kt = kt_bce<Scalar>(pa, aug_labels, masks[sb]);
        const Scalar w = Scalar(1) / Scalar(kt_count);
        l_aug += kt.value * w;
        d_aug.col(b).head(na) += lam_aug * w * kt.grad;
      }

      PairLoss<Scalar> reg;
      switch (spec.kind) {
        case AugmentKind::replacement:
          reg = consistency_rep<Scalar>(p, pa, a.touched, spec.variant);
          break;
        case AugmentKind::insertion:
          reg = monotonicity_ins<Scalar>(p, pa, a.sigma, a.target_response, spec.reversed);
          break;
        case AugmentKind::deletion:
          reg = monotonicity_del<Scalar>(p, pa, a.sigma, a.target_response, spec.reversed);
          break;
      }
      l_reg += reg.value * inv_b;
      d_ori.col(b).head(n) += lam_reg * inv_b * reg.grad_first;
      d_aug.col(b).head(na) += lam_reg * inv_b * reg.grad_second;
    }
    total += lam_aug * l_aug + lam_reg * l_reg;
    res.terms.augmentations.push_back({spec.name, double(l_aug), double(l_reg)});
    backward(params, aug_batch, afp, d_aug, nullptr, res.grads);
  }

  std::vector<Mat<Scalar>> d_full;
  if (comparison.any()) {
    d_full.assign(std::size_t(batch.max_len), Mat<Scalar>::Zero(Q, B));
    const bool waves = comparison.reconstruction > 0 || comparison.waviness_l1 > 0 ||
                       comparison.waviness_l2 > 0;
    if (waves) {
      Scalar rec(0), w1(0), w2(0);
      for (Eigen::Index b = 0; b < B; ++b) {
        const auto sb = std::size_t(b);
        const auto n = static_cast<Eigen::Index>(seqs[sb]->size());
        Mat<Scalar> full(n, Q);
        for (Eigen::Index t = 0; t < n; ++t) full.row(t) = fp.full[std::size_t(t)].col(b).transpose();
        const auto dp = dktplus_losses<Scalar>(full, *seqs[sb]);
        rec += dp.reconstruction * inv_b;
        w1 += dp.waviness_l1 * inv_b;
        w2 += dp.waviness_l2 * inv_b;
        const Mat<Scalar> g = Scalar(comparison.reconstruction) * dp.grad_reconstruction +
                              Scalar(comparison.waviness_l1) * dp.grad_waviness_l1 +
                              Scalar(comparison.waviness_l2) * dp.grad_waviness_l2;
        for (Eigen::Index t = 0; t < n; ++t)
          d_full[std::size_t(t)].col(b) += inv_b * g.row(t).transpose();
      }
      res.terms.reconstruction = double(rec);
      res.terms.waviness_l1 = double(w1);
      res.terms.waviness_l2 = double(w2);
      total += Scalar(comparison.reconstruction) * rec + Scalar(comparison.waviness_l1) * w1 +
               Scalar(comparison.waviness_l2) * w2;
    }
    if (comparison.laplacian > 0) {
      // p_i: final-step prediction for question i, averaged over the batch
      Vec<Scalar> qp = Vec<Scalar>::Zero(Q);
      for (Eigen::Index b = 0; b < B; ++b) {
        const auto last = std::size_t(seqs[std::size_t(b)]->size() - 1);
        qp += inv_b * fp.full[last].col(b);
      }
      const auto lap = qdkt_laplacian<Scalar>(qp, skills);
      res.terms.laplacian = double(lap.value);
      total += Scalar(comparison.laplacian) * lap.value;
      for (Eigen::Index b = 0; b < B; ++b) {
        const auto last = std::size_t(seqs[std::size_t(b)]->size() - 1);
        d_full[last].col(b) += Scalar(comparison.laplacian) * inv_b * lap.grad;
      }
    }
  }

  backward(params, batch, fp, d_ori, comparison.any() ? &d_full : nullptr, res.grads);
  res.total = total;
  res.terms.total = double(total);
  return res;
}

}  // namespace ktaug
