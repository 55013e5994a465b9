#include "ktaug/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ktaug {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * double(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += midrank;
        ++n_pos;
      } else if (labels[order[k]] != 0) {
        throw std::invalid_argument("auc: labels must be 0 or 1");
      }
    }
    i = j;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("auc: both classes required");
  const double u = positive_rank_sum - double(n_pos) * double(n_pos + 1) / 2.0;
  return u / (double(n_pos) * double(n_neg));
}

PooledPredictions predict_all(const DktParams<double>& params,
                              const std::vector<InteractionSequence>& seqs,
                              std::size_t batch_size) {
  PooledPredictions out;
  if (batch_size == 0) batch_size = 1;
  for (std::size_t begin = 0; begin < seqs.size(); begin += batch_size) {
    const std::size_t end = std::min(seqs.size(), begin + batch_size);
    std::vector<const InteractionSequence*> ptrs;
    for (std::size_t i = begin; i < end; ++i) ptrs.push_back(&seqs[i]);
    const Batch batch = make_batch(ptrs);
    const auto fp = forward(params, batch);
    for (std::size_t b = 0; b < ptrs.size(); ++b) {
      for (std::size_t t = 0; t < ptrs[b]->size(); ++t) {
        out.scores.push_back(fp.probs(Eigen::Index(t), Eigen::Index(b)));
        out.labels.push_back(ptrs[b]->interactions[t].response);
      }
    }
  }
  return out;
}

double evaluate_auc(const DktParams<double>& params, const std::vector<InteractionSequence>& seqs,
                    std::size_t batch_size) {
  const auto pooled = predict_all(params, seqs, batch_size);
  return auc(pooled.scores, pooled.labels);
}

MonotonicityReport monotonicity_report(std::span<const double> original,
                                       std::span<const double> augmented,
                                       const AugmentedSequence& aug) {
  if (aug.kind == AugmentKind::replacement)
    throw std::invalid_argument("monotonicity_report: needs an insertion or deletion draw");
  if (aug.sigma.size() != original.size())
    throw std::invalid_argument("monotonicity_report: sigma does not match the original trace");
  // insertion of correct / deletion of incorrect answers should raise predictions
  const bool expect_increase = (aug.kind == AugmentKind::insertion) == (aug.target_response == 1);
  MonotonicityReport rep;
  std::size_t aligned = 0, violations = 0;
  for (std::size_t t = 0; t < original.size(); ++t) {
    MonotonicityRow row;
    row.position = t + 1;
    row.original = original[t];
    if (aug.sigma[t]) {
      const double pa = augmented[*aug.sigma[t]];
      row.augmented = pa;
      row.violation = expect_increase ? pa < original[t] : pa > original[t];
      ++aligned;
      if (row.violation) ++violations;
    }
    rep.rows.push_back(row);
  }
  rep.violation_fraction = aligned ? double(violations) / double(aligned) : 0.0;
  return rep;
}

MonotonicityReport monotonicity_report(const DktParams<double>& params,
                                       const InteractionSequence& seq,
                                       const AugmentedSequence& aug) {
  const auto p = predict(params, seq).probs;
  const auto pa = predict(params, aug.sequence).probs;
  return monotonicity_report(std::span<const double>(p.data(), std::size_t(p.size())),
                             std::span<const double>(pa.data(), std::size_t(pa.size())), aug);
}

void write_heatmap(std::ostream& out, const std::vector<std::string>& labels,
                   const std::vector<std::vector<double>>& columns) {
  if (labels.size() != columns.size())
    throw std::invalid_argument("write_heatmap: one label per column required");
  std::size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.size());
  out << "position";
  for (const auto& l : labels) out << '\t' << l;
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    out << r + 1;
    for (const auto& c : columns) {
      out << '\t';
      if (r < c.size()) out << c[r]; else out << "nan";
    }
    out << '\n';
  }
}

MonotonicityAnalysis dataset_monotonicity_analysis(const std::vector<InteractionSequence>& seqs,
                                                   std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("dataset_monotonicity_analysis: bins must be >= 1");
  MonotonicityAnalysis a;
  a.bins = bins;
  a.hist_correct.assign(bins, 0);
  a.hist_incorrect.assign(bins, 0);
  double sum_c = 0.0, sum_i = 0.0;
  for (const auto& s : seqs) {
    std::size_t correct_so_far = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (t >= 1) {
        const double rate = double(correct_so_far) / double(t);
        const auto bin = std::min(bins - 1, static_cast<std::size_t>(rate * double(bins)));
        if (s.interactions[t].response == 1) {
          ++a.hist_correct[bin];
          ++a.count_correct;
          sum_c += rate;
        } else {
          ++a.hist_incorrect[bin];
          ++a.count_incorrect;
          sum_i += rate;
        }
      }
      correct_so_far += s.interactions[t].response == 1 ? 1 : 0;
    }
  }
  if (a.count_correct) a.mean_correct = sum_c / double(a.count_correct);
  if (a.count_incorrect) a.mean_incorrect = sum_i / double(a.count_incorrect);
  return a;
}

ConsistencyAnalysis consistency_loss_analysis(const DktParams<double>& params,
                                              const std::vector<InteractionSequence>& seqs,
                                              const QuestionPool& pool, double alpha,
                                              std::uint64_t seed) {
  if (!pool.has_skills())
    throw std::invalid_argument("consistency_loss_analysis: skill map required");
  AugmentConfig cfg;
  cfg.alpha = alpha;
  cfg.flavor = ReplaceFlavor::skill;
  cfg.seed = seed;
  ConsistencyAnalysis out;
  double sum_c = 0.0, sum_i = 0.0;
  for (const auto& s : seqs) {
    const auto aug = replace(s, pool, cfg);
    const auto p = predict(params, s).probs;
    const auto pr = predict(params, aug.sequence).probs;
    std::vector<bool> replaced(s.size(), false);
    for (auto t : aug.touched) replaced[t] = true;
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (replaced[t]) continue;
      const auto i = Eigen::Index(t);
      const double gap = (p(i) - pr(i)) * (p(i) - pr(i));
      const bool predicted_correct = (p(i) >= 0.5) == (s.interactions[t].response == 1);
      if (predicted_correct) {
        sum_c += gap;
        ++out.count_correct;
      } else {
        sum_i += gap;
        ++out.count_incorrect;
      }
    }
  }
  if (out.count_correct) out.mean_correct = sum_c / double(out.count_correct);
  if (out.count_incorrect) out.mean_incorrect = sum_i / double(out.count_incorrect);
  return out;
}

void write_monotonicity_analysis(std::ostream& out, const MonotonicityAnalysis& a) {
  out << "bin_low\tbin_high\tcount_correct\tcount_incorrect\n" << std::setprecision(17);
  for (std::size_t b = 0; b < a.bins; ++b) {
    out << double(b) / double(a.bins) << '\t' << double(b + 1) / double(a.bins) << '\t'
        << a.hist_correct[b] << '\t' << a.hist_incorrect[b] << '\n';
  }
  out << "# mean_correct\t" << a.mean_correct << "\n# mean_incorrect\t" << a.mean_incorrect << '\n';
}

void write_consistency_analysis(std::ostream& out, const ConsistencyAnalysis& a) {
  out << "prediction\tcount\tmean_consistency_loss\n" << std::setprecision(17);
  out << "correct\t" << a.count_correct << '\t' << a.mean_correct << '\n';
  out << "incorrect\t" << a.count_incorrect << '\t' << a.mean_incorrect << '\n';
}

}  // namespace ktaug
