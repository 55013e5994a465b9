#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ktaug/augment.hpp"
#include "ktaug/model.hpp"

namespace ktaug {

// Mann-Whitney AUC with midranks for ties. Throws when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct PooledPredictions {
  std::vector<double> scores;
  std::vector<int> labels;
};

// Every timestep of every sequence, in order.
PooledPredictions predict_all(const DktParams<double>& params,
                              const std::vector<InteractionSequence>& seqs,
                              std::size_t batch_size = 64);

double evaluate_auc(const DktParams<double>& params, const std::vector<InteractionSequence>& seqs,
                    std::size_t batch_size = 64);

struct MonotonicityRow {
  std::size_t position = 0;  // 1-based original timestep
  double original = 0.0;
  std::optional<double> augmented;  // nullopt for deleted interactions
  bool violation = false;
};

struct MonotonicityReport {
  std::vector<MonotonicityRow> rows;
  double violation_fraction = 0.0;
};

// Aligned predictions for an insertion or deletion draw. Equality is not a violation.
MonotonicityReport monotonicity_report(const DktParams<double>& params,
                                       const InteractionSequence& seq,
                                       const AugmentedSequence& aug);

// Same report from precomputed traces.
MonotonicityReport monotonicity_report(std::span<const double> original,
                                       std::span<const double> augmented,
                                       const AugmentedSequence& aug);

// Dense grid, one-line tab-separated header: "position" then one column per label.
void write_heatmap(std::ostream& out, const std::vector<std::string>& labels,
                   const std::vector<std::vector<double>>& columns);

struct MonotonicityAnalysis {
  std::size_t bins = 10;
  std::vector<std::size_t> hist_correct;    // R_t = 1
  std::vector<std::size_t> hist_incorrect;  // R_t = 0
  double mean_correct = 0.0;
  double mean_incorrect = 0.0;
  std::size_t count_correct = 0;
  std::size_t count_incorrect = 0;
};

// Distribution of the past correctness rate for t >= 2, split by the current response.
MonotonicityAnalysis dataset_monotonicity_analysis(const std::vector<InteractionSequence>& seqs,
                                                   std::size_t bins = 10);

struct ConsistencyAnalysis {
  double mean_correct = 0.0;    // correctly predicted responses
  double mean_incorrect = 0.0;  // incorrectly predicted responses
  std::size_t count_correct = 0;
  std::size_t count_incorrect = 0;
};

// One skill-based replacement draw per sequence; squared prediction gap at every
// unreplaced position, bucketed by whether the original prediction (threshold 0.5) was right.
ConsistencyAnalysis consistency_loss_analysis(const DktParams<double>& params,
                                              const std::vector<InteractionSequence>& seqs,
                                              const QuestionPool& pool, double alpha,
                                              std::uint64_t seed);

void write_monotonicity_analysis(std::ostream& out, const MonotonicityAnalysis& a);
void write_consistency_analysis(std::ostream& out, const ConsistencyAnalysis& a);

}  // namespace ktaug
