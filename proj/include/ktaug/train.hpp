#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ktaug/objective.hpp"
#include "ktaug/optim.hpp"

namespace ktaug {

struct TrainConfig {
  std::size_t batch_size = 64;
  double base_lr = 0.001;  // peak learning rate, reached at warmup_steps
  std::uint64_t warmup_steps = 4000;
  std::size_t max_seq_len = 100;
  std::size_t epochs = 20;
  std::uint64_t max_steps = 0;  // 0: no step cap
  std::uint64_t seed = 0;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 32;
  std::vector<AugmentationSpec> augmentations;
  ComparisonWeights comparison;
  std::uint64_t eval_every = 0;  // steps between validation evaluations; 0: end of each epoch
  std::size_t patience = 0;      // early stopping on validation AUC; 0: off
};

void validate(const TrainConfig& cfg);

struct MetricsRecord {
  std::uint64_t step = 0;
  std::size_t epoch = 0;
  double lr = 0.0;
  ObjectiveTerms terms;
  std::optional<double> val_auc;
};

// One JSON object per line; doubles printed in shortest round-trip form.
std::string to_json_line(const MetricsRecord& rec);
void write_metrics(std::ostream& out, const std::vector<MetricsRecord>& log);

// Shuffled index batches; the last batch holds the remainder.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n_sequences, std::size_t batch_size,
                                                   std::uint64_t seed);

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Partitions distinct student ids into k folds whose sizes differ by at most one.
std::vector<Fold> kfold_split(const std::vector<std::string>& students, std::size_t k,
                              std::uint64_t seed);

std::vector<std::string> student_ids(const Dataset& data);

// Sequences of the listed students, in dataset order.
std::vector<InteractionSequence> select_students(const Dataset& data,
                                                 const std::vector<std::string>& students);

struct TrainResult {
  DktParams<double> params;
  std::vector<MetricsRecord> log;
  std::optional<double> best_val_auc;
};

// Trains on `train` (windowed internally). `validation`, when non-empty, is evaluated
// on the configured cadence; with patience > 0 the best-validation parameters are returned.
TrainResult train_run(const std::vector<InteractionSequence>& train, std::size_t catalog_size,
                      const SkillMap* skills, const TrainConfig& cfg,
                      const std::vector<InteractionSequence>& validation = {});

struct GridCell {
  double alpha = 0.0;
  double lambda_reg = 0.0;
  double lambda_aug = 0.0;
};

struct GridSpec {
  std::vector<double> alphas{0.1, 0.3, 0.5};
  std::vector<double> lambda_regs{1, 10, 50, 100};
  std::vector<double> lambda_augs{0, 1};
  std::size_t folds = 5;
  std::size_t fold_limit = 0;  // train only the first n folds; 0: all
};

struct GridRow {
  std::string augmentation;
  GridCell cell;
  std::vector<double> fold_auc;
  double mean_auc = 0.0;
  double std_auc = 0.0;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::size_t best = 0;
};

// For each augmentation template in base.augmentations, trains every cell of the grid
// (with only that augmentation active) on every fold and reports test AUC.
GridResult grid_run(const Dataset& data, const SkillMap* skills, const TrainConfig& base,
                    const GridSpec& grid);

void write_grid(std::ostream& out, const GridResult& result);

}  // namespace ktaug
