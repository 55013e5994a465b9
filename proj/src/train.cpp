#include "ktaug/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ktaug/eval.hpp"

namespace ktaug {

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.warmup_steps < 1) throw std::invalid_argument("warmup_steps must be >= 1");
  if (cfg.max_seq_len < 2) throw std::invalid_argument("max_seq_len must be >= 2");
  if (!(cfg.base_lr > 0)) throw std::invalid_argument("base_lr must be positive");
  if (cfg.embed_dim == 0 || cfg.hidden_dim == 0)
    throw std::invalid_argument("model dimensions must be positive");
  std::set<std::string> names;
  for (const auto& a : cfg.augmentations) {
    if (!names.insert(a.name).second)
      throw std::invalid_argument("duplicate augmentation name '" + a.name + "'");
    if (a.weights.lambda_aug < 0 || a.weights.lambda_reg < 0)
      throw std::invalid_argument("augmentation '" + a.name + "' has a negative weight");
    if (!(a.config.alpha >= 0 && a.config.alpha <= 1))
      throw std::invalid_argument("augmentation '" + a.name + "' alpha outside [0, 1]");
    if (a.config.target_response != 0 && a.config.target_response != 1)
      throw std::invalid_argument("augmentation '" + a.name + "' target must be 0 or 1");
  }
  const auto& c = cfg.comparison;
  if (c.reconstruction < 0 || c.waviness_l1 < 0 || c.waviness_l2 < 0 || c.laplacian < 0)
    throw std::invalid_argument("comparison weights must be non-negative");
}

std::string to_json_line(const MetricsRecord& rec) {
  nlohmann::ordered_json j;
  j["step"] = rec.step;
  j["epoch"] = rec.epoch;
  j["lr"] = rec.lr;
  j["l_ori"] = rec.terms.l_ori;
  for (const auto& a : rec.terms.augmentations) {
    j["l_aug." + a.name] = a.l_aug;
    j["l_reg." + a.name] = a.l_reg;
  }
  if (rec.terms.reconstruction != 0) j["l_r"] = rec.terms.reconstruction;
  if (rec.terms.waviness_l1 != 0) j["l_w1"] = rec.terms.waviness_l1;
  if (rec.terms.waviness_l2 != 0) j["l_w2"] = rec.terms.waviness_l2;
  if (rec.terms.laplacian != 0) j["l_laplacian"] = rec.terms.laplacian;
  j["total"] = rec.terms.total;
  if (rec.val_auc) j["val_auc"] = *rec.val_auc;
  return j.dump();
}

void write_metrics(std::ostream& out, const std::vector<MetricsRecord>& log) {
  for (const auto& r : log) out << to_json_line(r) << '\n';
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n_sequences, std::size_t batch_size,
                                                   std::uint64_t seed) {
  if (n_sequences == 0) throw std::invalid_argument("make_batches: empty training set");
  if (batch_size == 0) throw std::invalid_argument("make_batches: batch_size must be >= 1");
  std::vector<std::size_t> order(n_sequences);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t begin = 0; begin < n_sequences; begin += batch_size) {
    const auto end = std::min(n_sequences, begin + batch_size);
    batches.emplace_back(order.begin() + std::ptrdiff_t(begin), order.begin() + std::ptrdiff_t(end));
  }
  return batches;
}

std::vector<Fold> kfold_split(const std::vector<std::string>& students, std::size_t k,
                              std::uint64_t seed) {
  std::vector<std::string> ids = students;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (ids.size() < k) throw std::invalid_argument("kfold_split: fewer students than folds");
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < ids.size(); ++i) folds[i % k].test.push_back(ids[i]);
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(), folds[g].test.end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
    std::sort(folds[f].test.begin(), folds[f].test.end());
  }
  return folds;
}

std::vector<std::string> student_ids(const Dataset& data) {
  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (const auto& s : data.sequences)
    if (seen.insert(s.student_id).second) ids.push_back(s.student_id);
  return ids;
}

std::vector<InteractionSequence> select_students(const Dataset& data,
                                                 const std::vector<std::string>& students) {
  const std::set<std::string> wanted(students.begin(), students.end());
  std::vector<InteractionSequence> out;
  for (const auto& s : data.sequences)
    if (wanted.count(s.student_id)) out.push_back(s);
  return out;
}

TrainResult train_run(const std::vector<InteractionSequence>& train, std::size_t catalog_size,
                      const SkillMap* skills, const TrainConfig& cfg,
                      const std::vector<InteractionSequence>& validation) {
  validate(cfg);
  const auto seqs = window_all(train, cfg.max_seq_len);
  if (seqs.empty()) throw std::invalid_argument("train_run: no training sequences of length >= 2");
  for (const auto& s : seqs) {
    const auto v = validate_sequence(s, catalog_size);
    if (!v) throw std::invalid_argument("train_run: student " + s.student_id + " step " +
                                        std::to_string(v.index) + ": " + v.message);
  }
  const auto val = validation.empty() ? validation : window_all(validation, cfg.max_seq_len);

  const ModelDims dims{catalog_size, cfg.embed_dim, cfg.hidden_dim};
  TrainResult res{xavier_init<double>(dims, mix_seed(cfg.seed, 0x1417)), {}, std::nullopt};
  AdamState<double> adam(dims);
  const QuestionPool pool(catalog_size, skills);

  DktParams<double> best = res.params;
  std::size_t evals_since_best = 0;
  bool stop = false;
  std::uint64_t step = 0;

  auto run_validation = [&](MetricsRecord& rec) {
    if (val.empty()) return;
    rec.val_auc = evaluate_auc(res.params, val, cfg.batch_size);
    if (!res.best_val_auc || *rec.val_auc > *res.best_val_auc) {
      res.best_val_auc = rec.val_auc;
      best = res.params;
      evals_since_best = 0;
    } else if (cfg.patience > 0 && ++evals_since_best >= cfg.patience) {
      stop = true;
    }
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
    const auto batches = make_batches(seqs.size(), cfg.batch_size, mix_seed(cfg.seed, epoch));
    for (std::size_t bi = 0; bi < batches.size() && !stop; ++bi) {
      if (cfg.max_steps && step >= cfg.max_steps) {
        stop = true;
        break;
      }
      ++step;
      std::vector<const InteractionSequence*> ptrs;
      for (auto i : batches[bi]) ptrs.push_back(&seqs[i]);
      const auto draws = draw_augmentations(ptrs, cfg.augmentations, pool,
                                            mix_seed(mix_seed(cfg.seed, 0xa06), step));
      auto obj = objective<double>(res.params, ptrs, cfg.augmentations, draws, cfg.comparison, skills);
      const double lr = noam_lr(step, cfg.base_lr, cfg.warmup_steps);
      adam_step(res.params, obj.grads, adam, lr);

      MetricsRecord rec{step, epoch, lr, std::move(obj.terms), std::nullopt};
      const bool epoch_end = bi + 1 == batches.size();
      if ((cfg.eval_every && step % cfg.eval_every == 0) || (!cfg.eval_every && epoch_end))
        run_validation(rec);
      res.log.push_back(std::move(rec));
    }
  }
  if (cfg.patience > 0 && res.best_val_auc) res.params = best;
  return res;
}

GridResult grid_run(const Dataset& data, const SkillMap* skills, const TrainConfig& base,
                    const GridSpec& grid) {
  if (base.augmentations.empty())
    throw std::invalid_argument("grid_run: base config needs at least one augmentation template");
  const auto folds = kfold_split(student_ids(data), grid.folds, base.seed);
  const std::size_t n_folds =
      grid.fold_limit ? std::min(grid.fold_limit, folds.size()) : folds.size();

  GridResult out;
  double best_auc = -1.0;
  for (const auto& tmpl : base.augmentations) {
    for (double alpha : grid.alphas) {
      for (double lreg : grid.lambda_regs) {
        for (double laug : grid.lambda_augs) {
          GridRow row;
          row.augmentation = tmpl.name;
          row.cell = {alpha, lreg, laug};
          TrainConfig cfg = base;
          AugmentationSpec spec = tmpl;
          spec.config.alpha = alpha;
          spec.weights = {laug, lreg};
          cfg.augmentations = {spec};
          for (std::size_t f = 0; f < n_folds; ++f) {
            const auto train = select_students(data, folds[f].train);
            const auto test = window_all(select_students(data, folds[f].test), cfg.max_seq_len);
            const auto result = train_run(train, data.catalog_size, skills, cfg);
            row.fold_auc.push_back(evaluate_auc(result.params, test, cfg.batch_size));
          }
          const double n = double(row.fold_auc.size());
          row.mean_auc = std::accumulate(row.fold_auc.begin(), row.fold_auc.end(), 0.0) / n;
          double ss = 0.0;
          for (double a : row.fold_auc) ss += (a - row.mean_auc) * (a - row.mean_auc);
          row.std_auc = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
          if (row.mean_auc > best_auc) {
            best_auc = row.mean_auc;
            out.best = out.rows.size();
          }
          out.rows.push_back(std::move(row));
        }
      }
    }
  }
  return out;
}

void write_grid(std::ostream& out, const GridResult& result) {
  out << "augmentation\talpha\tlambda_reg\tlambda_aug\tmean_auc\tstd_auc\tfolds\tbest\n";
  out.precision(17);
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    out << r.augmentation << '\t' << r.cell.alpha << '\t' << r.cell.lambda_reg << '\t'
        << r.cell.lambda_aug << '\t' << r.mean_auc << '\t' << r.std_auc << '\t'
        << r.fold_auc.size() << '\t' << (i == result.best ? 1 : 0) << '\n';
  }
}

}  // namespace ktaug
