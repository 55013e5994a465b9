// ktaug: command-line front end for ingestion, synthetic data, training, evaluation and
// the analysis reports. Run `ktaug <command> --help` for the flags of each command.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "ktaug/augment.hpp"
#include "ktaug/checkpoint.hpp"
#include "ktaug/config.hpp"
#include "ktaug/eval.hpp"
#include "ktaug/ingest.hpp"
#include "ktaug/synth.hpp"
#include "ktaug/train.hpp"

namespace fs = std::filesystem;
using namespace ktaug;

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Writes to `path`, or stdout when path is empty.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
  } else {
    auto out = open_out(path);
    write(out);
  }
}

const SkillMap* skills_of(const IngestResult& data) {
  return data.skills ? &*data.skills : nullptr;
}

void write_split(const fs::path& path, const Fold& fold) {
  auto out = open_out(path);
  out << "student_id,role\n";
  for (const auto& s : fold.train) out << s << ",train\n";
  for (const auto& s : fold.test) out << s << ",test\n";
}

Fold read_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Fold fold;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) throw std::runtime_error("bad split line '" + line + "'");
    const auto id = line.substr(0, comma);
    const auto role = line.substr(comma + 1);
    if (role == "train") fold.train.push_back(id);
    else if (role == "test") fold.test.push_back(id);
    else throw std::runtime_error("bad split role '" + role + "'");
  }
  return fold;
}

const InteractionSequence& find_student(const Dataset& data, const std::string& id) {
  for (const auto& s : data.sequences)
    if (s.student_id == id) return s;
  throw std::runtime_error("unknown student '" + id + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-tracing training with consistency and monotonicity regularisation"};
  app.require_subcommand(1);

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Ingest delimited logs into a dense dataset directory");
  std::string in_interactions, in_skills, in_out;
  char in_delim = ',';
  ingest_cmd->add_option("--interactions", in_interactions, "Interaction log")->required();
  ingest_cmd->add_option("--skills", in_skills, "Question/skill table");
  ingest_cmd->add_option("--out", in_out, "Output dataset directory")->required();
  ingest_cmd->add_option("--delimiter", in_delim, "Field delimiter");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset directory");
  SynthConfig sc;
  std::string synth_out;
  synth_cmd->add_option("--out", synth_out, "Output dataset directory")->required();
  synth_cmd->add_option("--students", sc.n_students);
  synth_cmd->add_option("--questions", sc.n_questions);
  synth_cmd->add_option("--skills", sc.n_skills);
  synth_cmd->add_option("--min-len", sc.min_len);
  synth_cmd->add_option("--max-len", sc.max_len);
  synth_cmd->add_option("--increment", sc.learning_increment, "Ability gain per correct answer");
  synth_cmd->add_option("--seed", sc.seed);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one fold and write a run directory");
  std::string tr_config, tr_data, tr_run;
  std::optional<std::uint64_t> tr_seed;
  std::optional<std::size_t> tr_fold;
  train_cmd->add_option("--config", tr_config, "Config file")->required();
  train_cmd->add_option("--data", tr_data, "Dataset directory")->required();
  train_cmd->add_option("--run", tr_run, "Run directory to create")->required();
  train_cmd->add_option("--seed", tr_seed, "Overrides [train] seed");
  train_cmd->add_option("--fold", tr_fold, "Overrides [split] fold");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "AUC of a trained run");
  std::string ev_run, ev_data, ev_out, ev_split = "test";
  bool ev_all = false;
  eval_cmd->add_option("--run", ev_run, "Run directory")->required();
  eval_cmd->add_option("--data", ev_data, "Dataset directory")->required();
  auto* ev_split_opt = eval_cmd->add_option("--split", ev_split, "train or test")
                           ->check(CLI::IsMember({"train", "test"}));
  eval_cmd->add_flag("--all", ev_all, "Evaluate every student")->excludes(ev_split_opt);
  eval_cmd->add_option("--out", ev_out, "Result file (default stdout)");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Hyperparameter grid with k-fold evaluation");
  std::string gr_config, gr_data, gr_out;
  std::optional<std::uint64_t> gr_seed;
  grid_cmd->add_option("--config", gr_config, "Config file with [aug.*] templates")->required();
  grid_cmd->add_option("--data", gr_data, "Dataset directory")->required();
  grid_cmd->add_option("--out", gr_out, "Result table (default stdout)");
  grid_cmd->add_option("--seed", gr_seed, "Overrides [train] seed");

  // analyze-monotonicity
  auto* am_cmd = app.add_subcommand("analyze-monotonicity", "Past correctness-rate histograms");
  std::string am_data, am_out;
  std::size_t am_bins = 10;
  am_cmd->add_option("--data", am_data, "Dataset directory")->required();
  am_cmd->add_option("--bins", am_bins);
  am_cmd->add_option("--out", am_out, "Result table (default stdout)");

  // analyze-consistency
  auto* ac_cmd = app.add_subcommand("analyze-consistency", "Consistency loss by prediction correctness");
  std::string ac_run, ac_data, ac_out;
  double ac_alpha = 0.3;
  std::uint64_t ac_seed = 0;
  ac_cmd->add_option("--run", ac_run, "Run directory")->required();
  ac_cmd->add_option("--data", ac_data, "Dataset directory")->required();
  ac_cmd->add_option("--alpha", ac_alpha);
  ac_cmd->add_option("--seed", ac_seed);
  ac_cmd->add_option("--out", ac_out, "Result table (default stdout)");

  // report-heatmap
  auto* hm_cmd = app.add_subcommand("report-heatmap", "Aligned predictions before/after an augmentation");
  std::string hm_data, hm_student, hm_out, hm_kind = "insertion";
  std::vector<std::string> hm_runs;
  double hm_alpha = 0.3;
  int hm_target = 1;
  std::uint64_t hm_seed = 0;
  hm_cmd->add_option("--data", hm_data, "Dataset directory")->required();
  hm_cmd->add_option("--run", hm_runs, "LABEL=RUN_DIR, repeatable")->required();
  hm_cmd->add_option("--student", hm_student, "Student id")->required();
  hm_cmd->add_option("--kind", hm_kind)->check(CLI::IsMember({"insertion", "deletion"}));
  hm_cmd->add_option("--alpha", hm_alpha);
  hm_cmd->add_option("--target", hm_target)->check(CLI::IsMember({0, 1}));
  hm_cmd->add_option("--seed", hm_seed);
  hm_cmd->add_option("--out", hm_out, "Grid file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest_cmd) {
      IngestOptions opts;
      opts.delimiter = in_delim;
      const auto res = ingest(fs::path(in_interactions),
                              in_skills.empty() ? std::nullopt : std::optional<fs::path>(in_skills), opts);
      export_dataset_dir(in_out, res);
      const auto st = summarize(res.dataset);
      std::cout << "students\t" << st.sequences << "\ninteractions\t" << st.interactions
                << "\nquestions\t" << res.dataset.catalog_size << "\ndropped_rows\t" << res.dropped_rows
                << '\n';
    } else if (*synth_cmd) {
      const auto data = generate(sc);
      IngestResult res;
      res.dataset = data.dataset;
      res.skills = data.skills;
      export_dataset_dir(synth_out, res);
      const auto st = summarize(data.dataset);
      std::cout << std::setprecision(17) << "students\t" << st.sequences << "\ninteractions\t"
                << st.interactions << "\ncorrect_rate\t" << st.correct_rate << "\nmean_length\t"
                << st.mean_length << '\n';
    } else if (*train_cmd) {
      auto cfg = load_config(tr_config);
      if (tr_seed) cfg.train.seed = *tr_seed;
      if (tr_fold) cfg.fold = *tr_fold;
      if (cfg.fold >= cfg.folds) throw std::invalid_argument("--fold must be < folds");
      const auto data = load_dataset_dir(tr_data);
      const auto folds = kfold_split(student_ids(data.dataset), cfg.folds, cfg.train.seed);
      const auto& fold = folds[cfg.fold];
      const auto result = train_run(select_students(data.dataset, fold.train), data.dataset.catalog_size,
                                    skills_of(data), cfg.train);
      fs::create_directories(tr_run);
      {
        auto out = open_out(fs::path(tr_run) / "config.ini");
        write_config(out, cfg);
      }
      {
        auto out = open_out(fs::path(tr_run) / "metrics.jsonl");
        write_metrics(out, result.log);
      }
      write_split(fs::path(tr_run) / "split.csv", fold);
      save_checkpoint(fs::path(tr_run) / "model.ckpt", result.params);
      std::cout << "steps\t" << result.log.size() << '\n';
    } else if (*eval_cmd) {
      const auto cfg = load_config(fs::path(ev_run) / "config.ini");
      const auto params = load_checkpoint(fs::path(ev_run) / "model.ckpt");
      const auto data = load_dataset_dir(ev_data);
      std::vector<InteractionSequence> seqs;
      if (ev_all) {
        seqs = data.dataset.sequences;
      } else {
        const auto fold = read_split(fs::path(ev_run) / "split.csv");
        seqs = select_students(data.dataset, ev_split == "train" ? fold.train : fold.test);
      }
      seqs = window_all(seqs, cfg.train.max_seq_len);
      const auto pooled = predict_all(params, seqs, cfg.train.batch_size);
      const double value = auc(pooled.scores, pooled.labels);
      emit(ev_out, [&](std::ostream& out) {
        out << std::setprecision(17) << "split\tinteractions\tauc\n"
            << (ev_all ? "all" : ev_split) << '\t' << pooled.scores.size() << '\t' << value << '\n';
      });
    } else if (*grid_cmd) {
      auto cfg = load_config(gr_config);
      if (gr_seed) cfg.train.seed = *gr_seed;
      const auto data = load_dataset_dir(gr_data);
      const auto result = grid_run(data.dataset, skills_of(data), cfg.train, cfg.grid);
      emit(gr_out, [&](std::ostream& out) { write_grid(out, result); });
    } else if (*am_cmd) {
      const auto data = load_dataset_dir(am_data);
      const auto a = dataset_monotonicity_analysis(data.dataset.sequences, am_bins);
      emit(am_out, [&](std::ostream& out) { write_monotonicity_analysis(out, a); });
    } else if (*ac_cmd) {
      const auto cfg = load_config(fs::path(ac_run) / "config.ini");
      const auto params = load_checkpoint(fs::path(ac_run) / "model.ckpt");
      const auto data = load_dataset_dir(ac_data);
      if (!data.skills) throw std::invalid_argument("analyze-consistency needs a skills.csv");
      const auto fold = read_split(fs::path(ac_run) / "split.csv");
      const auto seqs = window_all(select_students(data.dataset, fold.test), cfg.train.max_seq_len);
      const QuestionPool pool(data.dataset.catalog_size, &*data.skills);
      const auto a = consistency_loss_analysis(params, seqs, pool, ac_alpha, ac_seed);
      emit(ac_out, [&](std::ostream& out) { write_consistency_analysis(out, a); });
    } else if (*hm_cmd) {
      const auto data = load_dataset_dir(hm_data);
      const auto& seq = find_student(data.dataset, hm_student);
      const QuestionPool pool(data.dataset.catalog_size, skills_of(data));
      AugmentConfig acfg;
      acfg.alpha = hm_alpha;
      acfg.target_response = hm_target;
      acfg.seed = hm_seed;
      const auto aug = augment(parse_augment_kind(hm_kind), seq, pool, acfg);
      std::vector<std::string> labels;
      std::vector<std::vector<double>> columns;
      for (const auto& spec : hm_runs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("--run expects LABEL=DIR");
        const auto label = spec.substr(0, eq);
        const auto params = load_checkpoint(fs::path(spec.substr(eq + 1)) / "model.ckpt");
        const auto rep = monotonicity_report(params, seq, aug);
        std::vector<double> orig, augd, viol;
        for (const auto& row : rep.rows) {
          orig.push_back(row.original);
          augd.push_back(row.augmented.value_or(std::numeric_limits<double>::quiet_NaN()));
          viol.push_back(row.violation ? 1.0 : 0.0);
        }
        labels.push_back(label + ".original");
        labels.push_back(label + ".augmented");
        labels.push_back(label + ".violation");
        columns.push_back(std::move(orig));
        columns.push_back(std::move(augd));
        columns.push_back(std::move(viol));
        std::cerr << label << " violation_fraction " << rep.violation_fraction << '\n';
      }
      emit(hm_out, [&](std::ostream& out) { write_heatmap(out, labels, columns); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
