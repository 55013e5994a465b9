#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ktaug/eval.hpp"
#include "ktaug/synth.hpp"

using namespace ktaug;

namespace {

double brute_force_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1;
      if (s[i] > s[j]) wins += 1;
      else if (s[i] == s[j]) wins += 0.5;
    }
  return wins / pairs;
}

InteractionSequence responses(std::initializer_list<int> rs) {
  InteractionSequence s{"s", {}};
  for (int r : rs) s.interactions.push_back({0, r});
  return s;
}

}  // namespace

TEST_CASE("auc examples") {
  const std::vector<double> s{0.9, 0.8, 0.2, 0.1};
  const std::vector<int> y{1, 1, 0, 0};
  CHECK(auc(s, y) == 1.0);
  const std::vector<double> flat{0.3, 0.3, 0.3, 0.3};
  CHECK(auc(flat, y) == 0.5);
  const std::vector<int> one_class{1, 1, 1, 1};
  CHECK_THROWS(auc(s, one_class));
  const std::vector<int> bad{1, 2, 0, 0};
  CHECK_THROWS(auc(s, bad));
}

TEST_CASE("auc matches the pairwise count") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(50);
    std::vector<int> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      s[i] = double(rng() % 20) / 20.0;  // plenty of ties
      y[i] = int(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    CHECK(std::abs(auc(s, y) - brute_force_auc(s, y)) < 1e-12);

    std::vector<double> t(50);
    for (std::size_t i = 0; i < 50; ++i) t[i] = std::exp(3 * s[i]) - 7;
    CHECK(std::abs(auc(t, y) - auc(s, y)) < 1e-12);

    std::vector<int> flipped(50);
    for (std::size_t i = 0; i < 50; ++i) flipped[i] = 1 - y[i];
    CHECK(std::abs(auc(s, y) + auc(s, flipped) - 1.0) < 1e-12);
  }
}

TEST_CASE("monotonicity report from traces") {
  AugmentedSequence ins;
  ins.kind = AugmentKind::insertion;
  ins.target_response = 1;
  ins.sigma = {std::size_t{1}, std::size_t{2}, std::size_t{3}};
  const std::vector<double> p{0.4, 0.5, 0.6};

  const std::vector<double> same{0.9, 0.4, 0.5, 0.6};
  const auto r0 = monotonicity_report(p, same, ins);
  CHECK(r0.rows.size() == 3);
  CHECK(r0.violation_fraction == 0.0);

  const std::vector<double> lower{0.9, 0.3, 0.4, 0.5};
  const auto r1 = monotonicity_report(p, lower, ins);
  CHECK(r1.violation_fraction == 1.0);
  CHECK(r1.rows[2].position == 3);
  CHECK(*r1.rows[2].augmented == 0.5);

  ins.target_response = 0;
  CHECK(monotonicity_report(p, lower, ins).violation_fraction == 0.0);

  AugmentedSequence del;
  del.kind = AugmentKind::deletion;
  del.target_response = 1;
  del.sigma = {std::nullopt, std::size_t{0}, std::size_t{1}};
  const std::vector<double> after{0.6, 0.5};
  const auto r2 = monotonicity_report(p, after, del);
  CHECK(r2.rows.size() == 3);
  CHECK_FALSE(r2.rows[0].augmented.has_value());
  CHECK(r2.violation_fraction == 0.5);

  AugmentedSequence rep;
  rep.kind = AugmentKind::replacement;
  rep.sigma = {std::size_t{0}};
  CHECK_THROWS(monotonicity_report(std::vector<double>{0.5}, std::vector<double>{0.5}, rep));
}

TEST_CASE("heatmap layout") {
  std::ostringstream out;
  write_heatmap(out, {"a", "b"}, {{0.25, 0.5}, {1.0}});
  CHECK(out.str() == "position\ta\tb\n1\t0.25\t1\n2\t0.5\tnan\n");
  CHECK_THROWS(write_heatmap(out, {"a"}, {}));
}

TEST_CASE("dataset monotonicity analysis") {
  const auto a = dataset_monotonicity_analysis({responses({1, 1, 1})});
  CHECK(a.count_correct == 2);
  CHECK(a.count_incorrect == 0);
  CHECK(a.hist_correct[9] == 2);
  CHECK(a.mean_correct == 1.0);

  const auto b = dataset_monotonicity_analysis({responses({0, 1})});
  CHECK(b.count_correct == 1);
  CHECK(b.hist_correct[0] == 1);
  CHECK(b.mean_correct == 0.0);

  CHECK(dataset_monotonicity_analysis({responses({1})}).count_correct == 0);

  SynthConfig cfg;
  cfg.n_students = 200;
  cfg.seed = 3;
  const auto data = generate(cfg);
  const auto m = dataset_monotonicity_analysis(data.dataset.sequences, 7);
  std::size_t mass = 0, expected = 0;
  for (std::size_t i = 0; i < 7; ++i) mass += m.hist_correct[i] + m.hist_incorrect[i];
  for (const auto& s : data.dataset.sequences) expected += s.size() - 1;
  CHECK(mass == expected);
  CHECK(m.count_correct + m.count_incorrect == expected);
  CHECK(m.mean_correct > m.mean_incorrect);
}

TEST_CASE("consistency analysis") {
  SynthConfig cfg;
  cfg.n_students = 30;
  cfg.n_questions = 12;
  cfg.n_skills = 4;
  const auto data = generate(cfg);
  const QuestionPool pool(12, &data.skills);
  const auto flat = DktParams<double>::zeros({12, 4, 4});
  const auto a = consistency_loss_analysis(flat, data.dataset.sequences, pool, 0.3, 1);
  CHECK(a.mean_correct == 0.0);
  CHECK(a.mean_incorrect == 0.0);

  const auto random = xavier_init<double>({12, 4, 4}, 2);
  const auto b = consistency_loss_analysis(random, data.dataset.sequences, pool, 0.3, 1);
  CHECK(b.count_correct + b.count_incorrect > 0);
  CHECK(b.mean_correct + b.mean_incorrect > 0.0);
  const auto c = consistency_loss_analysis(random, data.dataset.sequences, pool, 0.3, 1);
  CHECK(c.mean_correct == b.mean_correct);

  std::ostringstream out;
  write_consistency_analysis(out, b);
  const auto text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);  // header + two rows
  CHECK_THROWS(consistency_loss_analysis(random, data.dataset.sequences, QuestionPool(12), 0.3, 1));
}

TEST_CASE("pooled evaluation covers every timestep") {
  SynthConfig cfg;
  cfg.n_students = 20;
  const auto data = generate(cfg);
  const auto p = xavier_init<double>({50, 4, 4}, 1);
  const auto pooled = predict_all(p, data.dataset.sequences, 7);
  CHECK(pooled.scores.size() == data.dataset.interaction_count());
  const auto again = predict_all(p, data.dataset.sequences, 3);
  CHECK(std::abs(auc(again.scores, again.labels) - auc(pooled.scores, pooled.labels)) < 1e-12);
}
