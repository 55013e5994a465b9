#include "ktaug/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace ktaug {

namespace {

// Standard normal quantile by bisection on the CDF.
double normal_quantile(double u) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// n evenly spaced normal quantiles scaled by sd, in random order.
std::vector<double> stratified_normal(std::size_t n, double sd, std::mt19937_64& rng) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = sd * normal_quantile((double(i) + 0.5) / double(n));
  std::shuffle(xs.begin(), xs.end(), rng);
  return xs;
}

}  // namespace

SynthData generate(const SynthConfig& cfg) {
  if (cfg.n_skills == 0 || cfg.n_questions == 0 || cfg.n_students == 0)
    throw std::invalid_argument("generate: dimensions must be positive");
  if (cfg.n_skills > cfg.n_questions)
    throw std::invalid_argument("generate: more skills than questions");
  if (cfg.min_len < 1 || cfg.min_len > cfg.max_len)
    throw std::invalid_argument("generate: invalid sequence length range");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // primary skills: a shuffled round-robin so every skill is used
  std::vector<SkillId> primary(cfg.n_questions);
  for (std::size_t q = 0; q < cfg.n_questions; ++q) primary[q] = q % cfg.n_skills;
  std::shuffle(primary.begin(), primary.end(), rng);

  SynthData out;
  out.skills = SkillMap(cfg.n_questions);
  std::uniform_int_distribution<SkillId> any_skill(0, cfg.n_skills - 1);
  for (QuestionId q = 0; q < cfg.n_questions; ++q) {
    out.skills.add(q, primary[q]);
    if (cfg.n_skills > 1 && unit(rng) < cfg.second_skill_prob) {
      SkillId s = any_skill(rng);
      while (s == primary[q]) s = any_skill(rng);
      out.skills.add(q, s);
    }
  }

  const auto skill_difficulty = stratified_normal(cfg.n_skills, cfg.skill_difficulty_sd, rng);
  std::vector<double> difficulty(cfg.n_questions);
  std::vector<std::vector<QuestionId>> by_skill(cfg.n_skills);
  for (QuestionId q = 0; q < cfg.n_questions; ++q) {
    double d = 0.0;
    for (auto s : out.skills.skills_of(q)) {
      d += skill_difficulty[s];
      by_skill[s].push_back(q);
    }
    difficulty[q] = d / double(out.skills.skills_of(q).size()) + cfg.question_noise_sd * normal(rng);
  }

  // lengths evenly cover [min_len, max_len]; students get them in random order
  std::vector<std::size_t> lengths(cfg.n_students);
  const double span = double(cfg.max_len - cfg.min_len + 1);
  for (std::size_t st = 0; st < cfg.n_students; ++st)
    lengths[st] = cfg.min_len + std::size_t((double(st) + 0.5) / double(cfg.n_students) * span);
  std::shuffle(lengths.begin(), lengths.end(), rng);
  const auto general_ability = stratified_normal(cfg.n_students, cfg.general_ability_sd, rng);

  out.dataset.catalog_size = cfg.n_questions;
  for (std::size_t st = 0; st < cfg.n_students; ++st) {
    InteractionSequence seq;
    seq.student_id = "s" + std::to_string(st);
    const double general = general_ability[st];
    std::vector<double> ability(cfg.n_skills);
    for (auto& a : ability) a = general + cfg.skill_ability_sd * normal(rng);

    const std::size_t T = lengths[st];
    SkillId current = any_skill(rng);
    for (std::size_t t = 0; t < T; ++t) {
      if (t > 0 && unit(rng) >= cfg.stay_prob) current = any_skill(rng);
      const auto& pool = by_skill[current];
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const QuestionId q = pool[pick(rng)];
      double theta = 0.0;
      for (auto s : out.skills.skills_of(q)) theta += ability[s];
      theta /= double(out.skills.skills_of(q).size());
      const double p = 1.0 / (1.0 + std::exp(-(theta - difficulty[q])));
      const int r = unit(rng) < p ? 1 : 0;
      if (r == 1)
        for (auto s : out.skills.skills_of(q)) ability[s] += cfg.learning_increment;
      seq.interactions.push_back({q, r});
    }
    out.dataset.sequences.push_back(std::move(seq));
  }
  return out;
}

DatasetStats summarize(const Dataset& data) {
  DatasetStats s;
  s.sequences = data.sequences.size();
  std::size_t correct = 0;
  s.min_length = data.sequences.empty() ? 0 : data.sequences.front().size();
  for (const auto& seq : data.sequences) {
    s.interactions += seq.size();
    s.min_length = std::min(s.min_length, seq.size());
    s.max_length = std::max(s.max_length, seq.size());
    for (const auto& it : seq.interactions) correct += it.response == 1 ? 1 : 0;
  }
  if (s.interactions) s.correct_rate = double(correct) / double(s.interactions);
  if (s.sequences) s.mean_length = double(s.interactions) / double(s.sequences);
  return s;
}

}  // namespace ktaug
