#pragma once

#include <cstdint>

#include "ktaug/core.hpp"

namespace ktaug {

// IRT-with-learning student simulator.
//
// Each question carries one primary skill (every skill gets at least one question) and,
// with probability second_skill_prob, a second one. A question's difficulty is the mean
// of its skills' difficulties plus small question-level noise, so skill-mates behave alike.
// A student has a general ability plus a per-skill offset; every correct answer adds
// learning_increment to the ability of each skill of the answered question. The response
// to question q is Bernoulli(sigmoid(mean ability over skills(q) - difficulty(q))).
// Consecutive questions stay within the previous skill with probability stay_prob.
struct SynthConfig {
  std::size_t n_students = 500;
  std::size_t n_questions = 50;
  std::size_t n_skills = 10;
  std::size_t min_len = 20;
  std::size_t max_len = 60;
  double learning_increment = 0.15;
  double general_ability_sd = 1.0;
  double skill_ability_sd = 0.7;
  double skill_difficulty_sd = 1.0;
  double question_noise_sd = 0.1;
  double second_skill_prob = 0.3;
  double stay_prob = 0.6;
  std::uint64_t seed = 0;
};

struct SynthData {
  Dataset dataset;
  SkillMap skills;
};

SynthData generate(const SynthConfig& cfg);

struct DatasetStats {
  std::size_t sequences = 0;
  std::size_t interactions = 0;
  double correct_rate = 0.0;
  double mean_length = 0.0;
  std::size_t min_length = 0;
  std::size_t max_length = 0;
};

DatasetStats summarize(const Dataset& data);

}  // namespace ktaug
