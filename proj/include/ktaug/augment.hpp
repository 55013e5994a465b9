#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "ktaug/core.hpp"

namespace ktaug {

struct AugmentConfig {
  double alpha = 0.3;
  ReplaceFlavor flavor = ReplaceFlavor::skill;
  int target_response = 1;
  std::uint64_t seed = 0;
};

// Question catalog with precomputed replacement candidates.
//
// For each question: questions sharing at least one skill, and questions with an
// identical skill set. Both lists exclude the question itself.
class QuestionPool {
 public:
  explicit QuestionPool(std::size_t catalog_size, const SkillMap* skills = nullptr);

  std::size_t size() const { return catalog_size_; }
  bool has_skills() const { return has_skills_; }
  const std::vector<QuestionId>& skill_mates(QuestionId q) const { return skill_mates_.at(q); }
  const std::vector<QuestionId>& skill_set_mates(QuestionId q) const {
    return skill_set_mates_.at(q);
  }

 private:
  std::size_t catalog_size_;
  bool has_skills_;
  std::vector<std::vector<QuestionId>> skill_mates_;
  std::vector<std::vector<QuestionId>> skill_set_mates_;
};

// Per-call RNG stream derived from (seed, student id, kind).
std::mt19937_64 augment_rng(std::uint64_t seed, std::string_view student_id, AugmentKind kind);

// Mixes extra words (epoch, step, ...) into a seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t word);

AugmentedSequence replace(const InteractionSequence& seq, const QuestionPool& pool,
                          const AugmentConfig& cfg);

// Inserts k = round(alpha * T) interactions (at least one when alpha > 0 and T >= 2)
// with response cfg.target_response at uniformly chosen slots of the lengthened sequence.
AugmentedSequence insert(const InteractionSequence& seq, const QuestionPool& pool,
                         const AugmentConfig& cfg);

// Insertion with the inserted slots given explicitly (0-based, augmented index space).
AugmentedSequence insert_at(const InteractionSequence& seq,
                            const std::vector<std::size_t>& slots,
                            const std::vector<QuestionId>& questions, int target_response);

// Deletes each interaction with response == target independently with probability alpha.
// Never empties the sequence: the last matching index survives if everything would go.
AugmentedSequence erase(const InteractionSequence& seq, const AugmentConfig& cfg);

AugmentedSequence augment(AugmentKind kind, const InteractionSequence& seq,
                          const QuestionPool& pool, const AugmentConfig& cfg);

}  // namespace ktaug
