#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ktaug {

using QuestionId = std::size_t;
using SkillId = std::size_t;

// One (question, response) event. response is 1 for correct, 0 for incorrect.
struct Interaction {
  QuestionId question = 0;
  int response = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct InteractionSequence {
  std::string student_id;
  std::vector<Interaction> interactions;

  std::size_t size() const { return interactions.size(); }
  friend bool operator==(const InteractionSequence&, const InteractionSequence&) = default;
};

// question id -> non-empty set of skill ids.
class SkillMap {
 public:
  SkillMap() = default;
  explicit SkillMap(std::size_t catalog_size) : skills_(catalog_size) {}

  void add(QuestionId q, SkillId s);
  const std::set<SkillId>& skills_of(QuestionId q) const { return skills_.at(q); }
  bool has(QuestionId q) const { return q < skills_.size() && !skills_[q].empty(); }
  std::size_t catalog_size() const { return skills_.size(); }
  std::size_t skill_count() const;
  bool shares_skill(QuestionId a, QuestionId b) const;

  friend bool operator==(const SkillMap&, const SkillMap&) = default;

 private:
  std::vector<std::set<SkillId>> skills_;
};

struct Dataset {
  std::vector<InteractionSequence> sequences;
  std::size_t catalog_size = 0;

  std::size_t interaction_count() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct ValidationResult {
  bool ok = true;
  // 1-based timestep of the first offending interaction; 0 for whole-sequence errors.
  std::size_t index = 0;
  std::string message;

  explicit operator bool() const { return ok; }
  static ValidationResult success() { return {}; }
  static ValidationResult failure(std::size_t index, std::string message) {
    return {false, index, std::move(message)};
  }
};

ValidationResult validate_sequence(const InteractionSequence& seq, std::size_t catalog_size);

// Splits a history into consecutive non-overlapping chunks of at most max_len.
// Throws std::invalid_argument when max_len < 2.
std::vector<InteractionSequence> window(const InteractionSequence& seq, std::size_t max_len);

// Windows every sequence and drops chunks shorter than 2. Returns the number dropped
// through `dropped` when non-null.
std::vector<InteractionSequence> window_all(const std::vector<InteractionSequence>& seqs,
                                            std::size_t max_len,
                                            std::size_t* dropped = nullptr);

enum class AugmentKind { replacement, insertion, deletion };

enum class ReplaceFlavor { skill, skill_set, question_random, interaction_random };

std::string to_string(AugmentKind kind);
std::string to_string(ReplaceFlavor flavor);
AugmentKind parse_augment_kind(const std::string& text);
ReplaceFlavor parse_replace_flavor(const std::string& text);

// Result of augmenting one sequence.
//
// touched holds 0-based indices: replaced positions (original == augmented index space),
// inserted positions (augmented space), or deleted positions (original space).
// sigma[t] is the augmented position of original interaction t, or nullopt if t was deleted.
struct AugmentedSequence {
  InteractionSequence sequence;
  AugmentKind kind = AugmentKind::replacement;
  ReplaceFlavor flavor = ReplaceFlavor::skill;
  int target_response = 1;
  std::vector<std::size_t> touched;
  std::vector<std::optional<std::size_t>> sigma;

  std::size_t size() const { return sequence.size(); }
};

// Mechanically checks every structural invariant of an (original, augmented) pair.
// With a skill map, skill-flavored replacements are also checked for eligibility.
ValidationResult check_augmented(const InteractionSequence& original,
                                 const AugmentedSequence& augmented,
                                 const SkillMap* skills = nullptr);

}  // namespace ktaug
