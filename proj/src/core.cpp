#include "ktaug/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace ktaug {

void SkillMap::add(QuestionId q, SkillId s) {
  if (q >= skills_.size()) skills_.resize(q + 1);
  skills_[q].insert(s);
}

std::size_t SkillMap::skill_count() const {
  std::set<SkillId> all;
  for (const auto& s : skills_) all.insert(s.begin(), s.end());
  return all.size();
}

bool SkillMap::shares_skill(QuestionId a, QuestionId b) const {
  if (!has(a) || !has(b)) return false;
  const auto& sa = skills_[a];
  const auto& sb = skills_[b];
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia == *ib) return true;
    if (*ia < *ib) ++ia; else ++ib;
  }
  return false;
}

std::size_t Dataset::interaction_count() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.size();
  return n;
}

ValidationResult validate_sequence(const InteractionSequence& seq, std::size_t catalog_size) {
  if (seq.interactions.empty()) return ValidationResult::failure(0, "empty sequence");
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto& it = seq.interactions[t];
    if (it.question >= catalog_size)
      return ValidationResult::failure(t + 1, "question id " + std::to_string(it.question) +
                                                  " outside catalog of size " +
                                                  std::to_string(catalog_size));
    if (it.response != 0 && it.response != 1)
      return ValidationResult::failure(t + 1, "response " + std::to_string(it.response) +
                                                  " not in {0,1}");
  }
  return ValidationResult::success();
}

std::vector<InteractionSequence> window(const InteractionSequence& seq, std::size_t max_len) {
  if (max_len < 2) throw std::invalid_argument("window: max_len must be at least 2");
  std::vector<InteractionSequence> chunks;
  for (std::size_t begin = 0; begin < seq.size(); begin += max_len) {
    const std::size_t end = std::min(seq.size(), begin + max_len);
    InteractionSequence chunk;
    chunk.student_id = seq.student_id;
    chunk.interactions.assign(seq.interactions.begin() + static_cast<std::ptrdiff_t>(begin),
                              seq.interactions.begin() + static_cast<std::ptrdiff_t>(end));
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

std::vector<InteractionSequence> window_all(const std::vector<InteractionSequence>& seqs,
                                            std::size_t max_len, std::size_t* dropped) {
  std::vector<InteractionSequence> out;
  std::size_t n_dropped = 0;
  for (const auto& s : seqs) {
    for (auto& chunk : window(s, max_len)) {
      if (chunk.size() < 2) {
        ++n_dropped;
        continue;
      }
      out.push_back(std::move(chunk));
    }
  }
  if (dropped) *dropped = n_dropped;
  return out;
}

std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::replacement: return "replacement";
    case AugmentKind::insertion: return "insertion";
    case AugmentKind::deletion: return "deletion";
  }
  return "unknown";
}

std::string to_string(ReplaceFlavor flavor) {
  switch (flavor) {
    case ReplaceFlavor::skill: return "skill";
    case ReplaceFlavor::skill_set: return "skill_set";
    case ReplaceFlavor::question_random: return "question_random";
    case ReplaceFlavor::interaction_random: return "interaction_random";
  }
  return "unknown";
}

AugmentKind parse_augment_kind(const std::string& text) {
  if (text == "replacement" || text == "rep") return AugmentKind::replacement;
  if (text == "insertion" || text == "ins") return AugmentKind::insertion;
  if (text == "deletion" || text == "del") return AugmentKind::deletion;
  throw std::invalid_argument("unknown augmentation kind '" + text + "'");
}

ReplaceFlavor parse_replace_flavor(const std::string& text) {
  if (text == "skill") return ReplaceFlavor::skill;
  if (text == "skill_set") return ReplaceFlavor::skill_set;
  if (text == "question_random") return ReplaceFlavor::question_random;
  if (text == "interaction_random") return ReplaceFlavor::interaction_random;
  throw std::invalid_argument("unknown replacement flavor '" + text + "'");
}

namespace {

ValidationResult fail(std::size_t t, const std::string& msg) {
  return ValidationResult::failure(t + 1, msg);
}

bool sorted_unique(const std::vector<std::size_t>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

ValidationResult check_sigma_alignment(const InteractionSequence& original,
                                       const AugmentedSequence& aug) {
  if (aug.sigma.size() != original.size())
    return ValidationResult::failure(0, "sigma length differs from original length");
  std::optional<std::size_t> last;
  for (std::size_t t = 0; t < original.size(); ++t) {
    if (!aug.sigma[t]) continue;
    const std::size_t s = *aug.sigma[t];
    if (s >= aug.size()) return fail(t, "sigma maps outside augmented sequence");
    if (last && s <= *last) return fail(t, "sigma not strictly increasing");
    if (aug.sequence.interactions[s] != original.interactions[t])
      return fail(t, "aligned interaction differs from original");
    last = s;
  }
  return ValidationResult::success();
}

}  // namespace

ValidationResult check_augmented(const InteractionSequence& original,
                                 const AugmentedSequence& aug, const SkillMap* skills) {
  const std::size_t T = original.size();
  const std::size_t Tp = aug.size();
  if (!sorted_unique(aug.touched))
    return ValidationResult::failure(0, "touched indices not sorted and unique");

  switch (aug.kind) {
    case AugmentKind::replacement: {
      if (Tp != T) return ValidationResult::failure(0, "replacement changed the length");
      std::vector<bool> touched(T, false);
      for (auto t : aug.touched) {
        if (t >= T) return ValidationResult::failure(0, "replaced index out of range");
        touched[t] = true;
      }
      for (std::size_t t = 0; t < T; ++t) {
        if (aug.sigma.size() != T || aug.sigma[t] != t) return fail(t, "sigma is not the identity");
        const auto& a = original.interactions[t];
        const auto& b = aug.sequence.interactions[t];
        if (!touched[t]) {
          if (a != b) return fail(t, "untouched interaction changed");
          continue;
        }
        if (a.question == b.question) return fail(t, "replaced question is unchanged");
        if (aug.flavor != ReplaceFlavor::interaction_random && a.response != b.response)
          return fail(t, "replacement altered a response");
        if (b.response != 0 && b.response != 1) return fail(t, "response outside {0,1}");
        if (skills && aug.flavor == ReplaceFlavor::skill && !skills->shares_skill(a.question, b.question))
          return fail(t, "skill replacement shares no skill");
        if (skills && aug.flavor == ReplaceFlavor::skill_set &&
            skills->skills_of(a.question) != skills->skills_of(b.question))
          return fail(t, "skill-set replacement has a different skill set");
      }
      return ValidationResult::success();
    }
    case AugmentKind::insertion: {
      if (Tp != T + aug.touched.size())
        return ValidationResult::failure(0, "insertion length mismatch");
      std::vector<bool> inserted(Tp, false);
      for (auto i : aug.touched) {
        if (i >= Tp) return ValidationResult::failure(0, "inserted index out of range");
        inserted[i] = true;
        if (aug.sequence.interactions[i].response != aug.target_response)
          return fail(i, "inserted response differs from target");
      }
      for (std::size_t t = 0; t < aug.sigma.size(); ++t) {
        if (!aug.sigma[t]) return fail(t, "insertion sigma left an original unmapped");
        if (inserted[*aug.sigma[t]]) return fail(t, "sigma maps onto an inserted slot");
      }
      return check_sigma_alignment(original, aug);
    }
    case AugmentKind::deletion: {
      if (Tp + aug.touched.size() != T)
        return ValidationResult::failure(0, "deletion length mismatch");
      std::vector<bool> deleted(T, false);
      for (auto d : aug.touched) {
        if (d >= T) return ValidationResult::failure(0, "deleted index out of range");
        deleted[d] = true;
        if (original.interactions[d].response != aug.target_response)
          return fail(d, "deleted interaction had a non-target response");
      }
      for (std::size_t t = 0; t < aug.sigma.size(); ++t) {
        if (deleted[t] == aug.sigma[t].has_value())
          return fail(t, "sigma domain differs from the surviving indices");
      }
      return check_sigma_alignment(original, aug);
    }
  }
  return ValidationResult::failure(0, "unknown augmentation kind");
}

}  // namespace ktaug
