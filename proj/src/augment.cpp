#include "ktaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ktaug {

QuestionPool::QuestionPool(std::size_t catalog_size, const SkillMap* skills)
    : catalog_size_(catalog_size), has_skills_(skills != nullptr) {
  if (catalog_size == 0) throw std::invalid_argument("QuestionPool: empty catalog");
  if (!skills) return;
  skill_mates_.resize(catalog_size);
  skill_set_mates_.resize(catalog_size);

  std::map<SkillId, std::vector<QuestionId>> by_skill;
  std::map<std::set<SkillId>, std::vector<QuestionId>> by_set;
  for (QuestionId q = 0; q < catalog_size; ++q) {
    if (!skills->has(q)) continue;
    for (auto s : skills->skills_of(q)) by_skill[s].push_back(q);
    by_set[skills->skills_of(q)].push_back(q);
  }
  for (QuestionId q = 0; q < catalog_size; ++q) {
    if (!skills->has(q)) continue;
    std::set<QuestionId> mates;
    for (auto s : skills->skills_of(q))
      for (auto other : by_skill[s])
        if (other != q) mates.insert(other);
    skill_mates_[q].assign(mates.begin(), mates.end());
    for (auto other : by_set[skills->skills_of(q)])
      if (other != q) skill_set_mates_[q].push_back(other);
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t word) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = seed ^ (word + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 augment_rng(std::uint64_t seed, std::string_view student_id, AugmentKind kind) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : student_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return std::mt19937_64(mix_seed(mix_seed(seed, h), static_cast<std::uint64_t>(kind) + 1));
}

namespace {

AugmentedSequence identity_of(const InteractionSequence& seq, AugmentKind kind) {
  AugmentedSequence out;
  out.sequence = seq;
  out.kind = kind;
  out.sigma.resize(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) out.sigma[t] = t;
  return out;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("augmentation alpha must lie in [0, 1]");
}

void check_target(int target) {
  if (target != 0 && target != 1)
    throw std::invalid_argument("target_response must be 0 or 1");
}

}  // namespace

AugmentedSequence replace(const InteractionSequence& seq, const QuestionPool& pool,
                          const AugmentConfig& cfg) {
  check_alpha(cfg.alpha);
  const bool needs_skills =
      cfg.flavor == ReplaceFlavor::skill || cfg.flavor == ReplaceFlavor::skill_set;
  if (needs_skills && !pool.has_skills())
    throw std::invalid_argument("skill-based replacement requires a skill map");

  auto rng = augment_rng(cfg.seed, seq.student_id, AugmentKind::replacement);
  std::bernoulli_distribution pick(cfg.alpha);
  std::bernoulli_distribution coin(0.5);

  AugmentedSequence out = identity_of(seq, AugmentKind::replacement);
  out.flavor = cfg.flavor;

  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (!pick(rng)) continue;
    auto& it = out.sequence.interactions[t];
    const QuestionId q = it.question;
    QuestionId replacement = q;
    switch (cfg.flavor) {
      case ReplaceFlavor::skill:
      case ReplaceFlavor::skill_set: {
        const auto& cands = cfg.flavor == ReplaceFlavor::skill ? pool.skill_mates(q)
                                                               : pool.skill_set_mates(q);
        if (cands.empty()) continue;
        std::uniform_int_distribution<std::size_t> u(0, cands.size() - 1);
        replacement = cands[u(rng)];
        break;
      }
      case ReplaceFlavor::question_random:
      case ReplaceFlavor::interaction_random: {
        if (pool.size() < 2) continue;
        std::uniform_int_distribution<std::size_t> u(0, pool.size() - 2);
        replacement = u(rng);
        if (replacement >= q) ++replacement;
        break;
      }
    }
    it.question = replacement;
    if (cfg.flavor == ReplaceFlavor::interaction_random) it.response = coin(rng) ? 1 : 0;
    out.touched.push_back(t);
  }
  return out;
}

AugmentedSequence insert_at(const InteractionSequence& seq,
                            const std::vector<std::size_t>& slots,
                            const std::vector<QuestionId>& questions, int target_response) {
  check_target(target_response);
  if (slots.size() != questions.size())
    throw std::invalid_argument("insert_at: one question per inserted slot required");
  const std::size_t Tp = seq.size() + slots.size();
  std::vector<std::size_t> sorted = slots;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      (!sorted.empty() && sorted.back() >= Tp))
    throw std::invalid_argument("insert_at: slots must be distinct and within the new length");

  AugmentedSequence out;
  out.kind = AugmentKind::insertion;
  out.target_response = target_response;
  out.sequence.student_id = seq.student_id;
  out.sequence.interactions.reserve(Tp);
  out.sigma.reserve(seq.size());

  std::vector<QuestionId> qs(sorted.size());
  for (std::size_t k = 0; k < slots.size(); ++k) {
    auto pos = std::lower_bound(sorted.begin(), sorted.end(), slots[k]) - sorted.begin();
    qs[static_cast<std::size_t>(pos)] = questions[k];
  }

  std::size_t next_slot = 0;
  std::size_t next_orig = 0;
  for (std::size_t pos = 0; pos < Tp; ++pos) {
    if (next_slot < sorted.size() && sorted[next_slot] == pos) {
      out.sequence.interactions.push_back({qs[next_slot], target_response});
      ++next_slot;
    } else {
      out.sequence.interactions.push_back(seq.interactions[next_orig++]);
      out.sigma.emplace_back(pos);
    }
  }
  out.touched = std::move(sorted);
  return out;
}

AugmentedSequence insert(const InteractionSequence& seq, const QuestionPool& pool,
                         const AugmentConfig& cfg) {
  check_alpha(cfg.alpha);
  check_target(cfg.target_response);
  const std::size_t T = seq.size();
  auto k = static_cast<std::size_t>(std::llround(cfg.alpha * static_cast<double>(T)));
  if (cfg.alpha > 0.0 && T >= 2) k = std::max<std::size_t>(k, 1);

  auto rng = augment_rng(cfg.seed, seq.student_id, AugmentKind::insertion);
  std::vector<std::size_t> positions(T + k);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  std::vector<std::size_t> slots;
  slots.reserve(k);
  std::sample(positions.begin(), positions.end(), std::back_inserter(slots), k, rng);

  std::uniform_int_distribution<QuestionId> uq(0, pool.size() - 1);
  std::vector<QuestionId> questions(k);
  for (auto& q : questions) q = uq(rng);
  return insert_at(seq, slots, questions, cfg.target_response);
}

AugmentedSequence erase(const InteractionSequence& seq, const AugmentConfig& cfg) {
  check_alpha(cfg.alpha);
  check_target(cfg.target_response);
  auto rng = augment_rng(cfg.seed, seq.student_id, AugmentKind::deletion);
  std::bernoulli_distribution pick(cfg.alpha);

  std::vector<std::size_t> deleted;
  std::size_t last_match = seq.size();
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (seq.interactions[t].response != cfg.target_response) continue;
    last_match = t;
    if (pick(rng)) deleted.push_back(t);
  }
  if (!seq.interactions.empty() && deleted.size() == seq.size()) {
    // keep the last matching index so the sequence stays non-empty
    deleted.erase(std::find(deleted.begin(), deleted.end(), last_match));
  }

  AugmentedSequence out;
  out.kind = AugmentKind::deletion;
  out.target_response = cfg.target_response;
  out.sequence.student_id = seq.student_id;
  out.sigma.resize(seq.size());
  std::size_t d = 0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (d < deleted.size() && deleted[d] == t) {
      ++d;
      continue;
    }
    out.sigma[t] = out.sequence.interactions.size();
    out.sequence.interactions.push_back(seq.interactions[t]);
  }
  out.touched = std::move(deleted);
  return out;
}

AugmentedSequence augment(AugmentKind kind, const InteractionSequence& seq,
                          const QuestionPool& pool, const AugmentConfig& cfg) {
  switch (kind) {
    case AugmentKind::replacement: return replace(seq, pool, cfg);
    case AugmentKind::insertion: return insert(seq, pool, cfg);
    case AugmentKind::deletion: return erase(seq, cfg);
  }
  throw std::invalid_argument("unknown augmentation kind");
}

}  // namespace ktaug
