// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ktaug/eval.hpp"
#include "ktaug/ingest.hpp"
#include "ktaug/synth.hpp"
#include "ktaug/train.hpp"

using namespace ktaug;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. gradient of the full objective against central differences

Outcome gradient_check() {
  const auto t0 = Clock::now();
  SynthConfig sc;
  sc.n_students = 4;
  sc.n_questions = 6;
  sc.n_skills = 2;
  sc.min_len = sc.max_len = 5;
  sc.seed = 13;
  const auto data = generate(sc);
  const ModelDims dims{6, 8, 8};
  const auto params = xavier_init<double>(dims, 5);

  AugmentationSpec rep;
  rep.name = "rep";
  rep.kind = AugmentKind::replacement;
  rep.config.alpha = 0.3;
  rep.weights = {1.0, 10.0};
  AugmentationSpec ins;
  ins.name = "cor_ins";
  ins.kind = AugmentKind::insertion;
  ins.config.alpha = 0.3;
  ins.config.target_response = 1;
  ins.weights = {1.0, 10.0};
  const std::vector<AugmentationSpec> specs{rep, ins};

  std::vector<const InteractionSequence*> ptrs;
  for (const auto& s : data.dataset.sequences) ptrs.push_back(&s);
  const QuestionPool pool(6, &data.skills);
  std::vector<std::vector<AugmentedSequence>> draws;
  std::size_t replaced = 0;
  for (std::uint64_t seed = 0; replaced == 0; ++seed) {
    draws = draw_augmentations(ptrs, specs, pool, seed);
    replaced = 0;
    for (const auto& a : draws[0]) replaced += a.touched.size();
  }

  const auto res = objective<double>(params, ptrs, specs, draws, {}, &data.skills);
  std::vector<Eigen::MatrixXd> analytic;
  res.grads.for_each([&](const char*, const auto& g) { analytic.emplace_back(g); });

  using LD = long double;
  auto x = params.cast<LD>();
  // which insertion hinges are active; a coordinate whose +h / -h patterns differ straddles a kink
  auto hinge_pattern = [&](const DktParams<LD>& p) {
    std::vector<bool> on;
    for (std::size_t b = 0; b < ptrs.size(); ++b) {
      const auto po = predict(p, *ptrs[b]).probs;
      const auto pa = predict(p, draws[1][b].sequence).probs;
      for (std::size_t t = 0; t < ptrs[b]->size(); ++t)
        on.push_back(po(Eigen::Index(t)) > pa(Eigen::Index(*draws[1][b].sigma[t])));
    }
    return on;
  };
  const LD h = 1e-6L;
  double worst = 0.0;
  std::size_t checked = 0, skipped = 0, tensor = 0;
  x.for_each([&](const char*, auto& m) {
    const auto& g = analytic[tensor++];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const LD saved = m.data()[i];
      m.data()[i] = saved + h;
      const LD f1 = objective<LD>(x, ptrs, specs, draws, {}, &data.skills).total;
      const auto k1 = hinge_pattern(x);
      m.data()[i] = saved - h;
      const LD f0 = objective<LD>(x, ptrs, specs, draws, {}, &data.skills).total;
      const auto k0 = hinge_pattern(x);
      m.data()[i] = saved;
      if (k1 != k0) {
        ++skipped;
        continue;
      }
      const double fd = double((f1 - f0) / (2 * h));
      const double an = g.data()[i];
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6}));
      ++checked;
    }
  });
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst < 1e-4 && secs < 10.0 && checked + skipped == params.parameter_count();
  char buf[200];
  std::snprintf(buf, sizeof buf, "max rel err %.2e over %zu coords (%zu kink-skipped), %zu replaced, %.2fs",
                worst, checked, skipped, replaced, secs);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// 2. loss oracles

Outcome loss_oracles() {
  using V = Eigen::VectorXd;
  auto vec = [](std::initializer_list<double> xs) {
    V v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
  };
  std::vector<std::pair<double, double>> cases;  // (computed, hand value)

  const std::vector<int> y3{1, 0, 1};
  const std::vector<std::size_t> m13{0, 2};
  cases.push_back({kt_bce<double>(vec({0.9, 0.2, 0.7}), y3, m13).value, -(std::log(0.9) + std::log(0.7)) / 2});
  const std::vector<std::size_t> r2{1}, none, r1{0};
  cases.push_back({consistency_rep<double>(vec({0.2, 0.8}), vec({0.4, 0.8}), r2).value, 0.2 * 0.2});
  cases.push_back({consistency_rep<double>(vec({0.5, 0.5}), vec({0.1, 0.9}), none).value, (0.16 + 0.16) / 2});
  cases.push_back({consistency_rep<double>(vec({0.2, 0.8}), vec({0.4, 0.6}), r1, ConsistencyVariant::replaced_only).value, 0.04});
  cases.push_back({consistency_rep<double>(vec({0.2, 0.8}), vec({0.4, 0.6}), r1, ConsistencyVariant::full).value, (0.04 + 0.04) / 2});
  cases.push_back({kt_bce<double>(vec({0.5, 0.5}), std::vector<int>{1, 0}).value, std::log(2.0)});
  cases.push_back({monotonicity_ins<double>(vec({0.6}), vec({0.4}), Sigma{std::size_t{0}}, 1).value, 0.6 - 0.4});
  const Sigma worked{std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{5}};
  const auto p4 = vec({0.5, 0.5, 0.5, 0.5}), p6 = vec({0.9, 0.4, 0.6, 0.3, 0.0, 0.5});
  cases.push_back({monotonicity_ins<double>(p4, p6, worked, 1).value, (0.1 + 0.2) / 4});
  cases.push_back({monotonicity_ins<double>(p4, p6, worked, 0).value, (0.1 + 0.0) / 4});
  cases.push_back({monotonicity_del<double>(vec({0.5, 0.7}), vec({0.6, 0.7}), Sigma{std::size_t{0}, std::size_t{1}}, 1).value, (0.1 + 0.0) / 2});
  const std::vector<AugLossTerms> t1{{0.4, 0.02, {1.0, 10.0}}}, t2{{0.0, 0.01, {0.0, 50.0}}};
  cases.push_back({total_loss(0.5, t1), 0.5 + 0.4 + 10 * 0.02});
  cases.push_back({total_loss(0.6, t2), 0.6 + 50 * 0.01});
  Eigen::MatrixXd m(2, 2);
  m << 0.2, 0.8, 0.4, 0.8;
  const auto dk = dktplus_losses<double>(m, InteractionSequence{"s", {{0, 1}, {1, 0}}});
  cases.push_back({dk.waviness_l1, (0.2 + 0.0) / 2});
  cases.push_back({dk.waviness_l2, (0.04 + 0.0) / 2});
  cases.push_back({dk.reconstruction, -std::log(0.4)});
  SkillMap pair(2);
  pair.add(0, 0);
  pair.add(1, 0);
  cases.push_back({qdkt_laplacian<double>(vec({0.3, 0.7}), &pair).value, (0.16 + 0.16) / 2});

  double worst = 0.0;
  for (const auto& [got, want] : cases) worst = std::max(worst, std::abs(got - want));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t identity_failures = 0;
  for (int pair_i = 0; pair_i < 1000; ++pair_i) {
    const std::size_t T = 1 + rng() % 20;
    // insertion: total alignment into a longer trace
    std::vector<std::size_t> slots(T + 3);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(T);
    std::sort(slots.begin(), slots.end());
    Sigma s_ins(slots.begin(), slots.end());
    V p(static_cast<Eigen::Index>(T)), pi(static_cast<Eigen::Index>(T + 3));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = u(rng);
    for (Eigen::Index i = 0; i < pi.size(); ++i) pi(i) = u(rng);
    // deletion: partial alignment into a shorter trace
    Sigma s_del(T);
    std::size_t kept = 0;
    for (std::size_t t = 0; t < T; ++t)
      if (t + 1 == T || rng() % 3) s_del[t] = kept++;
    V pd(static_cast<Eigen::Index>(kept));
    for (Eigen::Index i = 0; i < pd.size(); ++i) pd(i) = u(rng);
    for (int r : {0, 1}) {
      if (monotonicity_ins<double>(p, pi, s_ins, r, true).value != monotonicity_ins<double>(p, pi, s_ins, 1 - r).value)
        ++identity_failures;
      if (monotonicity_del<double>(p, pd, s_del, r, true).value != monotonicity_del<double>(p, pd, s_del, 1 - r).value)
        ++identity_failures;
    }
  }
  Outcome o;
  o.pass = worst < 1e-12 && identity_failures == 0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu examples, max abs err %.1e; reversed identity failures %zu / 4000",
                cases.size(), worst, identity_failures);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// 3. AUC against the pairwise count

Outcome auc_oracle() {
  std::mt19937_64 rng(99);
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 2 + rng() % 300;
    const std::size_t levels = 1 + rng() % (inst % 2 ? 5 : 1000);  // odd instances are tie-heavy
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = double(rng() % levels) / double(levels);
      y[i] = int(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    double wins = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (y[i] == 1 && y[j] == 0) {
          pairs += 1;
          wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    worst = std::max(worst, std::abs(auc(s, y) - wins / pairs));
  }
  Outcome o;
  o.pass = worst < 1e-12;
  char buf[120];
  std::snprintf(buf, sizeof buf, "200 instances, max abs diff %.1e", worst);
  o.detail = buf;
  return o;
}

// ---------------------------------------------------------------------------
// 4. augmentation invariants and count statistics

Outcome augmentation_structure() {
  SynthConfig sc;
  sc.n_students = 1;
  sc.n_questions = 40;
  sc.n_skills = 8;
  sc.seed = 3;
  const auto skills = generate(sc).skills;
  const QuestionPool pool(40, &skills);

  struct Tally {
    double count = 0, mean = 0, var = 0;
  };
  std::vector<Tally> tallies(6);  // four replacement flavors, insertion, deletion
  const char* names[] = {"rep.skill", "rep.skill_set", "rep.question_random", "rep.interaction_random",
                         "insertion", "deletion"};
  std::size_t invariant_failures = 0;
  std::string first_failure;
  std::mt19937_64 rng(4242);
  for (std::uint64_t draw = 0; draw < 10000; ++draw) {
    const std::size_t which = draw % 6;
    const std::size_t T = 1 + rng() % 40;
    InteractionSequence seq{"stu" + std::to_string(draw), {}};
    for (std::size_t t = 0; t < T; ++t) seq.interactions.push_back({rng() % 40, int(rng() % 2)});
    AugmentConfig cfg;
    cfg.alpha = 0.1 + 0.1 * double(rng() % 5);
    cfg.target_response = int(rng() % 2);
    cfg.seed = draw;
    AugmentKind kind = AugmentKind::replacement;
    if (which < 4) cfg.flavor = static_cast<ReplaceFlavor>(which);
    else kind = which == 4 ? AugmentKind::insertion : AugmentKind::deletion;

    const auto aug = augment(kind, seq, pool, cfg);
    const auto v = check_augmented(seq, aug, &skills);
    if (!v) {
      if (first_failure.empty()) first_failure = v.message;
      ++invariant_failures;
    }

    auto& tl = tallies[which];
    const double a = cfg.alpha;
    if (kind == AugmentKind::insertion) {
      auto k = std::size_t(std::llround(a * double(T)));
      if (k == 0 && T >= 2) k = 1;
      if (aug.touched.size() != k) ++invariant_failures;
      continue;
    }
    std::size_t eligible = 0;
    bool all_target = true;
    for (const auto& it : seq.interactions) {
      if (kind == AugmentKind::deletion) {
        eligible += it.response == cfg.target_response;
        all_target = all_target && it.response == cfg.target_response;
      } else if (cfg.flavor == ReplaceFlavor::skill) {
        eligible += !pool.skill_mates(it.question).empty();
      } else if (cfg.flavor == ReplaceFlavor::skill_set) {
        eligible += !pool.skill_set_mates(it.question).empty();
      } else {
        eligible += 1;
      }
    }
    if (kind == AugmentKind::deletion && all_target) continue;  // the survivor rule bends the count
    tl.count += double(aug.touched.size());
    tl.mean += double(eligible) * a;
    tl.var += double(eligible) * a * (1 - a);
  }
  std::ostringstream detail;
  bool stats_ok = true;
  detail << "invariant failures " << invariant_failures;
  if (!first_failure.empty()) detail << " (" << first_failure << ")";
  for (std::size_t i = 0; i < 6; ++i) {
    if (i == 4) continue;
    const double z = (tallies[i].count - tallies[i].mean) / std::sqrt(tallies[i].var);
    stats_ok = stats_ok && std::abs(z) < 3.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "; %s z=%+.2f", names[i], z);
    detail << buf;
  }
  return {invariant_failures == 0 && stats_ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 5-8. synthetic training experiments

constexpr std::uint64_t kDataSeed = 7;
constexpr std::uint64_t kSteps = 210;  // 30 epochs of the full training split

TrainConfig desk_config(std::uint64_t seed) {
  TrainConfig c;
  c.batch_size = 64;
  c.base_lr = 0.005;
  c.warmup_steps = 100;
  c.max_seq_len = 100;
  c.epochs = 100000;
  c.max_steps = kSteps;
  c.embed_dim = c.hidden_dim = 32;
  c.seed = seed;
  return c;
}

AugmentationSpec skill_replacement() {
  AugmentationSpec s;
  s.name = "rep";
  s.kind = AugmentKind::replacement;
  s.config.alpha = 0.3;
  s.config.flavor = ReplaceFlavor::skill;
  s.weights = {0.0, 10.0};
  return s;
}

AugmentationSpec correct_insertion(bool reversed) {
  AugmentationSpec s;
  s.name = "cor_ins";
  s.kind = AugmentKind::insertion;
  s.config.alpha = 0.3;
  s.config.target_response = 1;
  s.weights = {0.0, 10.0};
  s.reversed = reversed;
  return s;
}

struct SeedResults {
  double vanilla = 0, regularized = 0, aligned_ins = 0, reversed_ins = 0;
  double vanilla_25 = 0, regularized_25 = 0;
  ConsistencyAnalysis cons_vanilla, cons_regularized;
};

struct Experiments {
  SynthData data;
  std::vector<SeedResults> seeds;
  double gain_seconds = 0;
  double total_seconds = 0;
};

Experiments run_experiments() {
  Experiments ex;
  SynthConfig sc;
  sc.seed = kDataSeed;
  ex.data = generate(sc);
  const auto& ds = ex.data.dataset;
  const QuestionPool pool(ds.catalog_size, &ex.data.skills);
  const auto t_all = Clock::now();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto folds = kfold_split(student_ids(ds), 5, seed);
    const auto train = select_students(ds, folds[0].train);
    const auto test = window_all(select_students(ds, folds[0].test), 100);
    auto ids = folds[0].train;
    std::mt19937_64 rng(mix_seed(seed, 25));
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(ids.size() / 4);
    const auto train_25 = select_students(ds, ids);

    auto fit = [&](const std::vector<InteractionSequence>& tr, std::vector<AugmentationSpec> augs) {
      auto cfg = desk_config(seed);
      cfg.augmentations = std::move(augs);
      return train_run(tr, ds.catalog_size, &ex.data.skills, cfg).params;
    };
    SeedResults r;
    auto t0 = Clock::now();
    const auto vanilla = fit(train, {});
    const auto regularized = fit(train, {skill_replacement(), correct_insertion(false)});
    ex.gain_seconds += seconds_since(t0);
    r.vanilla = evaluate_auc(vanilla, test);
    r.regularized = evaluate_auc(regularized, test);
    r.aligned_ins = evaluate_auc(fit(train, {correct_insertion(false)}), test);
    r.reversed_ins = evaluate_auc(fit(train, {correct_insertion(true)}), test);
    r.vanilla_25 = evaluate_auc(fit(train_25, {}), test);
    r.regularized_25 = evaluate_auc(fit(train_25, {skill_replacement(), correct_insertion(false)}), test);
    r.cons_vanilla = consistency_loss_analysis(vanilla, test, pool, 0.3, seed);
    r.cons_regularized = consistency_loss_analysis(regularized, test, pool, 0.3, seed);
    std::printf("  seed %llu: vanilla %.4f  regularized %.4f  ins %.4f  reversed-ins %.4f  | 25%%: vanilla %.4f  regularized %.4f\n",
                static_cast<unsigned long long>(seed), r.vanilla, r.regularized, r.aligned_ins,
                r.reversed_ins, r.vanilla_25, r.regularized_25);
    std::fflush(stdout);
    ex.seeds.push_back(r);
  }
  ex.total_seconds = seconds_since(t_all);
  return ex;
}

double mean_of(const Experiments& ex, double SeedResults::*field) {
  double s = 0;
  for (const auto& r : ex.seeds) s += r.*field;
  return s / double(ex.seeds.size());
}

Outcome regularization_gain(const Experiments& ex) {
  const double v = mean_of(ex, &SeedResults::vanilla), g = mean_of(ex, &SeedResults::regularized);
  char buf[200];
  std::snprintf(buf, sizeof buf, "mean AUC vanilla %.4f, regularized %.4f, gain %+.4f (need >= 0.005); training %.0fs",
                v, g, g - v, ex.gain_seconds);
  return {g - v >= 0.005 && ex.gain_seconds < 900.0, buf};
}

Outcome reversed_penalty(const Experiments& ex) {
  const double a = mean_of(ex, &SeedResults::aligned_ins), r = mean_of(ex, &SeedResults::reversed_ins);
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean AUC aligned %.4f, reversed %.4f", a, r);
  return {r < a, buf};
}

Outcome data_size_gain(const Experiments& ex) {
  const double gap_full = mean_of(ex, &SeedResults::regularized) - mean_of(ex, &SeedResults::vanilla);
  const double gap_25 = mean_of(ex, &SeedResults::regularized_25) - mean_of(ex, &SeedResults::vanilla_25);
  char buf[200];
  std::snprintf(buf, sizeof buf, "gain at 25%% %+.4f, at 100%% %+.4f (equal step budget of %llu)", gap_25,
                gap_full, static_cast<unsigned long long>(kSteps));
  return {gap_25 >= gap_full, buf};
}

Outcome analyses_check(const Experiments& ex) {
  const auto m = dataset_monotonicity_analysis(ex.data.dataset.sequences);
  const double gap = m.mean_correct - m.mean_incorrect;
  double vc = 0, vi = 0, rc = 0, ri = 0;
  for (const auto& r : ex.seeds) {
    vc += r.cons_vanilla.mean_correct / 3;
    vi += r.cons_vanilla.mean_incorrect / 3;
    rc += r.cons_regularized.mean_correct / 3;
    ri += r.cons_regularized.mean_incorrect / 3;
  }
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "rate gap %.4f (need > 0.02); consistency loss correct %.2e vs vanilla %.2e, incorrect %.2e vs %.2e",
                gap, rc, vc, ri, vi);
  return {gap > 0.02 && rc <= vc && ri <= vi, buf};
}

// ---------------------------------------------------------------------------
// 9. CLI determinism

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = std::string(KTAUG_CLI) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const auto dir = fs::temp_directory_path() / "ktaug_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[train]\nbatch_size = 64\nbase_lr = 0.005\nwarmup_steps = 100\nepochs = 3\nseed = 11\n"
           "[aug.rep]\nkind = replacement\nalpha = 0.3\nlambda_reg = 10\n"
           "[aug.cor_ins]\nkind = insertion\nalpha = 0.3\nlambda_reg = 10\n";
  }
  int rc = run_cli("synth --out " + (dir / "data").string() + " --seed 7", dir / "synth.log");
  std::string auc_text[2], metrics[2];
  for (int i = 0; i < 2 && rc == 0; ++i) {
    const auto run = dir / ("run" + std::to_string(i));
    rc |= run_cli("train --config " + (dir / "run.ini").string() + " --data " + (dir / "data").string() +
                      " --run " + run.string(),
                  dir / "train.log");
    rc |= run_cli("eval --run " + run.string() + " --data " + (dir / "data").string(), dir / ("eval" + std::to_string(i)));
    metrics[i] = slurp(run / "metrics.jsonl");
    auc_text[i] = slurp(dir / ("eval" + std::to_string(i)));
  }
  Outcome o;
  o.pass = rc == 0 && !metrics[0].empty() && metrics[0] == metrics[1] && auc_text[0] == auc_text[1];
  std::ostringstream d;
  d << "exit " << rc << ", metrics " << (metrics[0] == metrics[1] ? "identical" : "differ") << " ("
    << std::count(metrics[0].begin(), metrics[0].end(), '\n') << " lines), eval "
    << (auc_text[0] == auc_text[1] ? "identical" : "differ");
  const auto last = auc_text[0].rfind('\t');
  if (last != std::string::npos) d << ", auc " << auc_text[0].substr(last + 1, auc_text[0].size() - last - 2);
  o.detail = d.str();
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  auto want = [&](int c) { return wanted.empty() || wanted.count(c); };

  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  if (want(1)) report(1, "gradient correctness", gradient_check());
  if (want(2)) report(2, "loss oracles", loss_oracles());
  if (want(3)) report(3, "auc oracle", auc_oracle());
  if (want(4)) report(4, "augmentation structure", augmentation_structure());
  if (want(5) || want(6) || want(7) || want(8)) {
    const auto ex = run_experiments();
    if (want(5)) report(5, "regularization beats vanilla", regularization_gain(ex));
    if (want(6)) report(6, "reversed regularization hurts", reversed_penalty(ex));
    if (want(7)) report(7, "larger gain with less data", data_size_gain(ex));
    if (want(8)) report(8, "dataset and consistency analyses", analyses_check(ex));
    std::printf("  experiments took %.0fs\n", ex.total_seconds);
  }
  if (want(9)) report(9, "cli determinism", cli_determinism());
  return failures ? 1 : 0;
}
