#include "ktaug/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ktaug {

namespace pt = boost::property_tree;

namespace {

std::string section_key(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return;
    out = convert<T>(key, *v);
  }

  template <typename T>
  T require(const std::string& key) {
    seen_.insert(key);
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) throw std::invalid_argument("missing config key " + section_key(name_, key));
    return convert<T>(key, *v);
  }

  void read_list(const std::string& key, std::vector<double>& out) {
    seen_.insert(key);
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return;
    out.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(convert<double>(key, item));
    if (out.empty()) throw std::invalid_argument("empty list for " + section_key(name_, key));
  }

  void reject_unknown() const {
    for (const auto& [key, _] : tree_)
      if (!seen_.count(key)) throw std::invalid_argument("unknown config key " + section_key(name_, key));
  }

 private:
  template <typename T>
  T convert(const std::string& key, const std::string& text) const {
    std::istringstream in(text);
    T value{};
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else if constexpr (std::is_same_v<T, bool>) {
      std::string s;
      in >> s;
      if (s == "true" || s == "1") return true;
      if (s == "false" || s == "0") return false;
      throw std::invalid_argument("bad boolean for " + section_key(name_, key) + ": '" + text + "'");
    } else {
      in >> value;
      std::string rest;
      if (in.fail() || (in >> rest, !rest.empty()))
        throw std::invalid_argument("bad value for " + section_key(name_, key) + ": '" + text + "'");
    }
    return value;
  }

  std::string name_;
  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

ConsistencyVariant parse_variant(const std::string& s) {
  if (s == "excluded") return ConsistencyVariant::excluded;
  if (s == "replaced_only") return ConsistencyVariant::replaced_only;
  if (s == "full") return ConsistencyVariant::full;
  throw std::invalid_argument("unknown consistency variant '" + s + "'");
}

std::string to_string(ConsistencyVariant v) {
  switch (v) {
    case ConsistencyVariant::excluded: return "excluded";
    case ConsistencyVariant::replaced_only: return "replaced_only";
    case ConsistencyVariant::full: return "full";
  }
  return "excluded";
}

std::string join(const std::vector<double>& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  auto& tc = cfg.train;
  for (const auto& [name, body] : tree) {
    Section sec(name, body);
    if (name == "train") {
      sec.read("batch_size", tc.batch_size);
      sec.read("base_lr", tc.base_lr);
      sec.read("warmup_steps", tc.warmup_steps);
      sec.read("max_seq_len", tc.max_seq_len);
      sec.read("epochs", tc.epochs);
      sec.read("max_steps", tc.max_steps);
      sec.read("seed", tc.seed);
      sec.read("eval_every", tc.eval_every);
      sec.read("patience", tc.patience);
    } else if (name == "model") {
      sec.read("embed_dim", tc.embed_dim);
      sec.read("hidden_dim", tc.hidden_dim);
    } else if (name == "split") {
      sec.read("folds", cfg.folds);
      sec.read("fold", cfg.fold);
    } else if (name == "comparison") {
      sec.read("lambda_r", tc.comparison.reconstruction);
      sec.read("lambda_w1", tc.comparison.waviness_l1);
      sec.read("lambda_w2", tc.comparison.waviness_l2);
      sec.read("lambda_laplacian", tc.comparison.laplacian);
    } else if (name == "grid") {
      sec.read_list("alphas", cfg.grid.alphas);
      sec.read_list("lambda_regs", cfg.grid.lambda_regs);
      sec.read_list("lambda_augs", cfg.grid.lambda_augs);
      sec.read("fold_limit", cfg.grid.fold_limit);
    } else if (name.rfind("aug.", 0) == 0 && name.size() > 4) {
      AugmentationSpec spec;
      spec.name = name.substr(4);
      spec.kind = parse_augment_kind(sec.require<std::string>("kind"));
      spec.config.alpha = sec.require<double>("alpha");
      spec.weights.lambda_reg = sec.require<double>("lambda_reg");
      sec.read("lambda_aug", spec.weights.lambda_aug);
      std::string flavor = "skill", variant = "excluded";
      sec.read("flavor", flavor);
      sec.read("variant", variant);
      spec.config.flavor = parse_replace_flavor(flavor);
      spec.variant = parse_variant(variant);
      sec.read("target", spec.config.target_response);
      sec.read("reversed", spec.reversed);
      tc.augmentations.push_back(spec);
    } else {
      throw std::invalid_argument("unknown config section [" + name + "]");
    }
    sec.reject_unknown();
  }
  cfg.grid.folds = cfg.folds;
  if (cfg.fold >= cfg.folds) throw std::invalid_argument("config: [split] fold must be < folds");
  validate(tc);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  const auto& tc = cfg.train;
  out.precision(17);
  out << "[train]\nbatch_size = " << tc.batch_size << "\nbase_lr = " << tc.base_lr
      << "\nwarmup_steps = " << tc.warmup_steps << "\nmax_seq_len = " << tc.max_seq_len
      << "\nepochs = " << tc.epochs << "\nmax_steps = " << tc.max_steps << "\nseed = " << tc.seed
      << "\neval_every = " << tc.eval_every << "\npatience = " << tc.patience << "\n\n";
  out << "[model]\nembed_dim = " << tc.embed_dim << "\nhidden_dim = " << tc.hidden_dim << "\n\n";
  out << "[split]\nfolds = " << cfg.folds << "\nfold = " << cfg.fold << "\n\n";
  out << "[comparison]\nlambda_r = " << tc.comparison.reconstruction
      << "\nlambda_w1 = " << tc.comparison.waviness_l1 << "\nlambda_w2 = " << tc.comparison.waviness_l2
      << "\nlambda_laplacian = " << tc.comparison.laplacian << "\n\n";
  out << "[grid]\nalphas = " << join(cfg.grid.alphas) << "\nlambda_regs = " << join(cfg.grid.lambda_regs)
      << "\nlambda_augs = " << join(cfg.grid.lambda_augs) << "\nfold_limit = " << cfg.grid.fold_limit << "\n";
  for (const auto& a : tc.augmentations) {
    out << "\n[aug." << a.name << "]\nkind = " << to_string(a.kind) << "\nalpha = " << a.config.alpha
        << "\nlambda_aug = " << a.weights.lambda_aug << "\nlambda_reg = " << a.weights.lambda_reg
        << "\nflavor = " << to_string(a.config.flavor) << "\ntarget = " << a.config.target_response
        << "\nreversed = " << (a.reversed ? "true" : "false") << "\nvariant = " << to_string(a.variant)
        << '\n';
  }
}

}  // namespace ktaug
