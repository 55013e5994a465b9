#pragma once

#include <filesystem>
#include <iosfwd>

#include "ktaug/train.hpp"

namespace ktaug {

// Everything a `train` / `grid` invocation reads from its config file.
//
//   [train]       batch_size base_lr warmup_steps max_seq_len epochs max_steps seed
//                 eval_every patience
//   [model]       embed_dim hidden_dim
//   [split]       folds fold
//   [comparison]  lambda_r lambda_w1 lambda_w2 lambda_laplacian
//   [grid]        alphas lambda_regs lambda_augs fold_limit   (comma-separated lists)
//   [aug.NAME]    kind alpha lambda_reg (required); lambda_aug flavor target reversed variant
//
// Unknown sections or keys are errors.
struct RunConfig {
  TrainConfig train;
  std::size_t folds = 5;
  std::size_t fold = 0;
  GridSpec grid;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace ktaug
