#pragma once

#include <filesystem>
#include <iosfwd>

#include "ktaug/model.hpp"

namespace ktaug {

// Binary container of named tensors, little-endian:
//
//   magic   8 bytes  "KTAUGCK\0"
//   version u32      1
//   dims    3 x u64  num_questions, embed_dim, hidden_dim
//   count   u32      number of tensors
//   tensor  u32 name length, name bytes, u64 rows, u64 cols,
//           rows * cols IEEE-754 doubles in column-major order
//
// Tensors appear in DktParams::for_each order; loading checks names and shapes.
void write_checkpoint(std::ostream& out, const DktParams<double>& params);
DktParams<double> read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const DktParams<double>& params);
DktParams<double> load_checkpoint(const std::filesystem::path& path);

}  // namespace ktaug
