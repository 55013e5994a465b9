#include "ktaug/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ktaug {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic = {'K', 'T', 'A', 'U', 'G', 'C', 'K', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const DktParams<double>& params) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, params.dims.num_questions);
  put<std::uint64_t>(out, params.dims.embed_dim);
  put<std::uint64_t>(out, params.dims.hidden_dim);
  put<std::uint32_t>(out, 7);
  params.for_each([&](const char* name, const auto& t) {
    const std::string n(name);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(n.size()));
    out.write(n.data(), static_cast<std::streamsize>(n.size()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.rows()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(t.size())));
  });
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

DktParams<double> read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  ModelDims dims;
  dims.num_questions = get<std::uint64_t>(in);
  dims.embed_dim = get<std::uint64_t>(in);
  dims.hidden_dim = get<std::uint64_t>(in);
  auto params = DktParams<double>::zeros(dims);
  if (get<std::uint32_t>(in) != 7) throw std::runtime_error("checkpoint: unexpected tensor count");
  params.for_each([&](const char* name, auto& t) {
    const auto len = get<std::uint32_t>(in);
    std::string n(len, '\0');
    in.read(n.data(), len);
    if (!in || n != name) throw std::runtime_error("checkpoint: expected tensor '" + std::string(name) + "'");
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows != static_cast<std::uint64_t>(t.rows()) || cols != static_cast<std::uint64_t>(t.cols()))
      throw std::runtime_error("checkpoint: shape mismatch for '" + n + "'");
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(t.size())));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor '" + n + "'");
  });
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const DktParams<double>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string());
  write_checkpoint(out, params);
}

DktParams<double> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace ktaug
