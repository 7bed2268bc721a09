#include "lanesafe/nnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lanesafe/error.hpp"

namespace lanesafe::nnet {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace binio {

namespace {

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
  if (!out) throw IoError("checkpoint write failed");
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw StructuralError("checkpoint truncated");
  return v;
}

}  // namespace

void write_u8(std::ostream& out, std::uint8_t v) { put(out, v); }
void write_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
void write_f64(std::ostream& out, double v) { put(out, v); }
std::uint8_t read_u8(std::istream& in) { return get<std::uint8_t>(in); }
std::uint32_t read_u32(std::istream& in) { return get<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return get<std::uint64_t>(in); }
double read_f64(std::istream& in) { return get<double>(in); }

void write_magic(std::ostream& out, const char (&magic)[8]) {
  out.write(magic, 8);
  if (!out) throw IoError("checkpoint write failed");
}

void expect_magic(std::istream& in, const char (&magic)[8], const std::string& what) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0)
    throw StructuralError(what + ": bad magic, not a checkpoint of this kind");
}

}  // namespace binio

void write_mlp(std::ostream& out, const MlpParams& params) {
  params.validate();
  binio::write_magic(out, kMlpMagic);
  binio::write_u32(out, kMlpFormatVersion);
  binio::write_u32(out, static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& l : params.layers) {
    binio::write_u32(out, static_cast<std::uint32_t>(l.out_dim));
    binio::write_u32(out, static_cast<std::uint32_t>(l.in_dim));
    binio::write_u8(out, static_cast<std::uint8_t>(l.activation));
    for (double w : l.weight) binio::write_f64(out, w);
    for (double b : l.bias) binio::write_f64(out, b);
  }
}

MlpParams read_mlp(std::istream& in) {
  binio::expect_magic(in, kMlpMagic, "network checkpoint");
  const auto version = binio::read_u32(in);
  if (version != kMlpFormatVersion)
    throw StructuralError("network checkpoint: unsupported format version " +
                          std::to_string(version));
  const auto n_layers = binio::read_u32(in);
  MlpParams p;
  p.layers.resize(n_layers);
  for (auto& l : p.layers) {
    l.out_dim = binio::read_u32(in);
    l.in_dim = binio::read_u32(in);
    const auto act = binio::read_u8(in);
    if (act > 1) throw StructuralError("network checkpoint: unknown activation tag");
    l.activation = static_cast<Activation>(act);
    l.weight.resize(l.out_dim * l.in_dim);
    l.bias.resize(l.out_dim);
    for (double& w : l.weight) w = binio::read_f64(in);
    for (double& b : l.bias) b = binio::read_f64(in);
  }
  p.validate();
  return p;
}

void save_mlp(const std::filesystem::path& path, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_mlp(out, params);
}

MlpParams load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mlp(in);
}

}  // namespace lanesafe::nnet
