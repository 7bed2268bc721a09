#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "lanesafe/nnet/mlp.hpp"

namespace lanesafe::nnet {

inline constexpr char kMlpMagic[8] = {'L', 'S', 'M', 'L', 'P', '\0', '\0', '\0'};
inline constexpr std::uint32_t kMlpFormatVersion = 1;

// Little-endian primitives shared by the network and agent checkpoint formats.
namespace binio {
void write_u8(std::ostream& out, std::uint8_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
std::uint8_t read_u8(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
void write_magic(std::ostream& out, const char (&magic)[8]);
/// Throws StructuralError if the next eight bytes are not `magic`.
void expect_magic(std::istream& in, const char (&magic)[8], const std::string& what);
}  // namespace binio

/// Layout: magic, u32 version, u32 layer count, then per layer u32 rows (out),
/// u32 cols (in), u8 activation, rows*cols f64 weights row-major, rows f64 biases.
void write_mlp(std::ostream& out, const MlpParams& params);
MlpParams read_mlp(std::istream& in);

void save_mlp(const std::filesystem::path& path, const MlpParams& params);
MlpParams load_mlp(const std::filesystem::path& path);

}  // namespace lanesafe::nnet
