#pragma once

#include "eegcs/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace eegcs {

// Binary matrix container (little-endian):
//   bytes 0..7    magic "EEGCSMAT"
//   bytes 8..11   u32 version (= 1)
//   bytes 12..15  u32 reserved (= 0)
//   bytes 16..23  u64 rows
//   bytes 24..31  u64 cols
//   then rows*cols IEEE-754 binary64 values, column-major.
inline constexpr std::uint32_t kMatrixContainerVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix load_matrix(const std::filesystem::path& path);

/// One row per line, comma separated, '.' decimal point, 17 significant
/// digits (round-trips every double).
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

std::string format_double(double v);
/// Locale-independent parse of a whole token; throws FormatError.
double parse_double(std::string_view text);

namespace binary {

void put_u32(std::ostream& out, std::uint32_t v);
void put_u64(std::ostream& out, std::uint64_t v);
void put_f64(std::ostream& out, double v);
std::uint32_t get_u32(std::istream& in);
std::uint64_t get_u64(std::istream& in);
double get_f64(std::istream& in);

} // namespace binary

} // namespace eegcs
