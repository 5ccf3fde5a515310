#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cua {

enum class Err {
  unsupported_action,
  parse_error,
  domain_error,
  no_action,
  io_error,
  alignment_error,
  cue_not_applicable,
  backend_error,
  verdict_parse_error,
  emission_error,
  input_error,
  format_error,
};

std::string_view err_name(Err code);

/// Exception carrying a machine-readable error code; parse failures also
/// carry the byte offset of the offending input.
class CuaError : public std::runtime_error {
 public:
  CuaError(Err code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  CuaError(Err code, const std::string& message, std::size_t offset)
      : std::runtime_error(message), code_(code), offset_(offset) {}

  Err code() const { return code_; }
  std::optional<std::size_t> offset() const { return offset_; }

 private:
  Err code_;
  std::optional<std::size_t> offset_;
};

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

/// Write via a sibling temp file and rename so readers never observe a
/// partial file.
void atomic_write(const std::filesystem::path& path, std::string_view data);

/// Fixed-point coordinate formatting, e.g. 0.157 -> "0.1570".
std::string format_coord(double v);

/// Quantize to the canonical 4-decimal coordinate grid.
double quantize_coord(double v);

std::vector<std::string> split_lines(std::string_view text);

std::string to_lower(std::string_view s);

}  // namespace cua
