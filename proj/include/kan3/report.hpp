#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kan3/error.hpp"

namespace kan3 {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = kFnvOffset);
std::string hex64(std::uint64_t v);

/// Shortest round-trip decimal form.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  /// LF line endings, ',' separator, quoted only when needed.
  std::string str() const;
};

/// Labels 0 = torus0, 1 = torus1, anything else = undecided. Row-major, top row first.
std::string ppm_bytes(const std::vector<std::uint8_t>& labels, int width, int height);

void write_file(const std::string& path, const std::string& bytes);
void make_directories(const std::string& dir);

struct OutputFile {
  std::string name;
  std::uint64_t hash = 0;
  std::size_t bytes = 0;
};

struct RunManifest {
  std::string experiment;
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::string code_version;
  std::vector<OutputFile> outputs;
  std::vector<std::pair<std::string, double>> timings;  // seconds
  std::vector<std::pair<std::string, bool>> checks;
  std::string error;  // non-empty when the run threw

  bool passed() const;
  /// Hash over the output payloads only (names and bytes, timings excluded).
  std::uint64_t payload_hash() const;
  std::string to_json() const;
};

const char* code_version();

}  // namespace kan3
