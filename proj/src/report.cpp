#include "kan3/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace kan3 {

std::uint64_t fnv1a(std::string_view data, std::uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

void csv_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(row[i]);
  }
  out.push_back('\n');
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  csv_row(out, header);
  for (const auto& r : rows) csv_row(out, r);
  return out;
}

std::string ppm_bytes(const std::vector<std::uint8_t>& labels, int width, int height) {
  if (width <= 0 || height <= 0 || labels.empty())
    throw Error(ErrorKind::InvalidArgument, "empty image slice");
  if (labels.size() != static_cast<std::size_t>(width) * height)
    throw Error(ErrorKind::InvalidArgument, "slice size does not match width x height");
  static const unsigned char palette[3][3] = {{30, 90, 200}, {200, 60, 30}, {128, 128, 128}};
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + labels.size() * 3);
  for (std::uint8_t l : labels) {
    const unsigned char* c = palette[l < 2 ? l : 2];
    out.append(reinterpret_cast<const char*>(c), 3);
  }
  return out;
}

void make_directories(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create directory '" + dir + "': " + ec.message());
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for '" + path + "'");
}

bool RunManifest::passed() const {
  if (!error.empty()) return false;
  for (const auto& [name, ok] : checks)
    if (!ok) return false;
  return true;
}

std::uint64_t RunManifest::payload_hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& o : outputs) {
    h = fnv1a(o.name, h);
    h = fnv1a(hex64(o.hash), h);
  }
  return h;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["code_version"] = code_version;
  j["config_hash"] = hex64(config_hash);
  j["payload_hash"] = hex64(payload_hash());
  j["passed"] = passed();
  if (!error.empty()) j["error"] = error;
  auto& c = j["checks"] = nlohmann::ordered_json::object();
  for (const auto& [name, ok] : checks) c[name] = ok;
  auto& o = j["outputs"] = nlohmann::ordered_json::array();
  for (const auto& f : outputs) o.push_back({{"name", f.name}, {"fnv1a", hex64(f.hash)}, {"bytes", f.bytes}});
  auto& t = j["timings_s"] = nlohmann::ordered_json::object();
  for (const auto& [name, s] : timings) t[name] = s;
  j["config"] = config_text;
  return j.dump(2) + "\n";
}

const char* code_version() { return "kan3 0.1.0"; }

}  // namespace kan3
