#include "hcl/io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hcl {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    throw std::invalid_argument("CsvWriter: row width does not match header");
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  rows_.push_back(std::move(row));
}

std::string CsvWriter::body() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    out += r;
    out += '\n';
  }
  return out;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("CsvWriter: cannot open " + path.string());
  os << body();
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    if (kv.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

const std::vector<std::string>& plan_config_keys() {
  static const std::vector<std::string> keys = {
      "L",      "n",         "g",            "lambda", "omega_max", "distribution",
      "realizations", "seed_root", "window_lo", "window_hi", "s", "mu", "mu_T", "energy"};
  return keys;
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv) {
  const auto& keys = plan_config_keys();
  for (const auto& [k, v] : kv) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw std::invalid_argument("config: unknown key '" + k + "'");
  }
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

void write_manifest(const std::filesystem::path& path, const std::string& subcommand,
                    const std::map<std::string, std::string>& plan_echo,
                    std::uint64_t seed_root, const std::vector<ManifestEntry>& outputs,
                    const std::string& started, const std::string& finished) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["version"] = kVersion;
  j["seed_root"] = seed_root;
  j["started"] = started;
  j["finished"] = finished;
  j["plan"] = plan_echo;
  std::string combined;
  for (const auto& e : outputs) {
    j["outputs"].push_back({{"path", e.path}, {"bytes", e.bytes}, {"fnv1a64", e.digest}});
    combined += e.digest;
  }
  if (outputs.empty()) j["outputs"] = nlohmann::json::array();
  j["manifest_digest"] = fnv1a64_hex(combined);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write manifest " + path.string());
  os << j.dump(2) << '\n';
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hcl
