#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

// Persistence: CSV tables with 17-significant-digit floats (diffable runs),
// a flat key = value plan format with strict key checking, and a JSON run
// manifest whose digest covers every emitted file.

namespace hcl {

inline constexpr const char* kVersion = "0.1.0";

std::string format_double(double v);  // %.17g

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& cells);
  std::string body() const;  // header + rows, '\n' separated
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

// Flat configuration text: one `key = value` per line, '#' comments.
// Unknown keys are rejected against the documented schema.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
const std::vector<std::string>& plan_config_keys();
void reject_unknown_keys(const std::map<std::string, std::string>& kv);

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

struct ManifestEntry {
  std::string path;
  std::uint64_t bytes;
  std::string digest;
};

// JSON manifest: plan echo, code version, timestamps, seed root, and the
// digest table of the emitted files.
void write_manifest(const std::filesystem::path& path, const std::string& subcommand,
                    const std::map<std::string, std::string>& plan_echo,
                    std::uint64_t seed_root, const std::vector<ManifestEntry>& outputs,
                    const std::string& started, const std::string& finished);

std::string timestamp_utc();

}  // namespace hcl
