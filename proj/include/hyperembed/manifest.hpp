#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hyperembed {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

/// Ordered `key=value` record of one CLI invocation.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  /// Replaces an existing key in place, otherwise appends.
  void set(std::string key, std::string value);
  /// Records `<key>=<path>` and `<key>_sha256=<digest>`.
  void add_input(const std::string& key, const std::filesystem::path& path);
  const std::string* get(std::string_view key) const;

  std::string str() const;
  /// Stamps finished_at and writes the file.
  void write(const std::filesystem::path& path);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses `key=value` lines; blank lines and `#` comments are skipped and
/// surrounding whitespace is trimmed.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

}  // namespace hyperembed
