#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fscns {

// Round-trip-exact numeric formatting (17 significant digits).
std::string format_double(double v);

// Joins CSV fields; no quoting needed for our numeric/enum columns.
std::string csv_row(const std::vector<std::string>& fields);

// Flat key = value configuration file. '#' starts a comment; keys may be
// dotted (grid.epsilon = 0.02,0.05,0.10). Later duplicates win.
class KeyValueConfig {
public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

private:
  std::map<std::string, std::string> entries_;
};

// Reproducibility record written next to every command's output.
struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::uint64_t seed = 0;
  std::string build_id;
  std::string started_at;
  std::string finished_at;
  double wall_seconds = 0.0;
  std::size_t aborted_replicates = 0;

  void write(const std::string& path) const;
};

std::string current_timestamp();
std::string build_identifier();

}  // namespace fscns
