#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ggames {

// Flat view of an INI file: keys are "section.name". Every getter marks its
// key as used so that misspelled or unsupported keys can be rejected once a
// command has read everything it understands.
class Config {
 public:
  static Config from_file(const std::filesystem::path& path);
  // Relative paths resolve against base_dir.
  static Config from_string(const std::string& text, std::filesystem::path base_dir = {});

  // "section.name=value"; creates the key if needed.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  // True when any key lives in the section.
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated lists.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  // Rows separated by ';', entries by ','.
  Eigen::MatrixXd get_matrix(const std::string& key) const;
  // Absolute path, resolved against the config file's directory.
  std::filesystem::path get_path(const std::string& key) const;

  // Throws ArgumentError naming every key no getter has read.
  void reject_unknown() const;

  // Sorted "key=value" lines: the identity of a run for hashing.
  std::string canonical() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  std::filesystem::path base_dir_;
};

}  // namespace ggames
