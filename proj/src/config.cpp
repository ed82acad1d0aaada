#include "ggames/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <limits>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "ggames/errors.hpp"
#include "ggames/io.hpp"

namespace ggames {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    return io::parse_number(text);
  } catch (const ArgumentError&) {
    throw ArgumentError("config key '" + key + "': expected a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size())
    throw ArgumentError("config key '" + key + "': expected an integer, got '" + text + "'");
  return v;
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  const auto abs = std::filesystem::absolute(path);
  return from_string(io::read_file(abs), abs.parent_path());
}

Config Config::from_string(const std::string& text, std::filesystem::path base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ArgumentError(std::string("config parse error: ") + e.what());
  }
  Config cfg;
  cfg.base_dir_ = base_dir.empty() ? std::filesystem::current_path() : std::move(base_dir);
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      cfg.values_[name] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) {
      if (!leaf.empty()) throw ArgumentError("config key '" + name + "." + key + "' is nested too deeply");
      cfg.values_[name + "." + key] = trim(leaf.data());
    }
  }
  return cfg;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ArgumentError("override must look like section.key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

const std::string* Config::find(const std::string& key) const {
  used_.insert(key);
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

bool Config::has_section(const std::string& section) const {
  const std::string prefix = section + ".";
  const auto it = values_.lower_bound(prefix);
  return it != values_.end() && it->first.starts_with(prefix);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

std::string Config::require_string(const std::string& key) const {
  const auto* v = find(key);
  if (!v || v->empty()) throw ArgumentError("config key '" + key + "' is required");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? to_double(key, *v) : fallback;
}

std::optional<double> Config::get_optional_double(const std::string& key) const {
  const auto* v = find(key);
  if (!v) return std::nullopt;
  return to_double(key, *v);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  const long long x = to_integer(key, *v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ArgumentError("config key '" + key + "' is out of range");
  return static_cast<int>(x);
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::size_t pos = 0;
  std::uint64_t x = 0;
  try {
    if (!v->empty() && v->front() != '-') x = std::stoull(*v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v->size())
    throw ArgumentError("config key '" + key + "': expected an unsigned integer, got '" + *v + "'");
  return x;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ArgumentError("config key '" + key + "': expected true or false, got '" + *v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split(*v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : split(*v, ',')) out.push_back(static_cast<int>(to_integer(key, item)));
  return out;
}

Eigen::MatrixXd Config::get_matrix(const std::string& key) const {
  const std::string text = require_string(key);
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) {
    if (row.empty()) continue;
    std::vector<double> r;
    for (const auto& item : split(row, ',')) r.push_back(to_double(key, item));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ArgumentError("config key '" + key + "' holds an empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size())
      throw ShapeError("config key '" + key + "': matrix rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::filesystem::path Config::get_path(const std::string& key) const {
  std::filesystem::path p = require_string(key);
  if (p.is_relative()) p = base_dir_ / p;
  return p.lexically_normal();
}

void Config::reject_unknown() const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw ArgumentError("unknown or unused config keys: " + unknown);
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

}  // namespace ggames
