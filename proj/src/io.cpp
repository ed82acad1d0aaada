#include "ggames/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ggames/errors.hpp"

namespace ggames::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_index(std::string_view text, const char* what) {
  text = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v < 0)
    throw ArgumentError(std::string("bad ") + what + " index '" + std::string(text) + "'");
  return v;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (text == "nan") return NAN;
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ArgumentError("not a number: '" + std::string(text) + "'");
  return v;
}

void write_profile_csv(std::ostream& os, const Profile& p) {
  const int nt = p.space()->grid().steps();
  const int nw = p.space()->scenarios().size();
  os << "player,scenario,t_index,value\n";
  for (int i = 0; i < p.players(); ++i)
    for (int w = 0; w < nw; ++w)
      for (int t = 0; t < nt; ++t)
        os << i << ',' << w << ',' << t << ',' << format_number(p.data()(i, w * nt + t)) << '\n';
}

Profile read_profile_csv(std::istream& is, const SpacePtr& space) {
  const int nt = space->grid().steps();
  const int nw = space->scenarios().size();
  std::string line;
  if (!std::getline(is, line) || trim(line) != "player,scenario,t_index,value")
    throw ArgumentError("profile CSV must start with the header player,scenario,t_index,value");
  struct Cell {
    int i, s;
    double v;
  };
  std::vector<Cell> cells;
  int players = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw ArgumentError("profile CSV row needs 4 fields: '" + line + "'");
    const int i = parse_index(f[0], "player"), w = parse_index(f[1], "scenario"), t = parse_index(f[2], "time");
    if (w >= nw || t >= nt) throw ShapeError("profile CSV cell outside the space: '" + line + "'");
    cells.push_back({i, w * nt + t, parse_number(f[3])});
    players = std::max(players, i + 1);
  }
  if (players == 0) throw ArgumentError("profile CSV has no rows");
  if (cells.size() != static_cast<std::size_t>(players) * space->slices())
    throw ShapeError("profile CSV must list every (player, scenario, t_index) cell exactly once");
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(players, space->slices(), NAN);
  for (const auto& c : cells) {
    if (!std::isnan(data(c.i, c.s))) throw ShapeError("profile CSV repeats a cell");
    data(c.i, c.s) = c.v;
  }
  return Profile(space, std::move(data));
}

std::string space_metadata(const Space& space) {
  nlohmann::ordered_json j;
  j["horizon"] = space.grid().horizon();
  j["times"] = space.grid().times();
  j["weights"] = space.grid().weights();
  j["probabilities"] = space.scenarios().probabilities();
  return j.dump(2) + "\n";
}

SpacePtr parse_space_metadata(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TimeGrid grid(j.at("horizon").get<double>(), j.at("weights").get<std::vector<double>>(),
                  j.at("times").get<std::vector<double>>());
    return make_space(std::move(grid), ScenarioSet(j.at("probabilities").get<std::vector<double>>()));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad space metadata: ") + e.what());
  }
}

void write_matrix_csv(std::ostream& os, const InteractionMatrix& g) {
  const auto& e = g.entries();
  os << "# n=" << g.size() << ",scale=" << format_number(g.scale()) << '\n';
  for (int i = 0; i < e.rows(); ++i) {
    for (int j = 0; j < e.cols(); ++j) os << (j ? "," : "") << format_number(e(i, j));
    os << '\n';
  }
}

InteractionMatrix read_matrix_csv(std::istream& is) {
  std::string line;
  int n = -1;
  double scale = 1.0;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::string_view v = trim(line);
    if (v.empty()) continue;
    if (v.front() == '#') {
      v.remove_prefix(1);
      for (auto field : split(v, ',')) {
        field = trim(field);
        if (field.starts_with("n=")) n = parse_index(field.substr(2), "matrix size");
        else if (field.starts_with("scale=")) scale = parse_number(field.substr(6));
      }
      continue;
    }
    std::vector<double> row;
    for (auto f : split(v, ',')) row.push_back(parse_number(f));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ArgumentError("matrix CSV has no rows");
  const int size = static_cast<int>(rows.size());
  if (n >= 0 && n != size) throw ShapeError("matrix CSV header says n=" + std::to_string(n) + " but has " +
                                            std::to_string(size) + " rows");
  Eigen::MatrixXd m(size, size);
  for (int i = 0; i < size; ++i) {
    if (static_cast<int>(rows[i].size()) != size) throw ShapeError("matrix CSV is not square");
    for (int j = 0; j < size; ++j) m(i, j) = rows[i][j];
  }
  return InteractionMatrix(std::move(m), scale);
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "N,rep,metric,value\n";
  for (const auto& r : rows) os << r.n << ',' << r.rep << ',' << r.metric << ',' << format_number(r.value) << '\n';
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ArgumentError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ggames::io
