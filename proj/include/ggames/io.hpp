#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ggames/experiments.hpp"
#include "ggames/graphs.hpp"
#include "ggames/stochastic.hpp"

namespace ggames::io {

// Shortest text that reads back to the same double ("nan", "inf", "-inf"
// for non-finite values).
std::string format_number(double x);
double parse_number(std::string_view text);

// Long format with header player,scenario,t_index,value; one row per player
// and slice, in player-major order.
void write_profile_csv(std::ostream& os, const Profile& p);
// Every (player, scenario, t_index) cell must appear exactly once.
Profile read_profile_csv(std::istream& is, const SpacePtr& space);

// Grid and scenario probabilities as a JSON object.
std::string space_metadata(const Space& space);
SpacePtr parse_space_metadata(std::string_view json);

// Dense matrix with a leading "# n=<N>,scale=<s>" line.
void write_matrix_csv(std::ostream& os, const InteractionMatrix& g);
InteractionMatrix read_matrix_csv(std::istream& is);

// Long format N,rep,metric,value.
void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames, so readers never see a
// partial file.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace ggames::io
