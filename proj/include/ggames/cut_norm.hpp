#pragma once

#include <cstdint>
#include <string>

#include "ggames/graphs.hpp"

namespace ggames {

// exact: block-subset enumeration, at most kMaxExactBlocks blocks.
// heuristic: alternating coordinate ascent with random restarts (lower bound).
// automatic: exact when possible, heuristic otherwise.
enum class CutNormMode { exact, heuristic, automatic };

CutNormMode parse_cut_norm_mode(const std::string& name);

inline constexpr int kMaxExactBlocks = 16;

struct CutNormResult {
  double value = 0.0;
  bool lower_bound = false;  // true when produced by the heuristic
  int blocks = 0;
};

CutNormResult cut_norm(const StepKernel& kernel, CutNormMode mode, std::uint64_t seed = 0, int restarts = 32);
// Non-step graphons are replaced by their m-point midpoint discretization.
CutNormResult cut_norm(const Graphon& w, CutNormMode mode, int m = 256);
CutNormResult cut_norm_difference(const Graphon& a, const Graphon& b, CutNormMode mode, int m = 256);

// Exact L2 operator norm of a step kernel (any partition).
double step_kernel_op_norm(const StepKernel& kernel);

}  // namespace ggames
