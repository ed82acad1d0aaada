#include "ggames/cut_norm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "ggames/errors.hpp"
#include "ggames/rng.hpp"

namespace ggames {

namespace {

// Block masses M_ij = |P_i| |P_j| v_ij; the cut norm of the kernel equals
// max over block subsets S1, S2 of |sum_{S1 x S2} M|.
Eigen::MatrixXd block_masses(const StepKernel& k) {
  const auto w = k.widths();
  Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  return wv.asDiagonal() * k.values * wv.asDiagonal();
}

// For fixed row weights, the best column set takes all positive (or all
// negative) column sums.
double best_columns(const Eigen::VectorXd& colsum) {
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index j = 0; j < colsum.size(); ++j) (colsum[j] > 0 ? pos : neg) += colsum[j];
  return std::max(pos, -neg);
}

double exact_enumeration(const Eigen::MatrixXd& m) {
  const int k = static_cast<int>(m.rows());
  Eigen::VectorXd colsum = Eigen::VectorXd::Zero(m.cols());
  double best = 0.0;
  // Gray-code walk: each step toggles a single row.
  std::uint32_t gray = 0;
  for (std::uint32_t step = 1; step < (1u << k); ++step) {
    const int bit = std::countr_zero(step);
    gray ^= 1u << bit;
    if (gray & (1u << bit))
      colsum += m.row(bit).transpose();
    else
      colsum -= m.row(bit).transpose();
    best = std::max(best, best_columns(colsum));
  }
  return best;
}

double ascend(const Eigen::MatrixXd& m, std::vector<char> rows, double sign) {
  const Eigen::Index k = m.rows();
  std::vector<char> cols(k, 0);
  double value = -INFINITY;
  for (int sweep = 0; sweep < 1000; ++sweep) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i)
      if (rows[i]) c += m.row(i).transpose();
    for (Eigen::Index j = 0; j < k; ++j) cols[j] = sign * c[j] > 0;
    Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j)
      if (cols[j]) r += m.col(j);
    double next = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      rows[i] = sign * r[i] > 0;
      if (rows[i]) next += sign * r[i];
    }
    if (next <= value + 1e-15 * std::abs(next)) return std::max(value, next);
    value = next;
  }
  return value;
}

double heuristic(const Eigen::MatrixXd& m, std::uint64_t seed, int restarts) {
  rng::Stream s(seed);
  double best = 0.0;
  const Eigen::Index k = m.rows();
  for (int r = 0; r < restarts; ++r) {
    std::vector<char> rows(k);
    for (auto& x : rows) x = s.uniform() < 0.5;
    if (r == 0) std::fill(rows.begin(), rows.end(), 1);
    best = std::max({best, ascend(m, rows, 1.0), ascend(m, rows, -1.0)});
  }
  return best;
}

}  // namespace

CutNormMode parse_cut_norm_mode(const std::string& name) {
  if (name == "exact") return CutNormMode::exact;
  if (name == "heuristic") return CutNormMode::heuristic;
  if (name == "automatic" || name == "auto") return CutNormMode::automatic;
  throw ArgumentError("unknown cut norm mode '" + name + "' (exact, heuristic, automatic)");
}

CutNormResult cut_norm(const StepKernel& input, CutNormMode mode, std::uint64_t seed, int restarts) {
  input.validate();
  const StepKernel kernel = merge_equal_blocks(input);
  const int k = kernel.blocks();
  const bool exact = mode == CutNormMode::exact || (mode == CutNormMode::automatic && k <= kMaxExactBlocks);
  if (exact && k > kMaxExactBlocks)
    throw CapabilityError("exact cut norm supports at most 16 blocks, kernel has " + std::to_string(k));
  const Eigen::MatrixXd m = block_masses(kernel);
  if (exact) return {exact_enumeration(m), false, k};
  if (restarts < 1) throw ArgumentError("cut norm heuristic needs at least one restart");
  return {heuristic(m, seed, restarts), true, k};
}

CutNormResult cut_norm(const Graphon& w, CutNormMode mode, int m) {
  if (auto step = w.as_step_kernel()) return cut_norm(*step, mode);
  return cut_norm(StepKernel::uniform(w.discretize(m)), mode);
}

CutNormResult cut_norm_difference(const Graphon& a, const Graphon& b, CutNormMode mode, int m) {
  const auto sa = a.as_step_kernel(), sb = b.as_step_kernel();
  if (sa && sb) return cut_norm(kernel_difference(*sa, *sb), mode);
  return cut_norm(StepKernel::uniform(a.discretize(m) - b.discretize(m)), mode);
}

double step_kernel_op_norm(const StepKernel& kernel) {
  kernel.validate();
  const auto w = kernel.widths();
  Eigen::VectorXd s(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) s[static_cast<Eigen::Index>(i)] = std::sqrt(w[i]);
  const Eigen::MatrixXd b = s.asDiagonal() * kernel.values * s.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  return svd.singularValues()[0];
}

}  // namespace ggames
