#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "ggames/stochastic.hpp"

namespace ggames {

// Symmetric weight matrix with raw entries in [0, 1] and a positive scale
// (1 for dense games, 1/kappa for sparse-sampled ones). The game uses
// scale * entries.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(Eigen::MatrixXd entries, double scale = 1.0);

  int size() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double scale() const noexcept { return scale_; }
  Eigen::MatrixXd effective() const { return scale_ * entries_; }

  InteractionMatrix with_zero_diagonal() const;

 private:
  Eigen::MatrixXd entries_;
  double scale_;
};

// Piecewise-constant kernel on a (not necessarily uniform) partition of
// [0, 1]. Used for step graphons and for differences of step graphons.
struct StepKernel {
  std::vector<double> breaks;  // 0 = b_0 < ... < b_K = 1
  Eigen::MatrixXd values;      // K x K block values

  int blocks() const noexcept { return static_cast<int>(values.rows()); }
  std::vector<double> widths() const;
  int block_of(double x) const;
  double operator()(double x, double y) const { return values(block_of(x), block_of(y)); }

  static StepKernel uniform(Eigen::MatrixXd values);
  void validate() const;
};

// Common refinement of two step kernels, then a - b.
StepKernel kernel_difference(const StepKernel& a, const StepKernel& b);

// Same kernel on the coarsest partition: adjacent blocks whose rows (and, by
// symmetry, columns) coincide are merged.
StepKernel merge_equal_blocks(const StepKernel& k);

class Graphon {
 public:
  enum class Kind { constant, product, minimum, step };

  static Graphon constant(double p);
  static Graphon product();  // W(x, y) = x y
  static Graphon minimum();  // W(x, y) = min(x, y)
  // Stochastic block model: block proportions summing to 1 and a symmetric
  // K x K matrix of connection probabilities.
  static Graphon stochastic_block(const std::vector<double>& proportions, Eigen::MatrixXd probabilities);
  // Step graphon on the uniform partition with given block values.
  static Graphon step(Eigen::MatrixXd values);
  static Graphon step(StepKernel kernel);

  Kind kind() const noexcept { return kind_; }
  double operator()(double x, double y) const;
  // Exact piecewise-constant representation when the graphon has one.
  std::optional<StepKernel> as_step_kernel() const;
  // m x m matrix of values at block midpoints.
  Eigen::MatrixXd discretize(int m) const;
  std::string describe() const;

 private:
  Graphon(Kind kind, double p, StepKernel kernel) : kind_(kind), p_(p), kernel_(std::move(kernel)) {}
  Kind kind_;
  double p_ = 0.0;
  StepKernel kernel_;
};

// Step graphon with block values scale * entries on the uniform N-partition.
Graphon step_graphon(const InteractionMatrix& g);

// Midpoint discretization as a game structure: N = m players, scale 1.
InteractionMatrix discretize(const Graphon& w, int m);

// z^i = (scale / N) sum_j G_ij a^j for every slice.
Profile local_aggregate(const InteractionMatrix& g, const Profile& a);
// z^{x_i} = (1/N) sum_j W(x_i, x_j) a^j with x_i the block midpoints.
Profile apply_operator(const Graphon& w, const Profile& a);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
  int source_n = 0;
};

// Eigendecomposition of scale * entries.
SpectralDecomposition spectrum(const InteractionMatrix& g);
SpectralDecomposition spectrum(const Eigen::MatrixXd& symmetric);
// Eigenvalues only, descending.
Eigen::VectorXd eigenvalues(const InteractionMatrix& g);

// Largest |eigenvalue| of a symmetric matrix by power iteration on ||A v||.
double power_norm(const Eigen::MatrixXd& symmetric, double tol = 1e-13, int max_iters = 100000);

// Largest eigenvalue of the graphon operator from the m-point midpoint
// discretization scaled by 1/m.
double graphon_lambda1(const Graphon& w, int m = 256);

// Operator norm on L2[0,1] of W1 - W2 at resolution m.
double op_norm_diff(const Graphon& w1, const Graphon& w2, int m = 256);
// Operator norm of a uniform step kernel given by its m x m block values.
double kernel_op_norm(const Eigen::MatrixXd& block_values);

}  // namespace ggames
