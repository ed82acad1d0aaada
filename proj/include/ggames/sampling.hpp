#pragma once

#include <cstdint>
#include <vector>

#include "ggames/graphs.hpp"

namespace ggames {

struct SampledGraph {
  InteractionMatrix matrix;
  std::vector<double> latent;  // sorted latent positions x_1 <= ... <= x_N
};

// Order statistics of N iid uniforms, keyed by (seed, i).
std::vector<double> sample_latent(int n, std::uint64_t seed);

// Weighted sampling: G_ij = W(x_i, x_j), diagonal W(x_i, x_i) kept, scale 1.
SampledGraph sample_weighted(const Graphon& w, int n, std::uint64_t seed);

// Simple-graph sampling: edge {i, j} present with probability kappa W(x_i, x_j),
// zero diagonal, scale 1 / kappa. Edge draws keyed by (seed, i, j).
SampledGraph sample_simple(const Graphon& w, int n, double kappa, std::uint64_t seed);

// Block average of an m x m discretization down to n x n (m a multiple of n).
// For step graphons aligned with the n-partition this is exactly the blocks.
InteractionMatrix coarsen(const Graphon& w, int n, int m);

struct SamplingBound {
  double d = 0.0;          // d_N
  double rho = 0.0;        // weighted-sampling bound
  double rho_prime = 0.0;  // simple-graph sampling bound
};

// Diagnostic high-probability bounds for blockwise Lipschitz graphons with
// constants L, K, holding with probability at least 1 - delta.
SamplingBound sampling_bound(int n, double delta, double lipschitz, double blocks, double kappa);

}  // namespace ggames
