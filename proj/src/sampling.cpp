#include "ggames/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "ggames/errors.hpp"
#include "ggames/rng.hpp"

namespace ggames {

namespace {
constexpr std::uint64_t kLatentStream = 1;
constexpr std::uint64_t kEdgeStream = 2;
}  // namespace

std::vector<double> sample_latent(int n, std::uint64_t seed) {
  if (n < 1) throw ArgumentError("sampling needs N >= 1");
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = rng::uniform(rng::key(seed, kLatentStream, i));
  std::sort(x.begin(), x.end());
  return x;
}

SampledGraph sample_weighted(const Graphon& w, int n, std::uint64_t seed) {
  auto x = sample_latent(n, seed);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) g(i, j) = g(j, i) = w(x[i], x[j]);
  return {InteractionMatrix(std::move(g), 1.0), std::move(x)};
}

SampledGraph sample_simple(const Graphon& w, int n, double kappa, std::uint64_t seed) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ArgumentError("sample_simple: kappa must lie in (0, 1]");
  auto x = sample_latent(n, seed);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng::uniform(rng::key(seed, kEdgeStream, i, j)) < kappa * w(x[i], x[j])) g(i, j) = g(j, i) = 1.0;
  return {InteractionMatrix(std::move(g), 1.0 / kappa), std::move(x)};
}

InteractionMatrix coarsen(const Graphon& w, int n, int m) {
  if (n < 1 || m < n || m % n != 0) throw ArgumentError("coarsen: m must be a positive multiple of N");
  const int k = m / n;
  const Eigen::MatrixXd fine = w.discretize(m);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = fine.block(i * k, j * k, k, k).mean();
  // Averaging is symmetric up to rounding; enforce it exactly.
  g = 0.5 * (g + g.transpose()).eval();
  return InteractionMatrix(std::move(g), 1.0);
}

SamplingBound sampling_bound(int n, double delta, double lipschitz, double blocks, double kappa) {
  if (n < 1) throw ArgumentError("sampling_bound: N must be positive");
  const double lo = n * std::exp(-n / 5.0), hi = std::exp(-1.0);
  if (!(delta > lo && delta < hi))
    throw ArgumentError("sampling_bound: delta must lie in (N exp(-N/5), exp(-1)) = (" + std::to_string(lo) + ", " +
                        std::to_string(hi) + ")");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw ArgumentError("sampling_bound: kappa must lie in (0, 1]");
  if (lipschitz < 0.0 || blocks < 0.0) throw ArgumentError("sampling_bound: L and K must be nonnegative");
  SamplingBound b;
  b.d = 1.0 / n + std::sqrt(8.0 * std::log(n / delta) / (n + 1.0));
  const double radicand = (lipschitz * lipschitz - blocks * blocks) * b.d * b.d + blocks * b.d;
  if (radicand < 0.0) throw ArgumentError("sampling_bound: (L^2 - K^2) d_N^2 + K d_N is negative for these constants");
  b.rho = 2.0 * std::sqrt(radicand);
  b.rho_prime = std::sqrt(4.0 / kappa * std::log(2.0 * n / delta) / n) + b.rho;
  return b;
}

}  // namespace ggames
