#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ggames/graphs.hpp"
#include "ggames/rng.hpp"
#include "ggames/stochastic.hpp"

namespace ggames::fixtures {

inline Profile random_profile(const SpacePtr& space, int n, rng::Stream& r, double mean = 0.0, double spread = 1.0) {
  Eigen::MatrixXd d(n, space->slices());
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = mean + spread * r.normal();
  return Profile(space, std::move(d));
}

// Random symmetric weights in [0, 1] with zero diagonal.
inline InteractionMatrix random_graph(int n, rng::Stream& r, double density = 1.0) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g(i, j) = g(j, i) = r.uniform() < density ? r.uniform() : 0.0;
  return InteractionMatrix(std::move(g));
}

inline SpacePtr random_space(rng::Stream& r, int max_scenarios = 4, int max_steps = 16) {
  const int nw = r.integer(1, max_scenarios), nt = r.integer(1, max_steps);
  std::vector<double> p(nw);
  double total = 0.0;
  for (auto& x : p) total += (x = 0.2 + r.uniform());
  for (auto& x : p) x /= total;
  // Renormalize exactly enough for the 1e-12 check.
  double s = 0.0;
  for (int k = 0; k + 1 < nw; ++k) s += p[k];
  p.back() = 1.0 - s;
  return make_space(TimeGrid::uniform(r.uniform(0.5, 2.0), nt), ScenarioSet(p));
}

}  // namespace ggames::fixtures
