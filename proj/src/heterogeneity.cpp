#include "ggames/heterogeneity.hpp"

#include <cmath>
#include <numbers>

#include "ggames/errors.hpp"
#include "ggames/rng.hpp"

namespace ggames {

namespace {

constexpr std::uint64_t kPhaseStream = 101;
constexpr std::uint64_t kNoiseStream = 102;
constexpr std::uint64_t kFieldPhase = 201;
constexpr std::uint64_t kFieldNoise = 202;

// Stationary AR(1) path Y_0 ~ N(0, sigma^2/(1-phi^2)), Y_t = phi Y_{t-1} + sigma eps_t.
template <typename Noise>
void ar1_path(const HeterogeneityParams& p, int steps, Noise noise, double* out) {
  double y = p.sigma / std::sqrt(1.0 - p.phi * p.phi) * noise(0);
  out[0] = y;
  for (int t = 1; t < steps; ++t) {
    y = p.phi * y + p.sigma * noise(t);
    out[t] = y;
  }
}

}  // namespace

HeterogeneityFamily parse_heterogeneity_family(const std::string& name) {
  if (name == "constant") return HeterogeneityFamily::constant;
  if (name == "sinusoid") return HeterogeneityFamily::sinusoid;
  if (name == "ar1") return HeterogeneityFamily::ar1;
  throw ArgumentError("unknown heterogeneity family '" + name + "' (constant, sinusoid, ar1)");
}

std::string to_string(HeterogeneityFamily family) {
  switch (family) {
    case HeterogeneityFamily::constant: return "constant";
    case HeterogeneityFamily::sinusoid: return "sinusoid";
    case HeterogeneityFamily::ar1: return "ar1";
  }
  return "?";
}

void validate(const HeterogeneityParams& p, HeterogeneityFamily family) {
  if (!std::isfinite(p.level) || !std::isfinite(p.amplitude) || !std::isfinite(p.frequency))
    throw ArgumentError("heterogeneity parameters must be finite");
  if (family == HeterogeneityFamily::ar1) {
    if (!(std::abs(p.phi) < 1.0)) throw ArgumentError("ar1 coefficient must satisfy |phi| < 1");
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) throw ArgumentError("ar1 sigma must be nonnegative");
  }
}

std::vector<double> midpoints(int m) {
  std::vector<double> x(m);
  for (int i = 0; i < m; ++i) x[i] = (i + 0.5) / m;
  return x;
}

Profile make_heterogeneity(const SpacePtr& space, int players, HeterogeneityFamily family,
                           const HeterogeneityParams& p, std::uint64_t seed) {
  validate(p, family);
  if (players < 1) throw ArgumentError("make_heterogeneity: need at least one player");
  const int nw = space->scenarios().size(), nt = space->grid().steps();
  const double horizon = space->grid().horizon();
  const auto& times = space->grid().times();
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(players, space->slices(), p.level);
  if (family == HeterogeneityFamily::constant) return Profile(space, std::move(data));

  std::vector<double> path(nt);
  for (int i = 0; i < players; ++i) {
    for (int w = 0; w < nw; ++w) {
      if (family == HeterogeneityFamily::sinusoid) {
        const double phase = 2.0 * std::numbers::pi * rng::uniform(rng::key(seed, kPhaseStream, i, w));
        for (int t = 0; t < nt; ++t)
          path[t] = p.amplitude * std::sin(2.0 * std::numbers::pi * p.frequency * times[t] / horizon + phase);
      } else {
        ar1_path(p, nt, [&](int t) { return rng::normal(rng::key(seed, kNoiseStream, i, w, t)); }, path.data());
      }
      for (int t = 0; t < nt; ++t) data(i, w * nt + t) += path[t];
    }
  }
  return Profile(space, std::move(data));
}

Profile heterogeneity_field(const SpacePtr& space, const std::vector<double>& latent, HeterogeneityFamily family,
                            const HeterogeneityParams& p, std::uint64_t seed) {
  validate(p, family);
  if (latent.empty()) throw ArgumentError("heterogeneity_field: need at least one point");
  const int n = static_cast<int>(latent.size());
  const int nw = space->scenarios().size(), nt = space->grid().steps();
  const double horizon = space->grid().horizon();
  const auto& times = space->grid().times();
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(n, space->slices(), p.level);
  if (family == HeterogeneityFamily::constant) return Profile(space, std::move(data));

  std::vector<double> path(nt);
  for (int w = 0; w < nw; ++w) {
    if (family == HeterogeneityFamily::sinusoid) {
      const double phase = 2.0 * std::numbers::pi * rng::uniform(rng::key(seed, kFieldPhase, w));
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < nt; ++t)
          data(i, w * nt + t) += p.amplitude * std::sin(2.0 * std::numbers::pi *
                                                            (p.frequency * times[t] / horizon + latent[i]) + phase);
    } else {
      ar1_path(p, nt, [&](int t) { return rng::normal(rng::key(seed, kFieldNoise, w, t)); }, path.data());
      for (int i = 0; i < n; ++i)
        for (int t = 0; t < nt; ++t) data(i, w * nt + t) += (0.5 + latent[i]) * path[t];
    }
  }
  return Profile(space, std::move(data));
}

}  // namespace ggames
