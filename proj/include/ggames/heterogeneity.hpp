#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggames/stochastic.hpp"

namespace ggames {

enum class HeterogeneityFamily { constant, sinusoid, ar1 };

HeterogeneityFamily parse_heterogeneity_family(const std::string& name);
std::string to_string(HeterogeneityFamily family);

struct HeterogeneityParams {
  double level = 0.0;      // additive constant c
  double amplitude = 1.0;  // sinusoid amplitude
  double frequency = 1.0;  // sinusoid cycles per horizon
  double phi = 0.5;        // AR(1) coefficient, |phi| < 1
  double sigma = 1.0;      // AR(1) innovation scale (stationary start)
};

void validate(const HeterogeneityParams& params, HeterogeneityFamily family);

// Independent draws per player: player i's randomness is keyed by (seed, i),
// the finite stand-in for essentially pairwise independent types.
Profile make_heterogeneity(const SpacePtr& space, int players, HeterogeneityFamily family,
                           const HeterogeneityParams& params, std::uint64_t seed);

// Heterogeneity as a function of the latent position x in [0, 1]: a field
// theta^x that is Lipschitz in x, shared randomness across x. Evaluating at
// latent points gives theta^{x_i} for sampled games; at block midpoints it
// gives the discretized graphon-side theta.
Profile heterogeneity_field(const SpacePtr& space, const std::vector<double>& latent, HeterogeneityFamily family,
                            const HeterogeneityParams& params, std::uint64_t seed);

// Block midpoints (i + 1/2) / m of the uniform partition.
std::vector<double> midpoints(int m);

}  // namespace ggames
