#pragma once

#include "ggames/graphs.hpp"
#include "ggames/utility.hpp"

namespace ggames {

struct NashOptions {
  double tol = 1e-10;   // on the normalized distance between successive iterates
  int max_iters = 10000;
  double tol_br = -1;   // inner best-response tolerance; negative means tol / 10
  int br_max_iters = 100000;
  // Relative margin on the contraction condition when lambda_1 comes from a
  // graphon discretization.
  double graphon_margin = 0.01;
};

struct NashSolution {
  Profile actions;
  Profile aggregate;
  int iterations = 0;
  double residual = 0.0;            // last successive-iterate distance
  double contraction_factor = 0.0;  // ell_U lambda_1 / alpha_U
  double error_bound = 0.0;         // distance of the returned iterate to the fixed point
  double observed_ratio = 0.0;      // largest measured ratio of successive distances
};

// argmax of U(., z, theta) over the action set; closed form when the model
// has one, otherwise projected gradient ascent with step 1 / smoothness.
Process best_response(const UtilityModel& u, const Process& z, const Process& theta, double tol_br = 1e-12,
                      int max_iters = 100000);
// Always iterates, starting from `start`. Exposed so the closed forms can be
// checked against the generic path.
Process projected_gradient_best_response(const UtilityModel& u, const Process& z, const Process& theta,
                                         const Process& start, double tol_br, int max_iters);

// max |lambda_k(scale G)| / N: the operator norm of the step graphon of G.
double normalized_lambda1(const InteractionMatrix& g);

NashSolution solve_nash_fixed_point(const UtilityModel& u, const InteractionMatrix& g, const Profile& theta,
                                    const NashOptions& options = {});
// Graphon game at the resolution of theta (block-midpoint players).
NashSolution solve_nash_fixed_point(const UtilityModel& u, const Graphon& w, const Profile& theta,
                                    const NashOptions& options = {});

// Linear-quadratic equilibrium (I - (beta/N) scale G) a = theta, one LU
// factorization reused for every slice.
NashSolution solve_nash_lq(const InteractionMatrix& g, double beta, const Profile& theta);
NashSolution solve_nash_lq(const Graphon& w, double beta, const Profile& theta);

// Dispatches to solve_nash_lq for unconstrained LQ utilities.
NashSolution solve_nash(const UtilityModel& u, const InteractionMatrix& g, const Profile& theta,
                        const NashOptions& options = {});

// (1/N) sum_i U(a^i, z^i(a), theta^i).
double average_welfare(const UtilityModel& u, const InteractionMatrix& g, const Profile& a, const Profile& theta);
double average_welfare(const UtilityModel& u, const Graphon& w, const Profile& a, const Profile& theta);

}  // namespace ggames
