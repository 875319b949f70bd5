#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluctlab/green.hpp"
#include "fluctlab/ladder.hpp"
#include "fluctlab/stepdist.hpp"

namespace fluctlab {

struct ExitSolution {
    std::int64_t R = 0;
    std::vector<double> p_up;  // P_x(exit [0,R] upward before entering (-inf,-1])
    std::string method;
    double residual = 0.0;
};

// Exact exit probabilities from the killed interval: solve (I - Q) h = r with
// r(x) = P[X > R - x].
ExitSolution exit_upward(const StepDistribution& d, std::int64_t R,
                         std::int64_t dense_limit = 4096);

// P_x[sigma_y < T] = g(x, y) / g(y, y) from the half-line Green function.
double hit_before(const LadderData& ld, std::int64_t x, std::int64_t y);

// Absorbing-chain route for the same event: augment the killing set with the
// single point R, read the absorption split from a window [0, W]; the escape
// mass above W brackets the answer. Returns [low, high].
std::pair<double, double> hit_before_absorbing(const StepDistribution& d, std::int64_t x,
                                               std::int64_t R, std::int64_t W,
                                               std::int64_t dense_limit = 4096);

// Exit-position law q_R(x, y) = g_{B(R)}(x, y) P[X > R-y] / P_x(Lambda_R).
std::vector<double> exit_position(const StepDistribution& d, IntervalGreen& ig, std::int64_t x);

struct OvershootLaw {
    std::vector<double> pmf;  // P[Z(R) = z | Lambda_R], index z >= 1
    double tail_bound = 0.0;  // conditional mass beyond the enumerated range
};
// Overshoot law over the upper boundary given upward exit; z enumerated until
// the conditional tail bound drops below tail_tol (or the support ends).
OvershootLaw overshoot_law(const StepDistribution& d, IntervalGreen& ig, std::int64_t x,
                           double tail_tol = 1e-12);

// Conditioned (Doob V_d-transform) walk: P^Omega_x[sigma_y < inf]
//   = V_d(y)/V_d(x) * P_x[sigma_y < T].
double conditioned_hit(const LadderData& ld, std::int64_t x, std::int64_t y);

// Residual of the first-passage decomposition
//   g_Omega(x,y) = g_{B(R)}(x,y) + E_x[g_Omega(S_{sigma(R,inf)}, y); Lambda_R]
// with the overshoot positions enumerated up to the ladder window and the
// remainder bounded through the overshoot tail. Returns residual and bound.
std::pair<double, double> idn_g_residual(const StepDistribution& d, const LadderData& ld,
                                         IntervalGreen& ig, std::int64_t x, std::int64_t y);

// ---------------------------------------------------------------------------
// Monte Carlo

enum class McWhat {
    p_up,           // exits [0,R] upward
    p_hit,          // visits the point R before entering (-inf,-1]
    overshoot_cdf,  // P[Z(R) <= y | Lambda_R]
    exit_pos_low,   // P[S_{N(R)} <= y | Lambda_R]
};

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    std::int64_t n_conditioning = 0;  // paths satisfying Lambda_R for ratio estimands
    std::uint64_t seed = 0;
    std::string layout;
    std::int64_t cap_hits = 0;  // paths that hit the step cap (must be 0 in accepted runs)
};

struct McOptions {
    std::int64_t step_cap = 10000000;
    int threads = 1;
};

// Unbiased path estimator. Stream i is derived from (seed, i); results are
// invariant under the worker count (integer counters, fixed chunk order).
McEstimate mc_exit(const StepDistribution& d, std::int64_t R, std::int64_t x,
                   std::int64_t n_paths, std::uint64_t seed, McWhat what, std::int64_t y = 0,
                   const McOptions& opts = {});

// Direct simulation of the V_d-transformed chain (bounded-support steps):
// estimates P^Omega_x[hit y within the step cap]; unresolved paths are
// reported in cap_hits.
McEstimate mc_conditioned_hit(const StepDistribution& d, const LadderData& ld, std::int64_t x,
                              std::int64_t y, std::int64_t n_paths, std::uint64_t seed,
                              const McOptions& opts = {});

}  // namespace fluctlab
