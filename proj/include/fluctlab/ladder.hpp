#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fluctlab/report.hpp"
#include "fluctlab/stepdist.hpp"

namespace fluctlab {

struct LadderOptions {
    std::int64_t n = 1 << 17;  // window: arrays are computed on [0, n]
    double tol = 1e-10;        // target truncation budget (met exactly by the
                               // bounded-support engine; the spectral engine
                               // reports its achieved bias model instead)
    int grid_log2 = 22;        // spectral transform size log2
    bool richardson = true;    // second pass at half grid, extrapolated
    int engine = 0;            // 0 auto, 1 polynomial (bounded), 2 spectral
};

// Ladder-height laws and renewal arrays of an oscillating walk.
//   z_pmf[k]    = P[Z = k]         (strict ascending ladder height, k >= 1)
//   zhat_pmf[k] = P[Zhat = -k]     (weak descending ladder height, k >= 0;
//                                   the atom at 0 lives in zhat_pmf[0])
//   u_a, U_a    = renewal sequence/function of Z on [0, n]
//   v_d, V_d    = renewal sequence/function of the weak descending process
//   v0          = v_d(0) = 1 / (1 - P[Zhat = 0])
struct LadderData {
    std::vector<double> z_pmf, zhat_pmf;
    std::vector<double> u_a, U_a, v_d, V_d;
    double v0 = 1.0;
    double z_defect = 0.0, zhat_defect = 0.0;  // mass beyond the window
    double bias_scale = 0.0;  // estimated multiplicative error rate per index:
                              // |u_a(x) relative error| <~ exp(bias_scale*x)-1
    bool defective = false;   // drift detected: one ladder law is defective
    std::string method;       // "wh-poly" or "wh-spectral"

    std::int64_t n() const { return static_cast<std::int64_t>(u_a.size()) - 1; }
    double ua_error_bound(std::int64_t x) const;
    // Green function of the walk killed on (-inf,-1]:
    //   g(x, y) = sum_{k=0}^{min(x,y)} v_d(x-k) u_a(y-k).
    double green_halfline(std::int64_t x, std::int64_t y) const;
};

// Wiener-Hopf ladder computation. Bounded-support inputs use exact polynomial
// factorisation of the step polynomial (roots split by the unit circle);
// parametric-tail inputs use spectral factorisation of log(1 - phi) on a
// shifted FFT grid. Walks with drift are allowed; the defective side is
// flagged and its pmf sums to less than one.
LadderData compute_ladder(const StepDistribution& d, const LadderOptions& opts = {});

// Exchange the roles of the two lattice directions: the ladder data of the
// reflected walk x -> -x, obtained by reindexing (no recomputation).
LadderData mirror(const LadderData& ld);

// ell*(t)  = int_0^t P[Z > s] ds           (lattice step integral)
// hat version: (1/v0) int_0^t P[-Zhat_strict > s] ds = sum_{s<t} P[-Zhat_weak > s].
double ell_star(const LadderData& ld, std::int64_t t);
double hat_ell_star(const LadderData& ld, std::int64_t t);

struct TailIntegral {
    double value = 0.0;
    double remainder_low = 0.0, remainder_high = 0.0;  // bracket for the cut tail
};
// hat ell_sharp(t) = int_t^inf [1-F(s)] / hat ell*(s) ds, integrand frozen
// beyond t_max for the reported remainder bracket.
TailIntegral hat_ell_sharp(const StepDistribution& d, const LadderData& ld, std::int64_t t,
                           std::int64_t t_max);
// Positively-relatively-stable side variant for regularly varying negative
// tails: ell_sharp(t) = alpha int_t^inf s^{alpha-1} F(-s) / ell(s) ds with
// ell(s) = s^alpha ell*(s)-normalisation handled by the caller's alpha.
TailIntegral ell_sharp_prs(const StepDistribution& d, const LadderData& ld, std::int64_t t,
                           std::int64_t t_max, double alpha);

// Renewal-density ratio check for a directly supplied aperiodic pmf q on
// {1,...}: table of u(x) l(x)^2 / q(x) where l(x) = sum_{k>x} q(k) +
// tail_mass_beyond, on a geometric grid up to n.
ConvergenceReport nagaev_check(const std::vector<double>& q_pmf, double tail_mass_beyond,
                               std::int64_t n, const std::vector<std::int64_t>& grid);

}  // namespace fluctlab
