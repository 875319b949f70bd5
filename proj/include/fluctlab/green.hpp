#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluctlab/ladder.hpp"
#include "fluctlab/stepdist.hpp"

namespace fluctlab {

// Serializable snapshot of killed-Green values on a window (CLI / cache).
struct GreenTable {
    std::string killing;  // "interval" (complement of [0,R]) or "halfline"
    std::int64_t R = 0;
    std::int64_t x0 = 0, y0 = 0;  // window offsets
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> upper;  // bracket top when bracketed
    std::string method;                      // linear-solve | spitzer | bracket
    double truncation_error = 0.0;
    double residual = 0.0;
};

// Green function of the walk killed outside [0, R]: rows and columns of
// (I - Q)^{-1} with Q[x][y] = p(y - x). Dense LU up to dense_limit, otherwise
// a Toeplitz matrix-free BiCGstab with verified residuals (suitable for
// transient-side inputs where the killed mass escapes quickly).
class IntervalGreen {
  public:
    IntervalGreen(const StepDistribution& d, std::int64_t R, std::int64_t dense_limit = 4096);
    ~IntervalGreen();
    IntervalGreen(IntervalGreen&&) noexcept;

    std::int64_t R() const { return R_; }
    double max_residual() const { return residual_; }
    // g_{B(R)}(x, y) for one pair (solves and caches the column y)
    double value(std::int64_t x, std::int64_t y);
    // full row x (expected visits to every y starting from x)
    const std::vector<double>& row(std::int64_t x);
    // P_x(exit [0,R] upward before entering (-inf,-1]) for all x in [0, R]
    const std::vector<double>& exit_up();
    // sup-norm residual of the full inverse against the identity (dense only)
    double full_table_residual();
    const std::vector<std::vector<double>>& full_table();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::int64_t R_;
    double residual_ = 0.0;
};

struct HalflineBracket {
    std::int64_t window = 0;       // truncation level W
    std::vector<std::vector<double>> lower, upper;  // on [0, sub]^2
    double max_width = 0.0;
};
// Two-sided bracket for g_{Omega}(x, y), Omega = (-inf, -1], from the killed
// interval [0, W]: lower kills above W; upper adds escape_mass * sup-visits.
HalflineBracket green_halfline_solve(const StepDistribution& d, std::int64_t W, std::int64_t sub,
                                     std::int64_t dense_limit = 4096);

struct KernelValue {
    double value = 0.0;
    double bound = 0.0;  // reported numeric bound for the stated method
};

// Shared characteristic-function machinery for the lattice kernels
//   a(x) = sum_n [P(S_n = 0) - P(S_n = -x)]   (recurrent)
//   G(x) = sum_n P(S_n = x)                   (transient)
// computed by adaptive quadrature of (1 - e^{-ix theta})/(1 - phi) resp.
// e^{-ix theta}/(1 - phi) with the theta -> 0 endpoint handled by a fitted
// local model of 1 - phi. Node values of phi are shared across a batch.
class LatticeKernels {
  public:
    explicit LatticeKernels(const StepDistribution& d);
    ~LatticeKernels();
    KernelValue potential(std::int64_t x);       // a(x), any sign of x
    KernelValue green(std::int64_t x);           // G(x), transient inputs
    std::complex<double> one_minus_phi(double theta) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<KernelValue> potential_series_batch(const StepDistribution& d,
                                                const std::vector<std::int64_t>& xs);

// Abel-summed convolution-power route for a(x): sum_n r^n [P(S_n=0)-P(S_n=-x)]
// evaluated in closed Fourier form on a lattice grid for several r, then
// extrapolated r -> 1. Independent of the quadrature path; returns the value
// and a self-reported extrapolation bound.
KernelValue potential_series(const StepDistribution& d, std::int64_t x, int fft_log2 = 16);

struct LaddIdentityReport {
    std::vector<std::int64_t> grid;
    std::vector<double> residual_ladd;  // E_x a(S_tau) - [a(x) - V_d(x-1)/(v0 EZ)]
    std::vector<double> residual_gg;    // g_{(-inf,0]}(x,y) vs a-combination
    double ez = 0.0;
    bool ez_finite = true;
    std::string note;
};
// First-entrance identities for the walk killed on (-inf, 0] (note the weak
// half-line; the Omega = (-inf,-1] table is the same object shifted by one).
// The hitting measure of (-inf, 0] from x >= 1 is exact in ladder terms:
//   P_x[S_tau = -w] = sum_{j=0}^{x-1} v_d(j) zhat_pmf[x - j + w],
// so the residuals test the ladder arrays and the potential kernel jointly.
LaddIdentityReport check_ladd_identity(const StepDistribution& d, const LadderData& ld,
                                       LatticeKernels& ker,
                                       const std::vector<std::int64_t>& x_grid,
                                       std::int64_t y_probe);

}  // namespace fluctlab
