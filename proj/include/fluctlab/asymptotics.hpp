#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fluctlab/green.hpp"
#include "fluctlab/ladder.hpp"
#include "fluctlab/report.hpp"
#include "fluctlab/stepdist.hpp"

namespace fluctlab {

// Beta-type boundary integral h_lambda(xi) = lambda int_0^1 t^{lambda-1}
// (xi - 1 + t)^{alpha-lambda-1} dt for 0 < lambda <= 1, xi >= 1, 1 < alpha <= 2.
// Absolute accuracy 1e-10 (tanh-sinh; both endpoint singularities integrable).
double h_lambda(double xi, double lambda, double alpha);

// Conditional overshoot distribution prediction: P_x[Z(R) <= y | Lambda_R]
// tends to 1 - log(1 - (x+1)/(R+y)) / log(1 - (x+1)/R); the x/R -> 0 limit is
// y / (R + y).
double overshoot_cdf_prediction(std::int64_t R, std::int64_t x, std::int64_t y);

// Inputs a formula evaluator may consume. Exact-side probability providers
// are wired by the caller so that expensive solves stay under its control.
struct FormulaInputs {
    const StepDistribution* d = nullptr;
    const LadderData* ld = nullptr;
    LatticeKernels* ker = nullptr;
    std::function<double(std::int64_t)> exact_pup_0;  // P_0(Lambda_R)
    std::function<double(std::int64_t, std::int64_t)> exact_pup_x;  // P_x(Lambda_R)
    std::map<std::string, double> params;  // e.g. {"xfrac", 0.25}
};

// Formula ids: T2-1, T2-1-exit, LaP1, eC1.1, T2-2, T2-3, T2-30, P1.3, Thm1,
// Thm1-vd, L7.1-ua, L7.1-vd, L7.3, U/Z, asymp-g. Applicability tags are
// checked against the builder metadata first; mismatches throw
// applicability_error listing the failures.
std::vector<std::string> formula_catalogue();
ConvergenceReport evaluate_formula(const std::string& id, const FormulaInputs& in,
                                   const std::vector<std::int64_t>& grid);

// alpha*rho read from the builder when known (symmetric stable-type), else
// estimated from the top-decade log-log slope of U_a ("empirical rho" note).
double alpha_rho(const StepDistribution& d, const LadderData& ld, bool ascending,
                 std::string* note);

}  // namespace fluctlab
