#include <cmath>

#include "doctest.h"
#include "fluctlab/asymptotics.hpp"
#include "fluctlab/exit.hpp"
#include "fluctlab/util.hpp"

using namespace fluctlab;

TEST_CASE("h_lambda: closed-form checks") {
    // lambda = alpha - 1 makes h identically one
    for (double xi : {1.0, 2.0, 10.0})
        CHECK(std::abs(h_lambda(xi, 0.5, 1.5) - 1.0) < 1e-10);
    // h_lambda(1) = lambda / (alpha - 1)
    CHECK(std::abs(h_lambda(1.0, 0.75, 1.5) - 1.5) < 1e-10);
    CHECK(std::abs(h_lambda(1.0, 0.3, 1.8) - 0.375) < 1e-10);
    // tail exponent: h_lambda(xi) xi^{lambda+1-alpha} -> 1
    double xi = 1e4;
    CHECK(h_lambda(xi, 0.75, 1.5) * std::pow(xi, 0.75 + 1.0 - 1.5) ==
          doctest::Approx(1.0).epsilon(2e-4));
    // xi^{1-(alpha-lambda)} h_lambda(xi) decreases to 1 when alpha - lambda < 1
    double prev = 1e300;
    for (double z : {1.0, 2.0, 4.0, 8.0, 64.0}) {
        double v = std::pow(z, 1.0 - (1.75 - 0.9)) * h_lambda(z, 0.9, 1.75);
        CHECK(v < prev + 1e-12);
        CHECK(v >= 1.0 - 1e-9);
        prev = v;
    }
}

TEST_CASE("overshoot cdf prediction endpoints") {
    CHECK(overshoot_cdf_prediction(1000, 0, 1000000000) == doctest::Approx(1.0).epsilon(1e-4));
    // x/R -> 0 limit is y/(R+y)
    CHECK(overshoot_cdf_prediction(100000, 0, 50000) ==
          doctest::Approx(50000.0 / 150000.0).epsilon(1e-3));
    // finite at x = R/2, y = R
    double v = overshoot_cdf_prediction(1000, 500, 1000);
    CHECK(std::isfinite(v));
    CHECK(v > 0);
    CHECK(v < 1);
}

TEST_CASE("applicability gates") {
    auto s = srw();
    FormulaInputs in;
    in.d = &s;
    auto ld = compute_ladder(s, {.n = 64});
    in.ld = &ld;
    CHECK_THROWS_AS(evaluate_formula("T2-1", in, {10, 100}), applicability_error&);
    auto dz = zipf_pair(0.7, 0.3);  // positively relatively stable side
    FormulaInputs in2;
    in2.d = &dz;
    auto lz = compute_ladder(dz, {.n = 256, .grid_log2 = 18});
    in2.ld = &lz;
    CHECK_THROWS_AS(evaluate_formula("T2-1", in2, {10, 100}), applicability_error&);
    CHECK_THROWS_AS(evaluate_formula("no-such-formula", in2, {10}), error&);
}

TEST_CASE("T2-1 ratio for zipf converges into a tight band") {
    auto d = zipf_pair(0.3, 0.7);
    auto ld = compute_ladder(d, {.n = 1 << 14, .grid_log2 = 20});
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    std::vector<std::int64_t> grid;
    for (double x = 16; x <= (1 << 14); x *= 1.5) grid.push_back(static_cast<std::int64_t>(x));
    auto rep = evaluate_formula("T2-1", in, grid);
    CHECK(rep.ratio.back() > 0.5);
    CHECK(rep.ratio.back() < 2.0);
    CHECK(rep.verdict == "converging");
}

TEST_CASE("exit-probability formulas collapse algebraically at x = 0") {
    auto d = zipf_pair(0.3, 0.7);
    auto ld = compute_ladder(d, {.n = 4096, .grid_log2 = 19});
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    in.exact_pup_0 = [&](std::int64_t R) { return exit_upward(d, R).p_up[0]; };
    in.exact_pup_x = [&](std::int64_t x, std::int64_t R) {
        return exit_upward(d, R).p_up[static_cast<std::size_t>(x)];
    };
    in.params["xfrac"] = 0.0;
    std::vector<std::int64_t> grid = {50, 100, 200};
    auto a = evaluate_formula("T2-1-exit", in, grid);
    auto b = evaluate_formula("eC1.1", in, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // eC1.1 at x=0 equals v0 * (T2-1-exit prediction)
        CHECK(b.predicted[i] == doctest::Approx(ld.v0 * a.predicted[i]).epsilon(1e-12));
        CHECK(b.exact[i] == doctest::Approx(ld.v0 * a.exact[i]).epsilon(1e-12));
    }
}

TEST_CASE("LaP1 lower bound holds on exact solves") {
    auto d = zipf_pair(0.3, 0.7);
    auto ld = compute_ladder(d, {.n = 4096, .grid_log2 = 19});
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    in.exact_pup_0 = [&](std::int64_t R) { return exit_upward(d, R).p_up[0]; };
    auto rep = evaluate_formula("LaP1", in, {100, 200, 400, 800});
    for (std::size_t i = 0; i < rep.ratio.size(); ++i) CHECK(rep.ratio[i] >= 1.0 - 1e-9);
}

TEST_CASE("stable ladder index formulas") {
    auto d = stable_like(1.5, 0.5, 0.5);
    auto ld = compute_ladder(d, {.n = 1 << 14, .grid_log2 = 20});
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    std::vector<std::int64_t> grid;
    for (double x = 16; x <= (1 << 14); x *= 2) grid.push_back(static_cast<std::int64_t>(x));
    auto ru = evaluate_formula("L7.1-ua", in, grid);
    CHECK(std::abs(ru.ratio.back() - 1.0) < 0.05);  // x u_a/U_a vs alpha rho = 0.75
    auto rv = evaluate_formula("L7.1-vd", in, grid);
    CHECK(std::abs(rv.ratio.back() - 1.0) < 0.05);

    // renewal/overshoot constant: 1/(Gamma(1.75) Gamma(1.25))
    auto uz = evaluate_formula("U/Z", in, grid);
    double target = 1.0 / (std::tgamma(1.75) * std::tgamma(1.25));
    CHECK(uz.predicted.back() == doctest::Approx(target).epsilon(1e-12));
    CHECK(std::abs(uz.ratio.back() - 1.0) < 0.08);

    // g_Omega against the h_lambda form at y = 2x
    std::vector<std::int64_t> half_grid(grid.begin(), grid.end() - 1);
    auto ag = evaluate_formula("asymp-g", in, half_grid);
    CHECK(std::abs(ag.ratio.back() - 1.0) < 0.05);

    // L7.3 endpoint at x/R = 1e-3: (alpha-1)/(alpha rho-hat) = 2/3
    auto l73 = evaluate_formula("L7.3", in, {1 << 14});
    CHECK(l73.predicted.back() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(l73.exact.back() - 2.0 / 3.0) < 0.07);
}

TEST_CASE("U/Z at the srw edge: constant is 1 and the ratio approaches it") {
    auto s = srw();
    auto ld = compute_ladder(s, {.n = 4096});
    FormulaInputs in;
    in.d = &s;
    in.ld = &ld;
    auto rep = evaluate_formula("U/Z", in, {16, 64, 256, 1024, 4096});
    CHECK(rep.predicted.back() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.ratio.back() == doctest::Approx(1.0).epsilon(1e-3));
    // drifted walk is flagged inapplicable
    auto drift = finite({{-1, 0.2}, {1, 0.8}});
    auto ldd = compute_ladder(drift, {.n = 128});
    FormulaInputs in2;
    in2.d = &drift;
    in2.ld = &ldd;
    CHECK_THROWS_AS(evaluate_formula("U/Z", in2, {16, 64}), applicability_error&);
}

TEST_CASE("Thm1 id requires the positively stable recurrent side") {
    auto d = log_regular(0.3, 0.7);  // heavier negative tail, EX=0: prs side
    CHECK(d.tags().rs_class == +1);
    auto ld = compute_ladder(d, {.n = 2048, .grid_log2 = 19});
    LatticeKernels ker(d);
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    in.ker = &ker;
    auto rep = evaluate_formula("Thm1", in, {32, 128, 512, 2048});
    CHECK(rep.applicable);
    for (double r : rep.ratio) CHECK(std::isfinite(r));
    // the nrs-side mirror is rejected
    auto m = log_regular(0.7, 0.3);
    auto lm = compute_ladder(m, {.n = 256, .grid_log2 = 18});
    FormulaInputs in2;
    in2.d = &m;
    in2.ld = &lm;
    in2.ker = &ker;
    CHECK_THROWS_AS(evaluate_formula("Thm1", in2, {32, 128}), applicability_error&);
}

TEST_CASE("deterministic evaluation: identical reports on repeat") {
    auto d = stable_like(1.5, 0.5, 0.5);
    auto ld = compute_ladder(d, {.n = 2048, .grid_log2 = 19});
    FormulaInputs in;
    in.d = &d;
    in.ld = &ld;
    auto a = evaluate_formula("L7.1-ua", in, {64, 256, 1024});
    auto b = evaluate_formula("L7.1-ua", in, {64, 256, 1024});
    for (std::size_t i = 0; i < a.ratio.size(); ++i) CHECK(a.ratio[i] == b.ratio[i]);
    CHECK(a.verdict == b.verdict);
}
