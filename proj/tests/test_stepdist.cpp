#include <cmath>
#include <complex>
#include <map>

#include "doctest.h"
#include "fluctlab/stepdist.hpp"
#include "fluctlab/termsum.hpp"
#include "fluctlab/util.hpp"

using namespace fluctlab;

namespace {

StepDistribution finite_asym_test() {
    // mean-zero asymmetric bounded table: (-6 - 6 + 8 + 4) / 20 = 0
    return finite_rational({{-3, {1, 10}}, {-1, {3, 10}}, {0, {1, 10}}, {1, {2, 5}}, {2, {1, 10}}});
}

}  // namespace

TEST_CASE("em_tail_sum reproduces zeta values") {
    CHECK(em_tail_sum(TermSum::power(1.0, 2.0), 1) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-14));
    CHECK(em_tail_sum(TermSum::power(1.0, 1.5), 1) ==
          doctest::Approx(2.612375348685488).epsilon(1e-13));
    // shifted start: zeta(2, 10) = pi^2/6 - sum_{1..9}
    double head = 0;
    for (int k = 1; k <= 9; ++k) head += 1.0 / (k * k);
    CHECK(em_tail_sum(TermSum::power(1.0, 2.0), 10) ==
          doctest::Approx(M_PI * M_PI / 6 - head).epsilon(1e-13));
}

TEST_CASE("oscillatory_tail_sum matches direct summation") {
    TermSum f = TermSum::power(1.0, 2.0);
    for (double theta : {0.3, 1e-3, 2e-5}) {
        std::complex<double> direct(0, 0);
        const std::complex<double> I(0, 1);
        std::complex<double> rot = std::exp(I * (2.0 * theta));
        std::complex<double> step = std::exp(I * theta);
        const long long N = 30000000;
        for (long long x = 2; x < N; ++x) {
            direct += rot / double(x * x);
            rot *= step;
        }
        auto got = oscillatory_tail_sum(f, 2, theta);
        CHECK(std::abs(got - direct) < 1e-8);
    }
}

TEST_CASE("srw point masses and tails") {
    auto d = srw();
    CHECK(d.pmf(1) == 0.5);
    CHECK(d.pmf(2) == 0.0);
    CHECK(d.tail_plus(0) == 0.5);
    CHECK(d.H(1) == 0.0);
    CHECK(d.truncated_mean_A(5) == 0.0);
    CHECK(d.mass_check() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.has_rational_table());
}

TEST_CASE("zipf_pair pmf equals closed-form tail difference") {
    auto d = zipf_pair(0.3, 0.7);
    CHECK(d.pmf(10) == doctest::Approx(0.3 * (1.0 / 9 - 1.0 / 10)).epsilon(1e-15));
    CHECK(d.pmf(-10) == doctest::Approx(0.7 * (1.0 / 9 - 1.0 / 10)).epsilon(1e-15));
    CHECK(d.mass_check() == doctest::Approx(1.0).epsilon(1e-15));
    // tail ratio converges to q/p = 7/3
    CHECK(d.tail_minus(100000) / d.tail_plus(100000) == doctest::Approx(7.0 / 3.0).epsilon(1e-4));
    // partial sums of pmf against the closed-form tails
    double acc = 0.0;
    for (int k = 51; k <= 50 + 10000; ++k) acc += d.pmf(k);
    CHECK(acc == doctest::Approx(d.tail_plus(50) - d.tail_plus(50 + 10000)).epsilon(1e-12));
}

TEST_CASE("A(x) matches the harmonic closed form for zipf_pair") {
    // A(x) = sum_{k<x} [P(X>k) - P(X<-k)] = (p-q)(1 + H_{x-1}) for tails p/x, q/x
    auto d = zipf_pair(0.3, 0.7);
    for (int x : {1, 10, 100, 1000}) {
        double harmonic = 0.0;
        for (int k = 1; k < x; ++k) harmonic += 1.0 / k;
        CHECK(d.truncated_mean_A(x) == doctest::Approx(-0.4 * (1.0 + harmonic)).epsilon(1e-13));
    }
    // incremental vs from-scratch
    auto table = d.A_table(1000);
    double fresh = 0.0;
    for (int k = 0; k < 1000; ++k) fresh += d.tail_plus(k) - d.tail_minus(k + 1);
    CHECK(table[1000] == doctest::Approx(fresh).epsilon(1e-13));
    // lazy_srw has an atom at 0; symmetry must still give A == 0 exactly
    CHECK(lazy_srw(0.4).truncated_mean_A(7) == 0.0);
}

TEST_CASE("symmetric builders have exactly symmetric pmf and zero A") {
    auto d = stable_like(1.5, 0.5, 0.5);
    for (int x : {1, 2, 3, 10, 1000}) CHECK(d.pmf(x) == d.pmf(-x));
    CHECK(d.truncated_mean_A(100) == 0.0);
    CHECK(d.mass_check() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("mean-corrected builders have first moment zero") {
    for (auto d : {stable_like(1.5, 0.3, 0.6), stable_like(1.2, 0.7, 0.2),
                   log_regular(0.3, 0.7), log_regular(0.7, 0.3)}) {
        CHECK(d.mass_check() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(std::abs(d.mean()) < 1e-12);
    }
}

TEST_CASE("finite asymmetric test distribution is mean zero") {
    auto d = finite_asym_test();
    CHECK(std::abs(d.mean()) < 1e-15);
    CHECK(!d.tags().symmetric);
    CHECK(d.has_rational_table());
    CHECK(d.support_min() == -3);
    CHECK(d.support_max() == 2);
}

TEST_CASE("char_fn: srw is cos(theta), heavy tails match brute force") {
    auto s = srw();
    for (double th : {0.1, 1.0, 3.0}) {
        auto v = s.char_fn(th);
        CHECK(v.real() == doctest::Approx(std::cos(th)).epsilon(1e-14));
        CHECK(std::abs(v.imag()) < 1e-14);
    }
    auto d = zipf_pair(0.3, 0.7);
    for (double th : {0.7, 1e-2, 1e-4}) {
        std::complex<double> direct(0, 0);
        const std::complex<double> I(0, 1);
        for (long long x = -2000000; x <= 2000000; ++x) {
            double p = d.pmf(x);
            if (p > 0) direct += p * std::exp(I * (double(x) * th));
        }
        // truncation of the direct sum leaves ~ T(2e6) mass unaccounted
        CHECK(std::abs(d.char_fn(th) - direct) < 1e-6);
        CHECK(std::abs(d.char_fn(th)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("rs_diagnostic verdicts") {
    std::vector<std::int64_t> grid = {100, 1000, 10000, 100000};
    auto r = rs_diagnostic(zipf_pair(0.3, 0.7), grid);
    CHECK(r.verdict == "nrs-trend");
    for (std::size_t i = 1; i < r.ratio.size(); ++i) CHECK(r.ratio[i] < r.ratio[i - 1]);
    CHECK(rs_diagnostic(zipf_pair(0.7, 0.3), grid).verdict == "prs-trend");
    CHECK(rs_diagnostic(srw(), grid).verdict == "degenerate");
}

TEST_CASE("recurrence_diagnostic verdicts") {
    CHECK(recurrence_diagnostic(zipf_pair(0.3, 0.7), 100000).verdict == "transient-trend");
    CHECK(recurrence_diagnostic(srw(), 10000).verdict == "recurrent-trend");
    CHECK(recurrence_diagnostic(log_regular(0.3, 0.7), 100000).verdict == "recurrent-trend");
    CHECK(recurrence_diagnostic(stable_like(1.5, 0.5, 0.5), 100000).verdict == "recurrent-trend");
}

TEST_CASE("sampling: determinism and agreement with exact pmf") {
    auto d = zipf_pair(0.3, 0.7);
    Rng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(d.sample(a) == d.sample(b));

    // empirical frequencies within 5 sigma binomial bands
    const int n = 1000000;
    Rng r(123, 0);
    std::map<std::int64_t, int> counts;
    int tail100 = 0;
    double mean_acc = 0;
    for (int i = 0; i < n; ++i) {
        auto x = d.sample(r);
        if (x >= -10 && x <= 10) counts[x]++;
        if (x > 100) tail100++;
        mean_acc += (x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0));
    }
    for (auto x : {std::int64_t(0), std::int64_t(2), std::int64_t(-2), std::int64_t(5),
                   std::int64_t(-5), std::int64_t(10)}) {
        double p = d.pmf(x);
        if (p < 1e-5) continue;
        double sd = std::sqrt(p * (1 - p) * n);
        CHECK(std::abs(counts[x] - p * n) < 5 * sd + 1);
    }
    double pt = d.tail_plus(100);
    double sd = std::sqrt(pt * (1 - pt) * n);
    CHECK(std::abs(tail100 - pt * n) < 5 * sd + 1);
    // sign bias matches p - q
    CHECK(mean_acc / n == doctest::Approx(0.3 - 0.7).epsilon(0.01));
}

TEST_CASE("srw sample mean over 1e6 draws is near zero") {
    auto d = srw();
    Rng r(7, 0);
    double acc = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) acc += static_cast<double>(d.sample(r));
    CHECK(std::abs(acc / n) < 3e-3);
}

TEST_CASE("dist spec parsing round trip") {
    auto d = parse_dist_spec("family=zipf_pair p=0.3 q=0.7");
    CHECK(d.tags().family == "zipf_pair");
    CHECK(d.pmf(10) == doctest::Approx(0.3 / 90.0));
    auto f = parse_dist_spec("# comment\n[dist]\nfamily = finite\natoms={-1:1/2,1:1/2}");
    CHECK(f.pmf(-1) == 0.5);
    auto s = parse_dist_spec(zipf_pair(0.25, 0.5).spec_string());
    CHECK(s.pmf(3) == zipf_pair(0.25, 0.5).pmf(3));
    CHECK_THROWS_AS(parse_dist_spec("family=unknown"), error&);
}
