#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace fluctlab {

// Linear combination of terms c * x^(-beta) * (x+e)^(-gamma) * log(x+e)^(-m).
// Closed under d/dx, which is all the Euler-Maclaurin and integration-by-parts
// machinery below needs. Used for the parametric tail functions T(x).
struct TermSum {
    struct Term {
        double c;
        double beta;
        double gamma;
        int m;  // log exponent (log(x+e))^(-m), m >= 0
    };
    std::vector<Term> terms;

    static TermSum power(double c, double beta) { return TermSum{{{c, beta, 0.0, 0}}}; }
    static TermSum power_log(double c, double beta, int m) { return TermSum{{{c, beta, 0.0, m}}}; }

    double eval(double x) const {
        double s = 0.0;
        for (const Term& t : terms) {
            double v = t.c;
            if (t.beta != 0.0) v *= std::pow(x, -t.beta);
            if (t.gamma != 0.0) v *= std::pow(x + M_E, -t.gamma);
            if (t.m != 0) v *= std::pow(std::log(x + M_E), -t.m);
            s += v;
        }
        return s;
    }

    TermSum derivative() const {
        TermSum d;
        for (const Term& t : terms) {
            if (t.beta != 0.0) d.terms.push_back({-t.c * t.beta, t.beta + 1.0, t.gamma, t.m});
            if (t.gamma != 0.0) d.terms.push_back({-t.c * t.gamma, t.beta, t.gamma + 1.0, t.m});
            if (t.m != 0) d.terms.push_back({-t.c * t.m, t.beta, t.gamma + 1.0, t.m + 1});
        }
        return d;
    }
};

// Derivatives f, f', ..., f^(n) with merged identical exponent triples.
std::vector<TermSum> derivative_chain(const TermSum& f, int n);

// sum_{x=a}^inf f(x) for a smooth decaying term sum, via direct summation up
// to a shifted start plus Euler-Maclaurin correction. Integral part is
// evaluated by Gauss-Legendre on geometric panels in log x.
double em_tail_sum(const TermSum& f, std::int64_t a, double rel_tol = 1e-13);

// sum_{x=a}^inf f(x) e^{i x theta} for theta != 0, |theta| <= pi: direct part
// up to x0, then repeated integration by parts on the remainder (moderate
// theta), or Euler-Maclaurin with oscillation-resolved panels (tiny theta).
// The chain overload reuses precomputed derivatives across many calls.
std::complex<double> oscillatory_tail_sum(const TermSum& f, std::int64_t a, double theta,
                                          std::int64_t max_direct = 200000);
std::complex<double> oscillatory_tail_sum(const std::vector<TermSum>& chain, std::int64_t a,
                                          double theta, std::int64_t max_direct = 200000);

}  // namespace fluctlab
