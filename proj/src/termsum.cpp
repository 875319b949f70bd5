#include "fluctlab/termsum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fluctlab {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const double kGLx[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
const double kGLw[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

TermSum canonicalize(TermSum f) {
    auto key_less = [](const TermSum::Term& a, const TermSum::Term& b) {
        if (a.beta != b.beta) return a.beta < b.beta;
        if (a.gamma != b.gamma) return a.gamma < b.gamma;
        return a.m < b.m;
    };
    std::sort(f.terms.begin(), f.terms.end(), key_less);
    TermSum out;
    for (const auto& t : f.terms) {
        if (!out.terms.empty()) {
            auto& b = out.terms.back();
            if (b.beta == t.beta && b.gamma == t.gamma && b.m == t.m) {
                b.c += t.c;
                continue;
            }
        }
        out.terms.push_back(t);
    }
    return out;
}

}  // namespace

std::vector<TermSum> derivative_chain(const TermSum& f, int n) {
    std::vector<TermSum> d;
    d.reserve(n + 1);
    d.push_back(canonicalize(f));
    for (int k = 1; k <= n; ++k) d.push_back(canonicalize(d.back().derivative()));
    return d;
}

namespace {

// Upper bound on the exponentially decaying part of int_{e^u}^inf f dx in
// u-space (terms with beta+gamma > 1). Terms with beta+gamma == 1 decay only
// polynomially in u and get an exact closed-form tail instead; they must have
// m >= 2 to be integrable at all.
double ulog_exp_tail_bound(const TermSum& f, double u) {
    double b = 0.0;
    for (const auto& t : f.terms) {
        const double s = t.beta + t.gamma - 1.0;
        if (std::abs(s) <= 1e-12) {
            if (t.m < 2) throw std::domain_error("termsum: non-integrable tail");
            continue;
        }
        if (s < 0) throw std::domain_error("termsum: non-integrable tail");
        const double lgw = t.m != 0 ? std::pow(u, -t.m) : 1.0;
        double lg = -s * u;
        b += (lg < -745.0) ? 0.0 : std::abs(t.c) * std::exp(lg) * lgw * (1.0 / s + 1.0);
    }
    return b;
}

// Exact tail of the log-only terms (beta+gamma == 1): up to O(e^{-u}),
// int_u^inf (v + log1p(e e^{-v}))^{-m} dv = u^{1-m}/(m-1).
double ulog_flat_tail(const TermSum& f, double u) {
    double v = 0.0;
    for (const auto& t : f.terms) {
        const double s = t.beta + t.gamma - 1.0;
        if (std::abs(s) <= 1e-12) v += t.c * std::pow(u, 1 - t.m) / (t.m - 1);
    }
    return v;
}

// Integrand of int f(x) dx after the substitution u = log x: f(e^u) e^u,
// evaluated without overflow for huge u.
double eval_ulog_times_x(const TermSum& f, double u) {
    double s = 0.0;
    const double ee = std::exp(-u) * M_E;  // e / x
    for (const auto& t : f.terms) {
        double lg = (1.0 - t.beta - t.gamma) * u - t.gamma * std::log1p(ee);
        if (lg < -745.0) continue;
        double v = t.c * std::exp(lg);
        if (t.m != 0) v *= std::pow(u + std::log1p(ee), -t.m);
        s += v;
    }
    return s;
}

// int_{x0}^inf f(x) dx via geometric panels in u = log x, plus the exact
// polynomial-in-u tail of any log-only terms.
double integral_from(const TermSum& f, double x0, double rel_tol) {
    double u = std::log(x0);
    double acc = 0.0;
    double width = 0.25;
    for (int panel = 0; panel < 4000; ++panel) {
        double lo = u, hi = u + width;
        double s = 0.0;
        for (int i = 0; i < 16; ++i) {
            double ui = 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGLx[i];
            s += kGLw[i] * eval_ulog_times_x(f, ui);
        }
        acc += s * 0.5 * (hi - lo);
        u = hi;
        width = std::min(width * 2.0, 8.0);
        if (u >= 64.0) {
            double rem = ulog_exp_tail_bound(f, u);
            if (rem <= rel_tol * std::max(std::abs(acc), 1e-300))
                return acc + ulog_flat_tail(f, u);
        }
    }
    return acc + ulog_flat_tail(f, u);
}

}  // namespace

double em_tail_sum(const TermSum& f, std::int64_t a, double rel_tol) {
    const std::int64_t A = std::max<std::int64_t>(a, 256);
    double direct = 0.0;
    for (std::int64_t x = a; x < A; ++x) direct += f.eval(static_cast<double>(x));
    auto d = derivative_chain(f, 5);
    const double xA = static_cast<double>(A);
    double em = integral_from(f, xA, rel_tol);
    em += 0.5 * d[0].eval(xA);
    em -= d[1].eval(xA) / 12.0;
    em += d[3].eval(xA) / 720.0;
    em -= d[5].eval(xA) / 30240.0;
    return direct + em;
}

std::complex<double> oscillatory_tail_sum(const TermSum& f, std::int64_t a, double theta,
                                          std::int64_t max_direct) {
    return oscillatory_tail_sum(derivative_chain(f, 12), a, theta, max_direct);
}

std::complex<double> oscillatory_tail_sum(const std::vector<TermSum>& d, std::int64_t a,
                                          double theta, std::int64_t max_direct) {
    if (d.size() < 13) throw std::invalid_argument("oscillatory_tail_sum: chain depth >= 12");
    if (theta == 0.0) return {em_tail_sum(d[0], a), 0.0};
    const double at = std::abs(theta);
    const std::complex<double> I(0.0, 1.0);

    // Integration-by-parts series for int_{x0}^inf f e^{i x theta} dx.
    auto ibp_integral = [&](double x0) {
        std::complex<double> s(0.0, 0.0);
        std::complex<double> inv = 1.0 / (I * theta);
        std::complex<double> fac = -inv;
        for (int k = 0; k <= 11; ++k) {
            s += fac * d[k].eval(x0);
            fac *= -inv;
        }
        return s * std::exp(I * (x0 * theta));
    };

    const double x_ibp = 40.0 / at;
    if (x_ibp <= static_cast<double>(a) + static_cast<double>(max_direct)) {
        // Moderate theta: direct sum up to x0, then IBP on the Euler-Maclaurin
        // completion of the remaining sum.
        std::int64_t x0 = std::max<std::int64_t>(a, static_cast<std::int64_t>(std::ceil(x_ibp)));
        std::complex<double> s(0.0, 0.0);
        std::complex<double> rot = std::exp(I * (static_cast<double>(a) * theta));
        const std::complex<double> step = std::exp(I * theta);
        for (std::int64_t x = a; x < x0; ++x) {
            s += d[0].eval(static_cast<double>(x)) * rot;
            rot *= step;
        }
        // sum_{x>=x0} g(x) = int + g/2 - g'/12 + g'''/720 - g^(5)/30240, g = f e^{ix theta}
        const double xs = static_cast<double>(x0);
        std::complex<double> em = ibp_integral(xs);
        auto g_deriv = [&](int order) {
            // (d/dx)^order [f e^{ix theta}] = e^{ix theta} sum_j C(order,j) (i theta)^j f^(order-j)
            std::complex<double> acc(0.0, 0.0);
            double binom = 1.0;
            std::complex<double> pw(1.0, 0.0);
            for (int j = 0; j <= order; ++j) {
                acc += binom * pw * d[order - j].eval(xs);
                binom = binom * (order - j) / (j + 1);
                pw *= I * theta;
            }
            return acc * std::exp(I * (xs * theta));
        };
        em += 0.5 * g_deriv(0);
        em -= g_deriv(1) / 12.0;
        em += g_deriv(3) / 720.0;
        em -= g_deriv(5) / 30240.0;
        return s + em;
    }

    // Tiny theta: short direct sum, Euler-Maclaurin boundary terms, then the
    // integral by geometric panels (period-capped) up to the IBP switchover.
    const std::int64_t A = a + 256;
    std::complex<double> s(0.0, 0.0);
    {
        std::complex<double> rot = std::exp(I * (static_cast<double>(a) * theta));
        const std::complex<double> step = std::exp(I * theta);
        for (std::int64_t x = a; x < A; ++x) {
            s += d[0].eval(static_cast<double>(x)) * rot;
            rot *= step;
        }
    }
    const double xA = static_cast<double>(A);
    auto g_deriv_at = [&](int order, double x) {
        std::complex<double> acc(0.0, 0.0);
        double binom = 1.0;
        std::complex<double> pw(1.0, 0.0);
        for (int j = 0; j <= order; ++j) {
            acc += binom * pw * d[order - j].eval(x);
            binom = binom * (order - j) / (j + 1);
            pw *= I * theta;
        }
        return acc * std::exp(I * (x * theta));
    };
    std::complex<double> em = 0.5 * g_deriv_at(0, xA);
    em -= g_deriv_at(1, xA) / 12.0;
    em += g_deriv_at(3, xA) / 720.0;
    em -= g_deriv_at(5, xA) / 30240.0;

    // Panels from xA to x_ibp: geometric growth capped at a quarter period.
    std::complex<double> integral(0.0, 0.0);
    double lo = xA;
    const double quarter = 0.5 * M_PI / at;
    while (lo < x_ibp) {
        double hi = std::min({lo * 2.0, lo + quarter, x_ibp});
        if (hi - lo < 1e-9) break;
        std::complex<double> ps(0.0, 0.0);
        for (int i = 0; i < 16; ++i) {
            double xi = 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGLx[i];
            ps += kGLw[i] * d[0].eval(xi) * std::exp(I * (xi * theta));
        }
        integral += ps * (0.5 * (hi - lo));
        lo = hi;
    }
    integral += ibp_integral(lo);
    return s + em + integral;
}

}  // namespace fluctlab
