#include "fluctlab/ladder.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "fluctlab/fft.hpp"
#include "fluctlab/series.hpp"
#include "fluctlab/util.hpp"

namespace fluctlab {

double LadderData::ua_error_bound(std::int64_t x) const {
    double rel = std::expm1(bias_scale * static_cast<double>(x)) + z_defect * U_a.back();
    return std::abs(u_a[static_cast<std::size_t>(x)]) * rel + 1e-14;
}

double LadderData::green_halfline(std::int64_t x, std::int64_t y) const {
    if (x < 0 || y < 0) return 0.0;
    if (x > n() || y > n()) throw error("green_halfline: ladder window exceeded");
    const std::int64_t m = std::min(x, y);
    double s = 0.0;
    for (std::int64_t k = 0; k <= m; ++k)
        s += v_d[static_cast<std::size_t>(x - k)] * u_a[static_cast<std::size_t>(y - k)];
    return s;
}

namespace {

void prefix_sums(const std::vector<double>& a, std::vector<double>& out) {
    out.resize(a.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i];
        out[i] = acc;
    }
}

// ---------------------------------------------------------------------------
// Bounded-support engine: factor s^a (1 - phi(s)) over the unit circle.

LadderData ladder_poly(const StepDistribution& d, const LadderOptions& opts) {
    const std::int64_t lo = d.support_min(), hi = d.support_max();
    const std::int64_t a = -lo, b = hi;
    if (a <= 0 || b <= 0) throw error("compute_ladder: support must straddle 0");
    {
        std::int64_t g = 0;
        for (std::int64_t x = lo; x <= hi; ++x)
            if (d.pmf(x) > 0) g = std::gcd(g, std::llabs(x));
        if (g > 1)
            throw error("compute_ladder: support lives on the sublattice " + std::to_string(g) +
                        "Z; rescale the input");
    }
    // D(s) = s^a (1 - phi(s)); degree a + b
    std::vector<double> D(static_cast<std::size_t>(a + b) + 1, 0.0);
    D[static_cast<std::size_t>(a)] = 1.0;
    for (std::int64_t x = lo; x <= hi; ++x) D[static_cast<std::size_t>(x + a)] -= d.pmf(x);

    double mean = 0.0;
    for (std::int64_t x = lo; x <= hi; ++x) mean += static_cast<double>(x) * d.pmf(x);
    const bool oscillating = std::abs(mean) < 1e-12;

    // deflate the known roots at s = 1 (double when EX = 0)
    auto deflate_at_one = [](std::vector<double>& poly) {
        // poly = (s - 1) * q  =>  synthetic division
        std::vector<double> q(poly.size() - 1, 0.0);
        double carry = poly.back();
        for (std::size_t i = poly.size() - 1; i-- > 0;) {
            q[i] = carry;
            carry = poly[i] + carry;
        }
        poly.swap(q);
        return carry;  // remainder, should be ~0
    };
    std::vector<double> red = D;
    double rem1 = deflate_at_one(red);
    if (std::abs(rem1) > 1e-9) throw error("compute_ladder: p does not sum to 1");
    int ones_remaining = 0;  // deflated unit roots still to assign
    if (oscillating) {
        deflate_at_one(red);
        ones_remaining = 2;
    } else {
        ones_remaining = 1;
    }

    // companion-matrix roots of the reduced polynomial
    while (!red.empty() && std::abs(red.back()) < 1e-300) red.pop_back();
    const std::size_t deg = red.size() - 1;
    std::vector<std::complex<double>> roots;
    if (deg > 0) {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
        for (std::size_t i = 0; i < deg; ++i) C(0, i) = -red[deg - 1 - i] / red[deg];
        for (std::size_t i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
        for (std::size_t i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()[i]);
    }
    std::vector<std::complex<double>> out_roots, in_roots;
    for (auto r : roots) {
        double m = std::abs(r);
        if (m > 1.0 + 1e-9)
            out_roots.push_back(r);
        else if (m < 1.0 - 1e-9)
            in_roots.push_back(r);
        else
            throw error("compute_ladder: root on the unit circle (|r| = " + fmt_g17(m) + ")");
    }
    // unit roots: one per side when oscillating; with drift the proper side
    // keeps its factor root-free at 1 (EX > 0: ascending ladder proper and the
    // root at 1 belongs to the descending factor, which stays defective).
    if (oscillating) {
        out_roots.push_back({1.0, 0.0});
        in_roots.push_back({1.0, 0.0});
    } else if (mean > 0) {
        out_roots.push_back({1.0, 0.0});
    } else {
        in_roots.push_back({1.0, 0.0});
    }
    if (static_cast<std::int64_t>(out_roots.size()) != b ||
        static_cast<std::int64_t>(in_roots.size()) != a)
        throw error("compute_ladder: unexpected root split " + std::to_string(out_roots.size()) +
                    "/" + std::to_string(in_roots.size()));

    // ascending factor A(s) = prod_{out} (1 - s/r): A(s) = 1 - chi_plus(s)
    auto poly_from_roots = [](const std::vector<std::complex<double>>& rs, bool reciprocal) {
        std::vector<std::complex<double>> c{1.0};
        for (auto r : rs) {
            std::complex<double> f = reciprocal ? -1.0 / r : -r;
            c.push_back({0.0, 0.0});
            for (std::size_t i = c.size() - 1; i >= 1; --i) c[i] += c[i - 1] * f;
        }
        std::vector<double> real(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) real[i] = c[i].real();
        return real;
    };
    std::vector<double> asc = poly_from_roots(out_roots, true);   // coeffs of prod(1 - s/r)
    std::vector<double> desc = poly_from_roots(in_roots, false);  // coeffs of prod(1 - r t)

    // normalising constant from a test point on the circle:
    // 1 - phi(s0) = A(s0) * K * P(1/s0)
    std::complex<double> s0 = std::exp(std::complex<double>(0.0, 0.7));
    auto poly_eval = [](const std::vector<double>& c, std::complex<double> s) {
        std::complex<double> v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
        return v;
    };
    std::complex<double> lhs = 1.0 - d.char_fn(0.7);
    std::complex<double> K_c = lhs / (poly_eval(asc, s0) * poly_eval(desc, 1.0 / s0));
    if (std::abs(K_c.imag()) > 1e-8 * std::abs(K_c))
        throw error("compute_ladder: factor constant not real");
    const double K = K_c.real();
    if (!(K > 0)) throw error("compute_ladder: factor constant not positive");

    LadderData ld;
    ld.method = "wh-poly";
    ld.defective = !oscillating;
    ld.z_pmf.assign(static_cast<std::size_t>(b) + 1, 0.0);
    for (std::int64_t k = 1; k <= b; ++k) {
        double v = -asc[static_cast<std::size_t>(k)];
        ld.z_pmf[static_cast<std::size_t>(k)] = std::max(v, 0.0);
    }
    ld.zhat_pmf.assign(static_cast<std::size_t>(a) + 1, 0.0);
    ld.zhat_pmf[0] = 1.0 - K;
    for (std::int64_t k = 1; k <= a; ++k) {
        double v = -K * desc[static_cast<std::size_t>(k)];
        ld.zhat_pmf[static_cast<std::size_t>(k)] = std::max(v, 0.0);
    }
    ld.v0 = 1.0 / K;
    ld.z_defect = std::max(0.0, 1.0 - std::accumulate(ld.z_pmf.begin(), ld.z_pmf.end(), 0.0));
    ld.zhat_defect =
        std::max(0.0, 1.0 - std::accumulate(ld.zhat_pmf.begin(), ld.zhat_pmf.end(), 0.0));

    // renewal recursions (direct; the kernels are short)
    const std::size_t n = static_cast<std::size_t>(opts.n);
    ld.u_a.assign(n + 1, 0.0);
    ld.u_a[0] = 1.0;
    for (std::size_t x = 1; x <= n; ++x) {
        double s = 0.0;
        for (std::size_t k = 1; k <= std::min<std::size_t>(b, x); ++k)
            s += ld.z_pmf[k] * ld.u_a[x - k];
        ld.u_a[x] = s;
    }
    ld.v_d.assign(n + 1, 0.0);
    const double denom = 1.0 - ld.zhat_pmf[0];
    ld.v_d[0] = 1.0 / denom;
    for (std::size_t x = 1; x <= n; ++x) {
        double s = 0.0;
        for (std::size_t k = 1; k <= std::min<std::size_t>(a, x); ++k)
            s += ld.zhat_pmf[k] * ld.v_d[x - k];
        ld.v_d[x] = s / denom;
    }
    prefix_sums(ld.u_a, ld.U_a);
    prefix_sums(ld.v_d, ld.V_d);
    ld.bias_scale = 0.0;
    return ld;
}

// ---------------------------------------------------------------------------
// Spectral engine: Fourier coefficients c_k of -log(1 - phi) on the shifted
// grid theta_j = 2 pi (j + 1/2) / L, then
//   sum_k u_a(k) s^k = exp(sum_{k>=1} c_k s^k),
//   sum_k v_d(k) s^k = exp(c_0) exp(sum_{k>=1} c_{-k} s^k),
//   1 - E s^Z        = exp(-sum_{k>=1} c_k s^k).
// The half-bin shift avoids theta = 0 and turns grid aliasing into an
// alternating, Richardson-extrapolatable O(1/L) bias.

struct SpectralCoeffs {
    std::vector<double> cpos, cneg;  // c_k and c_{-k}, index 0 unused
    double c0 = 0.0;
};

SpectralCoeffs spectral_pass(const StepDistribution& d, int log2L, std::int64_t nkeep) {
    const std::size_t L = std::size_t(1) << log2L;
    const std::int64_t half = static_cast<std::int64_t>(L / 2);
    std::vector<std::complex<double>> w(L);
    // pmf with the half-bin twiddle e^{i pi x / L} at signed lattice positions
    const double piOverL = M_PI / static_cast<double>(L);
    auto put = [&](std::int64_t x, double p) {
        std::size_t idx = static_cast<std::size_t>((x + static_cast<std::int64_t>(L)) %
                                                   static_cast<std::int64_t>(L));
        double ang = piOverL * static_cast<double>(x);
        w[idx] += std::polar(p, ang);
    };
    for (std::int64_t x = d.support_min(); x <= d.support_max(); ++x) {
        double p = d.pmf(x);
        if (p > 0) put(x, p);
    }
    if (d.tail_pos().present()) {
        double prev = d.tail_pos().T(1.0);
        for (std::int64_t x = 2; x <= half; ++x) {
            double cur = d.tail_pos().T(static_cast<double>(x));
            put(x, prev - cur);
            prev = cur;
        }
    }
    if (d.tail_neg().present()) {
        double prev = d.tail_neg().T(1.0);
        for (std::int64_t x = 2; x < half; ++x) {
            double cur = d.tail_neg().T(static_cast<double>(x));
            put(-x, prev - cur);
            prev = cur;
        }
    }
    fft_inplace(w, +1);  // w[j] = phi(theta_j) up to window truncation

    // patch the smallest |theta| bins with the exact characteristic function
    const int npatch = 384;
    for (int j = 0; j < npatch; ++j) {
        double th = 2.0 * M_PI * (static_cast<double>(j) + 0.5) / static_cast<double>(L);
        w[static_cast<std::size_t>(j)] = d.char_fn(th);
        w[L - 1 - static_cast<std::size_t>(j)] = d.char_fn(-th);
    }
    for (std::size_t j = 0; j < L; ++j) {
        std::complex<double> om = 1.0 - w[j];
        if (!(om.real() > 0))
            om = {std::max(om.real(), 1e-300), om.imag()};
        w[j] = -std::log(om);
    }
    fft_inplace(w, -1);
    SpectralCoeffs sc;
    sc.cpos.assign(static_cast<std::size_t>(nkeep) + 1, 0.0);
    sc.cneg.assign(static_cast<std::size_t>(nkeep) + 1, 0.0);
    const double invL = 1.0 / static_cast<double>(L);
    auto take = [&](std::int64_t k) {
        std::size_t idx = static_cast<std::size_t>((k + static_cast<std::int64_t>(L)) %
                                                   static_cast<std::int64_t>(L));
        std::complex<double> v = w[idx] * std::polar(invL, -piOverL * static_cast<double>(k));
        return v.real();
    };
    sc.c0 = take(0);
    for (std::int64_t k = 1; k <= nkeep; ++k) {
        sc.cpos[static_cast<std::size_t>(k)] = take(k);
        sc.cneg[static_cast<std::size_t>(k)] = take(-k);
    }
    return sc;
}

LadderData ladder_spectral(const StepDistribution& d, const LadderOptions& opts) {
    const std::int64_t n = opts.n;
    SpectralCoeffs sc = spectral_pass(d, opts.grid_log2, n);
    if (opts.richardson) {
        SpectralCoeffs half = spectral_pass(d, opts.grid_log2 - 1, n);
        sc.c0 = 2.0 * sc.c0 - half.c0;
        for (std::size_t k = 1; k < sc.cpos.size(); ++k) {
            sc.cpos[k] = 2.0 * sc.cpos[k] - half.cpos[k];
            sc.cneg[k] = 2.0 * sc.cneg[k] - half.cneg[k];
        }
    }

    LadderData ld;
    ld.method = "wh-spectral";
    const std::size_t N = static_cast<std::size_t>(n);
    ld.u_a = exp_series(sc.cpos, N);
    ld.v_d = exp_series(sc.cneg, N);
    ld.v0 = std::exp(sc.c0);
    for (auto& v : ld.v_d) v *= ld.v0;

    std::vector<double> neg(sc.cpos.size());
    for (std::size_t k = 0; k < sc.cpos.size(); ++k) neg[k] = -sc.cpos[k];
    std::vector<double> zneg = exp_series(neg, N);
    ld.z_pmf.assign(N + 1, 0.0);
    for (std::size_t k = 1; k <= N; ++k) ld.z_pmf[k] = std::max(-zneg[k], 0.0);
    for (std::size_t k = 0; k < sc.cneg.size(); ++k) neg[k] = -sc.cneg[k];
    std::vector<double> zhneg = exp_series(neg, N);
    ld.zhat_pmf.assign(N + 1, 0.0);
    ld.zhat_pmf[0] = 1.0 - 1.0 / ld.v0;
    for (std::size_t k = 1; k <= N; ++k)
        ld.zhat_pmf[k] = std::max(-zhneg[k], 0.0) / ld.v0;

    prefix_sums(ld.u_a, ld.U_a);
    prefix_sums(ld.v_d, ld.V_d);
    ld.z_defect = std::max(0.0, 1.0 - std::accumulate(ld.z_pmf.begin(), ld.z_pmf.end(), 0.0));
    ld.zhat_defect =
        std::max(0.0, 1.0 - std::accumulate(ld.zhat_pmf.begin(), ld.zhat_pmf.end(), 0.0));

    // alias-bias model: the alternating fold of c ~ gamma/|k| contributes a
    // near-constant shift ~ (gamma_+ + gamma_-) ln2 / L per coefficient
    double gpos = 0.0, gneg = 0.0;
    int cnt = 0;
    for (std::size_t k = N / 2; k <= N; k += std::max<std::size_t>(N / 64, 1)) {
        gpos += static_cast<double>(k) * sc.cpos[k];
        gneg += static_cast<double>(k) * sc.cneg[k];
        ++cnt;
    }
    gpos = std::abs(gpos / cnt);
    gneg = std::abs(gneg / cnt);
    const double L = static_cast<double>(std::size_t(1) << opts.grid_log2);
    ld.bias_scale = (gpos + gneg) * M_LN2 / L * (opts.richardson ? 0.2 : 1.0);
    return ld;
}

}  // namespace

LadderData compute_ladder(const StepDistribution& d, const LadderOptions& opts) {
    LadderOptions o = opts;
    if (o.n < 1) throw error("compute_ladder: window must be positive");
    if (o.engine == 1 || (o.engine == 0 && d.bounded())) {
        if (!d.bounded()) throw error("compute_ladder: polynomial engine needs bounded support");
        return ladder_poly(d, o);
    }
    return ladder_spectral(d, o);
}

LadderData mirror(const LadderData& ld) {
    LadderData m;
    m.method = ld.method;
    m.defective = ld.defective;
    m.v0 = ld.v0;
    m.bias_scale = ld.bias_scale;
    m.z_defect = ld.zhat_defect;
    m.zhat_defect = ld.z_defect;
    // strict descending pmf of the original = v0 * weak pmf off the atom
    m.z_pmf.assign(ld.zhat_pmf.size(), 0.0);
    for (std::size_t k = 1; k < ld.zhat_pmf.size(); ++k) m.z_pmf[k] = ld.v0 * ld.zhat_pmf[k];
    m.zhat_pmf.assign(ld.z_pmf.size(), 0.0);
    m.zhat_pmf[0] = 1.0 - 1.0 / ld.v0;
    for (std::size_t k = 1; k < ld.z_pmf.size(); ++k) m.zhat_pmf[k] = ld.z_pmf[k] / ld.v0;
    m.u_a.resize(ld.v_d.size());
    for (std::size_t k = 0; k < ld.v_d.size(); ++k) m.u_a[k] = ld.v_d[k] / ld.v0;
    m.v_d.resize(ld.u_a.size());
    for (std::size_t k = 0; k < ld.u_a.size(); ++k) m.v_d[k] = ld.u_a[k] * ld.v0;
    prefix_sums(m.u_a, m.U_a);
    prefix_sums(m.v_d, m.V_d);
    return m;
}

double ell_star(const LadderData& ld, std::int64_t t) {
    if (t < 0) throw error("ell_star: t must be >= 0");
    // P[Z > s] = 1 - sum_{k<=s} z_pmf[k]; defect mass counts as Z = infinity
    double acc = 0.0, cum = 0.0, out = 0.0;
    for (std::int64_t s = 0; s < t; ++s) {
        if (s >= 1 && s < static_cast<std::int64_t>(ld.z_pmf.size()))
            cum += ld.z_pmf[static_cast<std::size_t>(s)];
        else if (s >= static_cast<std::int64_t>(ld.z_pmf.size()))
            cum = 1.0 - ld.z_defect;
        acc = 1.0 - cum;
        out += acc;
    }
    return out;
}

double hat_ell_star(const LadderData& ld, std::int64_t t) {
    if (t < 0) throw error("hat_ell_star: t must be >= 0");
    double cum = ld.zhat_pmf.empty() ? 0.0 : ld.zhat_pmf[0];
    double out = 0.0;
    for (std::int64_t s = 0; s < t; ++s) {
        if (s >= 1 && s < static_cast<std::int64_t>(ld.zhat_pmf.size()))
            cum += ld.zhat_pmf[static_cast<std::size_t>(s)];
        else if (s >= static_cast<std::int64_t>(ld.zhat_pmf.size()))
            cum = 1.0 - ld.zhat_defect;
        out += 1.0 - cum;
    }
    return out;
}

TailIntegral hat_ell_sharp(const StepDistribution& d, const LadderData& ld, std::int64_t t,
                           std::int64_t t_max) {
    if (t < 1 || t_max <= t) throw error("hat_ell_sharp: need 1 <= t < t_max");
    if (t_max > ld.n()) throw error("hat_ell_sharp: t_max exceeds the ladder window");
    TailIntegral r;
    // lattice integral: integrand H_+(s) / hat-ell*(s) on [t, t_max)
    double cum = ld.zhat_pmf[0];
    for (std::int64_t s = 1; s < t; ++s)
        if (s < static_cast<std::int64_t>(ld.zhat_pmf.size()))
            cum += ld.zhat_pmf[static_cast<std::size_t>(s)];
    double els = hat_ell_star(ld, t);
    for (std::int64_t s = t; s < t_max; ++s) {
        if (els <= 0) throw error("hat_ell_sharp: degenerate hat-ell*");
        r.value += d.tail_plus(s) / els;
        if (s < static_cast<std::int64_t>(ld.zhat_pmf.size()))
            cum += ld.zhat_pmf[static_cast<std::size_t>(s)];
        els += 1.0 - cum;
    }
    // tail: integrand between 0 and H_+(s)/hat-ell*(t_max); with a parametric
    // tail the numerator integral has a closed form via term sums
    if (d.tail_pos().present()) {
        double num = em_tail_sum(d.tail_pos().terms(), t_max);
        r.remainder_high = num / hat_ell_star(ld, t_max);
        r.remainder_low = 0.0;
    } else {
        double num = 0.0;
        for (std::int64_t s = t_max; s <= t_max + d.support_max(); ++s) num += d.tail_plus(s);
        r.remainder_high = num / hat_ell_star(ld, t_max);
    }
    return r;
}

TailIntegral ell_sharp_prs(const StepDistribution& d, const LadderData& ld, std::int64_t t,
                           std::int64_t t_max, double alpha) {
    if (t < 1 || t_max <= t) throw error("ell_sharp_prs: need 1 <= t < t_max");
    TailIntegral r;
    for (std::int64_t s = t; s < t_max; ++s) {
        double ell = std::pow(static_cast<double>(s), alpha) /
                     std::max(static_cast<double>(s) * ell_star(ld, s), 1e-300);
        // ell(s) normalised so that U_a(s) ~ s^alpha/ell(s); integrand
        // alpha s^{alpha-1} F(-s) / ell(s)
        r.value += alpha * std::pow(static_cast<double>(s), alpha - 1.0) * d.tail_minus(s) / ell;
    }
    double last = alpha * std::pow(static_cast<double>(t_max), alpha - 1.0) * d.tail_minus(t_max);
    r.remainder_high = last * static_cast<double>(t_max);  // crude one-scale bound
    return r;
}

ConvergenceReport nagaev_check(const std::vector<double>& q_pmf, double tail_mass_beyond,
                               std::int64_t n, const std::vector<std::int64_t>& grid) {
    ConvergenceReport rep;
    rep.formula_id = "C";
    double mass = std::accumulate(q_pmf.begin(), q_pmf.end(), 0.0) + tail_mass_beyond;
    if (std::abs(mass - 1.0) > 1e-9) throw error("nagaev_check: q must be a proper pmf");
    // suffix sums: l(x) = sum_{k > x} q(k) + beyond
    std::vector<double> ell(q_pmf.size(), tail_mass_beyond);
    double acc = tail_mass_beyond;
    for (std::size_t k = q_pmf.size(); k-- > 1;) {
        ell[k - 1] = acc + q_pmf[k];
        acc = ell[k - 1];
    }
    auto ell_at = [&](std::int64_t x) {
        return x < static_cast<std::int64_t>(ell.size()) ? ell[static_cast<std::size_t>(x)]
                                                         : tail_mass_beyond;
    };
    // applicability: the tail must look slowly varying
    std::int64_t top = *std::max_element(grid.begin(), grid.end());
    if (top > n) throw error("nagaev_check: grid exceeds n");
    double l_top = ell_at(top), l_half = ell_at(top / 2);
    if (!(l_top > 0) || l_top / l_half < 0.6) {
        rep.applicable = false;
        rep.note = "tail not slowly varying: l(x) ratio over one octave = " +
                   fmt_g17(l_top / std::max(l_half, 1e-300));
        rep.finalize();
        return rep;
    }
    auto u = renewal_sequence(q_pmf, static_cast<std::size_t>(n));
    for (auto x : grid) {
        double lx = ell_at(x);
        double qx = x < static_cast<std::int64_t>(q_pmf.size()) ? q_pmf[static_cast<std::size_t>(x)]
                                                                : 0.0;
        if (qx <= 0) throw error("nagaev_check: q(x) = 0 on the grid");
        rep.grid.push_back(static_cast<double>(x));
        rep.exact.push_back(u[static_cast<std::size_t>(x)]);
        rep.predicted.push_back(qx / (lx * lx));
    }
    rep.finalize();
    return rep;
}

}  // namespace fluctlab
