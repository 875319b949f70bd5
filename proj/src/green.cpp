#include "fluctlab/green.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "fluctlab/fft.hpp"
#include "fluctlab/util.hpp"

namespace fluctlab {

// ---------------------------------------------------------------------------
// IntervalGreen

struct IntervalGreen::Impl {
    StepDistribution d;
    std::int64_t R;
    bool dense;
    Eigen::MatrixXd IQ;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    // iterative path
    std::vector<std::complex<double>> kfft, kfft_t;  // FFT of kernel and transpose kernel
    std::size_t nfft = 0;
    std::map<std::int64_t, std::vector<double>> rows, cols;
    std::vector<double> pup;
    std::vector<std::vector<double>> full;
    double full_resid = -1.0;
    double& residual;

    Impl(const StepDistribution& dist, std::int64_t r, std::int64_t dense_limit, double& res)
        : d(dist), R(r), residual(res) {
        dense = R <= dense_limit;
        const std::size_t n = static_cast<std::size_t>(R) + 1;
        if (dense) {
            IQ.resize(n, n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    IQ(i, j) = (i == j ? 1.0 : 0.0) -
                               d.pmf(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(i));
            lu.compute(IQ);
        } else {
            nfft = next_pow2(3 * n);
            kfft.assign(nfft, 0.0);
            kfft_t.assign(nfft, 0.0);
            for (std::int64_t j = -R; j <= R; ++j) {
                double p = d.pmf(j);
                if (p == 0) continue;
                // (Qx)[i] = sum_j p(j-i) x[j] = sum_j k[i-j] x[j] with k[t] = p(-t)
                kfft[static_cast<std::size_t>((-j + static_cast<std::int64_t>(nfft)) %
                                              static_cast<std::int64_t>(nfft))] += p;
                kfft_t[static_cast<std::size_t>((j + static_cast<std::int64_t>(nfft)) %
                                                static_cast<std::int64_t>(nfft))] += p;
            }
            fft_inplace(kfft, +1);
            fft_inplace(kfft_t, +1);
        }
    }

    // y = (I - Q^T?) x via FFT; transpose flag picks the adjoint kernel
    std::vector<double> apply(const std::vector<double>& x, bool transpose) {
        const std::size_t n = static_cast<std::size_t>(R) + 1;
        if (dense) {
            Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
            Eigen::VectorXd y = transpose ? (IQ.transpose() * xv).eval() : (IQ * xv).eval();
            return std::vector<double>(y.data(), y.data() + n);
        }
        std::vector<std::complex<double>> buf(nfft, 0.0);
        for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
        fft_inplace(buf, +1);
        const auto& k = transpose ? kfft_t : kfft;
        for (std::size_t i = 0; i < nfft; ++i) buf[i] *= k[i];
        fft_inplace(buf, -1);
        std::vector<double> y(n);
        // (Qx)[i] = sum_j p(j-i) x[j] = conv(x, kernel)[i] with kernel offsets
        for (std::size_t i = 0; i < n; ++i)
            y[i] = x[i] - buf[i].real() / static_cast<double>(nfft);
        return y;
    }

    // BiCGstab for (I - Q) z = b (or the transpose); returns z
    std::vector<double> solve(const std::vector<double>& b, bool transpose) {
        const std::size_t n = static_cast<std::size_t>(R) + 1;
        if (dense) {
            Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
            Eigen::VectorXd z = transpose ? lu.transpose().solve(bv).eval() : lu.solve(bv).eval();
            std::vector<double> out(z.data(), z.data() + n);
            track_residual(out, b, transpose);
            return out;
        }
        std::vector<double> x(n, 0.0), r = b, r0 = b, p = b, v(n), s(n), t(n);
        double rho = 1, alpha = 1, omega = 1;
        double rho_prev = 0;
        auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
            double acc = 0;
            for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * c[i];
            return acc;
        };
        double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0) return x;
        rho = rho_prev = dot(r0, r);
        v.assign(n, 0.0);
        p = r;
        for (int it = 0; it < 4000; ++it) {
            v = apply(p, transpose);
            alpha = rho / dot(r0, v);
            for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
            t = apply(s, transpose);
            double tt = dot(t, t);
            omega = tt > 0 ? dot(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i] + omega * s[i];
                r[i] = s[i] - omega * t[i];
            }
            if (std::sqrt(dot(r, r)) < 1e-14 * bnorm) break;
            rho = dot(r0, r);
            double beta = (rho / rho_prev) * (alpha / omega);
            rho_prev = rho;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        track_residual(x, b, transpose);
        return x;
    }

    void track_residual(const std::vector<double>& z, const std::vector<double>& b,
                        bool transpose) {
        auto az = apply(z, transpose);
        double m = 0;
        for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(az[i] - b[i]));
        residual = std::max(residual, m);
        if (m > 1e-9)
            throw error("IntervalGreen: solve residual " + fmt_g17(m) + " exceeds tolerance");
    }
};

IntervalGreen::IntervalGreen(const StepDistribution& d, std::int64_t R, std::int64_t dense_limit)
    : R_(R) {
    if (R < 0) throw error("IntervalGreen: R must be >= 0");
    impl_ = std::make_unique<Impl>(d, R, dense_limit, residual_);
}
IntervalGreen::~IntervalGreen() = default;
IntervalGreen::IntervalGreen(IntervalGreen&&) noexcept = default;

double IntervalGreen::value(std::int64_t x, std::int64_t y) {
    if (x < 0 || x > R_ || y < 0 || y > R_) return 0.0;  // killed outside [0, R]
    auto it = impl_->cols.find(y);
    if (it == impl_->cols.end()) {
        std::vector<double> e(static_cast<std::size_t>(R_) + 1, 0.0);
        e[static_cast<std::size_t>(y)] = 1.0;
        it = impl_->cols.emplace(y, impl_->solve(e, false)).first;
    }
    return it->second[static_cast<std::size_t>(x)];
}

const std::vector<double>& IntervalGreen::row(std::int64_t x) {
    if (x < 0 || x > R_) throw error("IntervalGreen::row: x outside [0, R]");
    auto it = impl_->rows.find(x);
    if (it == impl_->rows.end()) {
        std::vector<double> e(static_cast<std::size_t>(R_) + 1, 0.0);
        e[static_cast<std::size_t>(x)] = 1.0;
        it = impl_->rows.emplace(x, impl_->solve(e, true)).first;
    }
    return it->second;
}

const std::vector<double>& IntervalGreen::exit_up() {
    if (impl_->pup.empty()) {
        std::vector<double> r(static_cast<std::size_t>(R_) + 1);
        for (std::int64_t x = 0; x <= R_; ++x)
            r[static_cast<std::size_t>(x)] = impl_->d.tail_plus(R_ - x);
        impl_->pup = impl_->solve(r, false);
        for (auto& v : impl_->pup) v = std::min(std::max(v, 0.0), 1.0);
    }
    return impl_->pup;
}

const std::vector<std::vector<double>>& IntervalGreen::full_table() {
    if (!impl_->full.empty()) return impl_->full;
    if (!impl_->dense) throw error("IntervalGreen: full table needs the dense path");
    const std::size_t n = static_cast<std::size_t>(R_) + 1;
    Eigen::MatrixXd G = impl_->lu.inverse();
    impl_->full.assign(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) impl_->full[i][j] = G(i, j);
    return impl_->full;
}

double IntervalGreen::full_table_residual() {
    if (!impl_->dense) throw error("IntervalGreen: full residual needs the dense path");
    full_table();
    const std::size_t n = static_cast<std::size_t>(R_) + 1;
    Eigen::MatrixXd G(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) G(i, j) = impl_->full[i][j];
    Eigen::MatrixXd E = impl_->IQ * G - Eigen::MatrixXd::Identity(n, n);
    impl_->full_resid = E.cwiseAbs().maxCoeff();
    residual_ = std::max(residual_, impl_->full_resid);
    return impl_->full_resid;
}

HalflineBracket green_halfline_solve(const StepDistribution& d, std::int64_t W, std::int64_t sub,
                                     std::int64_t dense_limit) {
    if (sub > W) throw error("green_halfline_solve: sub-window exceeds W");
    IntervalGreen g(d, W, dense_limit);
    const auto& e = g.exit_up();  // escape above W before entering (-inf,-1]
    HalflineBracket out;
    out.window = W;
    const std::size_t n = static_cast<std::size_t>(sub) + 1;
    out.lower.assign(n, std::vector<double>(n));
    out.upper.assign(n, std::vector<double>(n));
    for (std::int64_t y = 0; y <= sub; ++y) {
        double gyy = g.value(y, y);
        double ey = e[static_cast<std::size_t>(y)];
        if (!(ey < 1.0)) throw error("green_halfline_solve: escape probability reached 1");
        double sup_visits = gyy / (1.0 - ey);  // any return must pass through y
        for (std::int64_t x = 0; x <= sub; ++x) {
            double lo = g.value(x, y);
            double width = e[static_cast<std::size_t>(x)] * sup_visits;
            out.lower[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = lo;
            out.upper[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = lo + width;
            out.max_width = std::max(out.max_width, width);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// LatticeKernels: shared quadrature for a(x) and G(x)

namespace {

const double kGLx16[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
const double kGLw16[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// 1 - e^{i t} without cancellation at small t: 2 sin^2(t/2) - i sin t.
inline std::complex<double> one_minus_cis(double t) {
    double s = std::sin(0.5 * t);
    return {2.0 * s * s, -std::sin(t)};
}

// u - sin(u) without cancellation (relative loss ~ u^2 when done naively).
inline double u_minus_sin(double u) {
    if (std::abs(u) < 1e-2) {
        double u2 = u * u;
        return u * u2 / 6.0 *
               (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)));
    }
    return u - std::sin(u);
}

}  // namespace

struct LatticeKernels::Impl {
    StepDistribution d;
    std::vector<TermSum> chain_pos, chain_neg;
    bool has_pos, has_neg;
    double Tpos1 = 0, Tneg1 = 0;

    // shared quadrature nodes, refined for the largest |x| requested so far
    std::int64_t node_xref = -1;
    std::vector<double> theta, weight;          // GL nodes on (theta_min, pi]
    std::vector<std::complex<double>> M;        // 1 / (1 - phi(theta))
    static constexpr double theta_min = 1e-21;

    // fitted local model 1 - phi(theta) ~ theta (c1 + i (c2 log(1/theta) + c3))
    double c1 = 0, c2 = 0, c3 = 0;
    bool model_fitted = false;

    explicit Impl(const StepDistribution& dist) : d(dist) {
        has_pos = d.tail_pos().present();
        has_neg = d.tail_neg().present();
        if (has_pos) {
            chain_pos = derivative_chain(d.tail_pos().terms(), 12);
            Tpos1 = d.tail_pos().T(1.0);
        }
        if (has_neg) {
            chain_neg = derivative_chain(d.tail_neg().terms(), 12);
            Tneg1 = d.tail_neg().T(1.0);
        }
    }

    // 1 - phi(theta) without cancellation: sum p(x) (1 - e^{i x theta}).
    // The imaginary atom part is written as sum p (x th - sin x th) - th * m1
    // so that mean-zero walks do not lose the theta^3 signal to roundoff.
    std::complex<double> one_minus_phi(double th) const {
        double re = 0.0, im = 0.0, m1_atoms = 0.0;
        for (std::int64_t x = d.support_min(); x <= d.support_max(); ++x) {
            double p = d.pmf(x);
            if (p <= 0) continue;
            double u = static_cast<double>(x) * th;
            double s = std::sin(0.5 * u);
            re += p * 2.0 * s * s;
            im += p * u_minus_sin(u);
            m1_atoms += p * static_cast<double>(x);
        }
        // Bounded mean-zero walks: the represented atom mean is ~1e-17, not 0;
        // keeping it would plant a spurious drift pole at extreme theta.
        if (d.tags().mean_zero && d.bounded()) m1_atoms = 0.0;
        std::complex<double> acc(re, im - th * m1_atoms);
        // tails: sum_{x>=2} q(x)(1 - e^{+-ix th})
        //      = T(1)(1 - e^{+-2i th}) + (1 - e^{+-i th}) S2(+-th)
        if (has_pos) {
            auto s2 = oscillatory_tail_sum(chain_pos, 2, th, 20000);
            acc += Tpos1 * one_minus_cis(2.0 * th) + one_minus_cis(th) * s2;
        }
        if (has_neg) {
            auto s2 = oscillatory_tail_sum(chain_neg, 2, -th, 20000);
            acc += Tneg1 * one_minus_cis(-2.0 * th) + one_minus_cis(-th) * s2;
        }
        return acc;
    }

    void fit_model() {
        if (model_fitted) return;
        // two probes deep in the singular zone; corrections are O(theta)
        double th1 = 1e-10, th2 = 1e-12;
        auto f1 = one_minus_phi(th1), f2 = one_minus_phi(th2);
        double l1 = std::log(1.0 / th1), l2 = std::log(1.0 / th2);
        c1 = 0.5 * (f1.real() / th1 + f2.real() / th2);
        c2 = (f1.imag() / th1 - f2.imag() / th2) / (l1 - l2);
        c3 = f1.imag() / th1 - c2 * l1;
        model_fitted = true;
    }

    void ensure_nodes(std::int64_t xref) {
        if (xref <= node_xref) return;
        node_xref = xref;
        theta.clear();
        weight.clear();
        M.clear();
        const double period = 2.0 * M_PI / static_cast<double>(xref + 1);
        double hi = M_PI;
        while (hi > theta_min) {
            double lo = std::max(hi * 0.5, theta_min);
            int pieces = std::max<int>(1, static_cast<int>(std::ceil((hi - lo) / period)));
            double w = (hi - lo) / pieces;
            for (int p = 0; p < pieces; ++p) {
                double a = lo + p * w, b = a + w;
                for (int i = 0; i < 16; ++i) {
                    theta.push_back(0.5 * (a + b) + 0.5 * (b - a) * kGLx16[i]);
                    weight.push_back(kGLw16[i] * 0.5 * (b - a));
                }
            }
            hi = lo;
        }
        M.resize(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) M[i] = 1.0 / one_minus_phi(theta[i]);
    }
};

LatticeKernels::LatticeKernels(const StepDistribution& d) : impl_(std::make_unique<Impl>(d)) {}
LatticeKernels::~LatticeKernels() = default;

std::complex<double> LatticeKernels::one_minus_phi(double theta) const {
    return impl_->one_minus_phi(theta);
}

KernelValue LatticeKernels::potential(std::int64_t x) {
    KernelValue out;
    if (x == 0) return out;  // a(0) = 0 by definition
    impl_->ensure_nodes(std::llabs(x));
    // a(x) = sum_n [P(S_n=0) - P(S_n=-x)] = (1/pi) int_0^pi Re[(1 - e^{+ix theta})/(1 - phi)]
    double acc = 0.0;
    double f_min = 0.0;
    for (std::size_t i = impl_->theta.size(); i-- > 0;) {  // ascending theta
        double th = impl_->theta[i];
        std::complex<double> num = one_minus_cis(static_cast<double>(x) * th);
        double f = (num * impl_->M[i]).real();
        acc += impl_->weight[i] * f;
        if (i + 1 == impl_->theta.size()) f_min = f;  // deepest node: plateau value
    }
    out.value = acc / M_PI;
    // the integrand extends continuously to 0; bound the cut piece by its
    // plateau value at the deepest node
    out.bound = 2.0 * Impl::theta_min * std::abs(f_min) / M_PI + 1e-12 * std::abs(out.value);
    return out;
}

KernelValue LatticeKernels::green(std::int64_t x) {
    KernelValue out;
    impl_->ensure_nodes(std::max<std::int64_t>(std::llabs(x), 1));
    const std::complex<double> I(0.0, 1.0);
    double acc = 0.0;
    for (std::size_t i = impl_->theta.size(); i-- > 0;) {
        double th = impl_->theta[i];
        std::complex<double> num = std::exp(-I * (static_cast<double>(x) * th));
        acc += impl_->weight[i] * (num * impl_->M[i]).real();
    }
    // analytic model tail on (0, theta_min): with 1-phi ~ th(c1 + i(c2 L + c3)),
    // int Re M d th = (1/c2) [pi/2 - atan((c2 L0 + c3)/c1)], L0 = log(1/theta_min)
    impl_->fit_model();
    double tail = 0.0, tail_err;
    double L0 = std::log(1.0 / Impl::theta_min);
    if (std::abs(impl_->c2) > 1e-14) {
        tail = (M_PI / 2.0 - std::atan((impl_->c2 * L0 + impl_->c3) / impl_->c1)) / impl_->c2;
        if (tail < 0) tail += M_PI / std::abs(impl_->c2);  // branch guard
        tail_err = 0.02 * tail + std::llabs(x) * Impl::theta_min * std::abs(tail);
    } else {
        // symmetric-tail transient case: Re M ~ 1/(c1 theta) is not integrable
        // -- the walk is recurrent and G is not defined
        throw applicability_error("green kernel: local model degenerate (recurrent input?)");
    }
    out.value = acc / M_PI + tail / M_PI;
    out.bound = tail_err / M_PI + 1e-12 * std::abs(out.value);
    return out;
}

std::vector<KernelValue> potential_series_batch(const StepDistribution& d,
                                                const std::vector<std::int64_t>& xs) {
    if (!d.bounded())
        throw applicability_error("potential_series: convolution-power route needs bounded support");
    double sigma2 = 0.0;
    for (std::int64_t j = d.support_min(); j <= d.support_max(); ++j)
        sigma2 += static_cast<double>(j * j) * d.pmf(j);
    std::int64_t xmax = 1;
    for (auto x : xs) xmax = std::max<std::int64_t>(xmax, std::llabs(x));
    // Abel sums at delta' = sqrt(2 eps)/sigma halving per level; the ladder
    // eliminates delta'^1..delta'^5, residual ~ x (x delta'_0)^6 / 7!
    const int levels = 6;
    const double u0 = 0.1;
    double delta0 = u0 / static_cast<double>(xmax);
    double eps0 = 0.5 * sigma2 * delta0 * delta0;
    // the lattice grid must hold the walk spread at the deepest level
    double neff = std::pow(4.0, levels - 1) / eps0;
    int fft_log2 = 14;
    while (static_cast<double>(std::size_t(1) << fft_log2) < 16.0 * std::sqrt(sigma2 * neff) &&
           fft_log2 < 24)
        ++fft_log2;
    const std::size_t M = std::size_t(1) << fft_log2;
    // stable 1 - phi on the grid: 1 - r phi = eps + r (1 - phi) avoids the
    // catastrophic 1 - cos cancellation at the spike
    std::vector<std::complex<double>> omp(M, 0.0);
    {
        const bool mz = d.tags().mean_zero;
        for (std::int64_t j = d.support_min(); j <= d.support_max(); ++j) {
            double p = d.pmf(j);
            if (p == 0) continue;
            for (std::size_t k = 0; k < M; ++k) {
                double u = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(M) *
                           static_cast<double>(j);
                double s = std::sin(0.5 * u);
                double im = mz ? u_minus_sin(u) : -std::sin(u);
                omp[k] += std::complex<double>(p * 2.0 * s * s, p * im);
            }
        }
    }
    std::vector<std::vector<double>> vals(xs.size(), std::vector<double>(levels));
    std::vector<std::complex<double>> resolvent(M);
    for (int l = 0; l < levels; ++l) {
        double eps = eps0 / std::pow(4.0, l);
        double r = 1.0 - eps;
        for (std::size_t k = 0; k < M; ++k) resolvent[k] = 1.0 / (eps + r * omp[k]);
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            const std::complex<double> step = std::exp(std::complex<double>(
                0, 2.0 * M_PI * static_cast<double>(xs[xi]) / static_cast<double>(M)));
            std::complex<double> rot(1.0, 0.0);
            std::complex<double> acc(0, 0);
            for (std::size_t k = 0; k < M; ++k) {
                acc += (1.0 - rot) * resolvent[k];
                rot *= step;
                if ((k & 1023) == 1023) rot /= std::abs(rot);
            }
            vals[xi][l] = acc.real() / static_cast<double>(M);
        }
    }
    std::vector<KernelValue> out(xs.size());
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        std::vector<double> t = vals[xi];
        double last_corr = 0;
        for (int o = 1; o < levels; ++o) {
            double f = std::pow(2.0, o);  // delta' halves per level
            for (int i = levels - 1; i >= o; --i) {
                double nv = (f * t[i] - t[i - 1]) / (f - 1.0);
                if (i == levels - 1) last_corr = std::abs(nv - t[i]);
                t[i] = nv;
            }
        }
        out[xi] = {t[levels - 1], 4.0 * last_corr + 1e-11};
    }
    return out;
}

KernelValue potential_series(const StepDistribution& d, std::int64_t x, int fft_log2) {
    (void)fft_log2;  // the batch picks its grid from the Richardson depth
    return potential_series_batch(d, {x})[0];
}

LaddIdentityReport check_ladd_identity(const StepDistribution& d, const LadderData& ld,
                                       LatticeKernels& ker,
                                       const std::vector<std::int64_t>& x_grid,
                                       std::int64_t y_probe) {
    LaddIdentityReport rep;
    rep.grid = x_grid;
    // EZ = sum k z_pmf[k] (+ infinite when defective)
    double ez = 0.0;
    for (std::size_t k = 1; k < ld.z_pmf.size(); ++k) ez += static_cast<double>(k) * ld.z_pmf[k];
    rep.ez = ez;
    rep.ez_finite = ld.z_defect < 1e-9 && d.bounded();
    if (!rep.ez_finite) {
        rep.note = "EZ not exactly summable; first-entrance identity skipped";
        return rep;
    }
    // hitting measure of (-inf, 0] from x: mu_x(w) = sum_j v_d(j) zhat[x-j+w]
    const std::int64_t wmax = -d.support_min();  // re-entry overshoot < max down-jump
    auto mu = [&](std::int64_t x, std::int64_t w) {
        double s = 0.0;
        for (std::int64_t j = 0; j < x; ++j) {
            std::int64_t idx = x - j + w;
            if (idx >= 1 && idx < static_cast<std::int64_t>(ld.zhat_pmf.size()))
                s += ld.v_d[static_cast<std::size_t>(j)] *
                     ld.zhat_pmf[static_cast<std::size_t>(idx)];
        }
        return s;
    };
    // potential kernel values used by both identities
    std::map<std::int64_t, double> a;
    auto A = [&](std::int64_t v) {
        auto it = a.find(v);
        if (it == a.end()) it = a.emplace(v, ker.potential(v).value).first;
        return it->second;
    };
    for (auto x : x_grid) {
        if (x < 1) throw error("check_ladd_identity: grid must be >= 1");
        double e_a = 0.0, mass = 0.0;
        for (std::int64_t w = 0; w < wmax; ++w) {
            double m = mu(x, w);
            mass += m;
            e_a += m * A(-w);
        }
        if (std::abs(mass - 1.0) > 1e-9)
            throw error("check_ladd_identity: hitting measure mass " + fmt_g17(mass));
        // E_x a(S_tau) = a(x) - V_d(x-1)/(2 EZ): the constant is pinned by
        // slope matching, a(x)/x -> 1/sigma^2 and EZ E[-Zhat_w] = sigma^2/2,
        // so c = E[-Zhat_w]/sigma^2 = 1/(2 EZ) with the weak renewal function.
        double rhs = A(x) - ld.V_d[static_cast<std::size_t>(x - 1)] / (2.0 * ez);
        rep.residual_ladd.push_back(e_a - rhs);

        // g_{(-inf,0]}(x,y) = g(x,y) - E_x g(S_tau, y), g(x,y)=a(x)+a(-y)-a(x-y)
        std::int64_t y = y_probe;
        double gxy = A(x) + A(-y) - A(x - y);
        double e_g = 0.0;
        for (std::int64_t w = 0; w < wmax; ++w) {
            double m = mu(x, w);
            e_g += m * (A(-w) + A(-y) - A(-w - y));
        }
        double lhs = (x >= 1 && y >= 1) ? ld.green_halfline(x - 1, y - 1) : 0.0;
        rep.residual_gg.push_back(lhs - (gxy - e_g));
    }
    return rep;
}

}  // namespace fluctlab
