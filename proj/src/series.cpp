#include "fluctlab/series.hpp"

#include <algorithm>
#include <stdexcept>

#include "fluctlab/fft.hpp"

namespace fluctlab {

namespace {

constexpr std::size_t kLeaf = 128;

// Generic causal solver for u[k] = (acc[k] + sum_{j=1}^{k} g[j] u[k-j]) * scale(k)
// where acc accumulates cross-block convolution contributions.
struct CausalSolver {
    const std::vector<double>& g;
    std::vector<double>& u;
    std::vector<double>& acc;
    bool divide_by_k;  // true for exp-series (g[j] = j b[j], u[k] = .../k)

    void leaf(std::size_t l, std::size_t r) {
        for (std::size_t k = std::max<std::size_t>(l, 1); k < r; ++k) {
            double s = acc[k];
            const std::size_t jmax = std::min(k - l, g.size() - 1);
            for (std::size_t j = 1; j <= jmax; ++j) s += g[j] * u[k - j];
            u[k] = divide_by_k ? s / static_cast<double>(k) : s;
        }
    }

    // add u[l..m) * g into acc[m..r)
    void cross(std::size_t l, std::size_t m, std::size_t r) {
        const std::size_t glen = std::min(g.size(), r - l);
        if (glen <= 1) return;
        std::vector<double> a(u.begin() + l, u.begin() + m);
        std::vector<double> b(g.begin(), g.begin() + glen);
        auto c = convolve(a, b);  // c[t] corresponds to index l + t
        for (std::size_t k = m; k < r; ++k) {
            std::size_t t = k - l;
            if (t < c.size()) acc[k] += c[t];
        }
    }

    void solve(std::size_t l, std::size_t r) {
        if (r - l <= kLeaf) {
            leaf(l, r);
            return;
        }
        std::size_t m = l + (r - l) / 2;
        solve(l, m);
        cross(l, m, r);
        solve(m, r);
    }
};

}  // namespace

std::vector<double> exp_series(const std::vector<double>& b, std::size_t n) {
    std::vector<double> g(std::min(b.size(), n + 1), 0.0);
    for (std::size_t j = 1; j < g.size(); ++j) g[j] = static_cast<double>(j) * b[j];
    std::vector<double> u(n + 1, 0.0), acc(n + 1, 0.0);
    u[0] = 1.0;
    CausalSolver s{g, u, acc, true};
    s.solve(0, n + 1);
    return u;
}

std::vector<double> renewal_sequence(const std::vector<double>& pmf, std::size_t n) {
    if (!pmf.empty() && pmf[0] != 0.0)
        throw std::invalid_argument("renewal_sequence: pmf[0] must be 0");
    double mass = 0.0;
    for (double p : pmf) {
        if (p < -1e-12) throw std::invalid_argument("renewal_sequence: negative pmf entry");
        mass += p;
    }
    if (mass > 1.0 + 1e-9) throw std::invalid_argument("renewal_sequence: pmf mass exceeds 1");
    std::vector<double> u(n + 1, 0.0), acc(n + 1, 0.0);
    u[0] = 1.0;
    CausalSolver s{pmf, u, acc, false};
    s.solve(0, n + 1);
    return u;
}

}  // namespace fluctlab
