#include "fluctlab/exit.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Dense>

#include "fluctlab/rng.hpp"
#include "fluctlab/util.hpp"

namespace fluctlab {

ExitSolution exit_upward(const StepDistribution& d, std::int64_t R, std::int64_t dense_limit) {
    ExitSolution s;
    s.R = R;
    IntervalGreen ig(d, R, dense_limit);
    s.p_up = ig.exit_up();
    s.residual = ig.max_residual();
    s.method = R <= dense_limit ? "dense-lu" : "toeplitz-bicgstab";
    return s;
}

double hit_before(const LadderData& ld, std::int64_t x, std::int64_t y) {
    if (x == y) return 1.0;
    double gyy = ld.green_halfline(y, y);
    if (gyy <= 0) throw error("hit_before: degenerate g(y,y)");
    return ld.green_halfline(x, y) / gyy;
}

std::pair<double, double> hit_before_absorbing(const StepDistribution& d, std::int64_t x,
                                               std::int64_t R, std::int64_t W,
                                               std::int64_t dense_limit) {
    if (!(x >= 0 && x <= W && R >= 0 && R <= W)) throw error("hit_before_absorbing: bad window");
    // states [0, W] minus the absorbing point R: relabel by skipping R
    const std::int64_t n = W;  // number of transient states
    auto idx = [&](std::int64_t s) { return s < R ? s : s - 1; };
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    if (W > dense_limit) throw error("hit_before_absorbing: dense budget exceeded");
    Eigen::MatrixXd A(n, n);
    for (std::int64_t i = 0; i <= W; ++i) {
        if (i == R) continue;
        for (std::int64_t j = 0; j <= W; ++j) {
            if (j == R) continue;
            A(idx(i), idx(j)) = (i == j ? 1.0 : 0.0) - d.pmf(j - i);
        }
        b[static_cast<std::size_t>(idx(i))] = d.pmf(R - i);  // one-step absorption at R
    }
    Eigen::Map<const Eigen::VectorXd> bv(b.data(), n);
    Eigen::VectorXd h = A.partialPivLu().solve(bv);
    // escape above W before absorption brackets the remaining probability
    std::vector<double> r(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i <= W; ++i)
        if (i != R) r[static_cast<std::size_t>(idx(i))] = d.tail_plus(W - i);
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n);
    Eigen::VectorXd e = A.partialPivLu().solve(rv);
    if (x == R) return {1.0, 1.0};
    double lo = h(idx(x));
    double esc = std::min(std::max(e(idx(x)), 0.0), 1.0);
    return {lo, std::min(lo + esc, 1.0)};
}

std::vector<double> exit_position(const StepDistribution& d, IntervalGreen& ig, std::int64_t x) {
    const std::int64_t R = ig.R();
    const auto& row = ig.row(x);
    double pup = ig.exit_up()[static_cast<std::size_t>(x)];
    if (pup <= 0) throw error("exit_position: upward exit has probability zero");
    std::vector<double> q(static_cast<std::size_t>(R) + 1);
    for (std::int64_t y = 0; y <= R; ++y)
        q[static_cast<std::size_t>(y)] =
            row[static_cast<std::size_t>(y)] * d.tail_plus(R - y) / pup;
    return q;
}

OvershootLaw overshoot_law(const StepDistribution& d, IntervalGreen& ig, std::int64_t x,
                           double tail_tol) {
    const std::int64_t R = ig.R();
    const auto& row = ig.row(x);
    double pup = ig.exit_up()[static_cast<std::size_t>(x)];
    if (pup <= 0) throw error("overshoot_law: upward exit has probability zero");
    OvershootLaw law;
    law.pmf.assign(1, 0.0);
    // power-type tails decay like 1/z, so a vanishing tail bound is not
    // reachable by enumeration; stop at z_cap and report the exact bound
    const std::int64_t z_cap = d.bounded() ? d.support_max() : std::max<std::int64_t>(8 * R, 8192);
    for (std::int64_t z = 1; z <= z_cap; ++z) {
        double mass = 0.0;
        for (std::int64_t y = 0; y <= R; ++y)
            mass += row[static_cast<std::size_t>(y)] * d.pmf(z + R - y);
        law.pmf.push_back(mass / pup);
        // conditional tail bound: sum_y g(x,y) P[X > z + R - y] / pup
        double tail = 0.0;
        for (std::int64_t y = 0; y <= R; ++y)
            tail += row[static_cast<std::size_t>(y)] * d.tail_plus(z + R - y);
        law.tail_bound = tail / pup;
        if (law.tail_bound < tail_tol) break;
    }
    return law;
}

double conditioned_hit(const LadderData& ld, std::int64_t x, std::int64_t y) {
    double vx = ld.V_d[static_cast<std::size_t>(x)];
    double vy = ld.V_d[static_cast<std::size_t>(y)];
    return vy / vx * hit_before(ld, x, y);
}

std::pair<double, double> idn_g_residual(const StepDistribution& d, const LadderData& ld,
                                         IntervalGreen& ig, std::int64_t x, std::int64_t y) {
    const std::int64_t R = ig.R();
    if (!(x >= 0 && x < R && y >= 0 && y < R)) throw error("idn_g_residual: need 0 <= x,y < R");
    // E_x[g_Omega(R + Z(R), y); Lambda_R] = sum_z P_x[S_sigma = R+z, Lambda] g(R+z, y)
    const auto& row = ig.row(x);
    double e_term = 0.0;
    double bound = 0.0;
    const std::int64_t zcap = ld.n() - R;
    double cum_beyond = 0.0;
    for (std::int64_t z = 1; z <= zcap; ++z) {
        double mass = 0.0;
        for (std::int64_t w = 0; w <= R; ++w)
            mass += row[static_cast<std::size_t>(w)] * d.pmf(z + R - w);
        if (mass == 0.0 && d.bounded() && z > d.support_max()) break;
        e_term += mass * ld.green_halfline(R + z, y);
        if (z == zcap)
            for (std::int64_t w = 0; w <= R; ++w)
                cum_beyond += row[static_cast<std::size_t>(w)] * d.tail_plus(z + R - w);
    }
    // beyond the ladder window: g_Omega(huge, y) <= g_Omega(y, y)
    bound += cum_beyond * ld.green_halfline(y, y);
    bound += (ld.z_defect + ld.zhat_defect) * ld.green_halfline(y, y) +
             std::abs(ld.bias_scale) * static_cast<double>(R) *
                 std::abs(ld.green_halfline(x, y));
    double residual = ig.value(x, y) + e_term - ld.green_halfline(x, y);
    return {residual, bound};
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

struct PathCounters {
    std::int64_t hits = 0;
    std::int64_t conditioning = 0;  // Lambda_R paths for conditional estimands
    std::int64_t cap_hits = 0;
};

// Chunked path runner: stream i = (seed, i); whole chunks are assigned to
// workers and the integer counters are summed in chunk order, so the result
// does not depend on the worker count.
template <typename PathFn>
PathCounters run_paths(std::int64_t n_paths, std::uint64_t seed, int threads, PathFn&& one_path) {
    const std::int64_t chunk = 8192;
    const std::int64_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<PathCounters> per_chunk(static_cast<std::size_t>(n_chunks));
    auto work = [&](int worker, int nworkers) {
        for (std::int64_t c = worker; c < n_chunks; c += nworkers) {
            PathCounters pc;
            std::int64_t lo = c * chunk, hi = std::min(n_paths, lo + chunk);
            for (std::int64_t i = lo; i < hi; ++i) {
                Rng rng(seed, static_cast<std::uint64_t>(i));
                one_path(rng, pc);
            }
            per_chunk[static_cast<std::size_t>(c)] = pc;
        }
    };
    int nw = std::max(threads, 1);
    if (nw == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> ts;
        for (int w = 0; w < nw; ++w) ts.emplace_back(work, w, nw);
        for (auto& t : ts) t.join();
    }
    PathCounters total;
    for (const auto& pc : per_chunk) {
        total.hits += pc.hits;
        total.conditioning += pc.conditioning;
        total.cap_hits += pc.cap_hits;
    }
    return total;
}

McEstimate finish(const PathCounters& t, std::int64_t n_paths, std::uint64_t seed,
                  bool conditional) {
    McEstimate est;
    est.n_paths = n_paths;
    est.seed = seed;
    est.layout = "chunk8192";
    est.cap_hits = t.cap_hits;
    est.n_conditioning = t.conditioning;
    double denom = conditional ? static_cast<double>(t.conditioning)
                               : static_cast<double>(n_paths);
    if (denom > 0) {
        double p = static_cast<double>(t.hits) / denom;
        est.estimate = p;
        est.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / denom);
    }
    return est;
}

}  // namespace

McEstimate mc_exit(const StepDistribution& d, std::int64_t R, std::int64_t x,
                   std::int64_t n_paths, std::uint64_t seed, McWhat what, std::int64_t y,
                   const McOptions& opts) {
    if (n_paths < 1000) throw error("mc_exit: need at least 1e3 paths");
    const bool conditional = (what == McWhat::overshoot_cdf || what == McWhat::exit_pos_low);
    auto total = run_paths(n_paths, seed, opts.threads, [&](Rng& rng, PathCounters& pc) {
        std::int64_t s = x;
        std::int64_t prev = x;
        for (std::int64_t step = 0;; ++step) {
            if (step >= opts.step_cap) {
                pc.cap_hits++;
                return;
            }
            if (what == McWhat::p_hit) {
                if (s == R) {
                    pc.hits++;
                    return;
                }
                if (s <= -1) return;
            } else {
                if (s > R) {  // upward exit; prev = S_{N(R)}, s - R = overshoot
                    pc.conditioning++;
                    switch (what) {
                        case McWhat::p_up:
                            pc.hits++;
                            break;
                        case McWhat::overshoot_cdf:
                            if (s - R <= y) pc.hits++;
                            break;
                        case McWhat::exit_pos_low:
                            if (prev <= y) pc.hits++;
                            break;
                        default:
                            break;
                    }
                    return;
                }
                if (s < 0) return;
            }
            prev = s;
            s += d.sample(rng);
        }
    });
    return finish(total, n_paths, seed, conditional);
}

McEstimate mc_conditioned_hit(const StepDistribution& d, const LadderData& ld, std::int64_t x,
                              std::int64_t y, std::int64_t n_paths, std::uint64_t seed,
                              const McOptions& opts) {
    if (!d.bounded())
        throw error("mc_conditioned_hit: per-state kernel tabulation needs bounded support");
    const std::int64_t jmin = d.support_min(), jmax = d.support_max();
    const std::int64_t n = ld.n();
    auto total = run_paths(n_paths, seed, opts.threads, [&](Rng& rng, PathCounters& pc) {
        std::int64_t s = x;
        for (std::int64_t step = 0;; ++step) {
            if (s == y) {
                pc.hits++;
                return;
            }
            if (step >= opts.step_cap || s + jmax >= n) {
                pc.cap_hits++;  // unresolved within the cap/window
                return;
            }
            // one step of the V_d-transformed kernel p(w-s) V_d(w)/V_d(s), w >= 0
            double u = rng.next_double() * ld.V_d[static_cast<std::size_t>(s)];
            double acc = 0.0;
            std::int64_t w = s + jmin;
            for (std::int64_t j = jmin; j <= jmax; ++j) {
                w = s + j;
                if (w < 0) continue;
                acc += d.pmf(j) * ld.V_d[static_cast<std::size_t>(w)];
                if (acc >= u) break;
            }
            s = std::max<std::int64_t>(w, 0);
        }
    });
    return finish(total, n_paths, seed, false);
}

}  // namespace fluctlab
