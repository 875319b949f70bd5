#include "fluctlab/stepdist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fluctlab/util.hpp"

namespace fluctlab {

double TailSide::T(double x) const {
    switch (kind) {
        case TailKind::none:
            return 0.0;
        case TailKind::power:
            return weight * std::pow(x, -alpha);
        case TailKind::power_log:
            return weight / (x * std::pow(std::log(x + M_E), log_power));
    }
    return 0.0;
}

TermSum TailSide::terms() const {
    switch (kind) {
        case TailKind::none:
            return {};
        case TailKind::power:
            return TermSum::power(weight, alpha);
        case TailKind::power_log:
            return TermSum::power_log(weight, 1.0, log_power);
    }
    return {};
}

StepDistribution::StepDistribution(std::vector<std::pair<std::int64_t, double>> atoms,
                                   TailSide pos, TailSide neg, DistTags tags)
    : atoms_(std::move(atoms)), pos_(pos), neg_(neg), tags_(std::move(tags)) {
    std::sort(atoms_.begin(), atoms_.end());
    for (auto& [x, p] : atoms_) {
        if (p < -1e-15) throw error("StepDistribution: negative atom at " + std::to_string(x));
        if (p < 0) p = 0;
        atom_mass_ += p;
    }
    if (!atoms_.empty()) {
        core_min_ = atoms_.front().first;
        core_max_ = atoms_.back().first;
    }
    if (pos_.present() || neg_.present()) {
        if (core_min_ < -1 || core_max_ > 1)
            throw error("StepDistribution: parametric tails require atoms within {-1,0,1}");
    }
    double total = atom_mass_;
    if (pos_.present()) total += pos_.T(1.0);
    if (neg_.present()) total += neg_.T(1.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw error("StepDistribution: total mass " + fmt_g17(total));
    atom_cdf_.reserve(atoms_.size());
    double acc = neg_.present() ? neg_.T(1.0) : 0.0;
    for (auto& [x, p] : atoms_) {
        acc += p;
        atom_cdf_.push_back(acc);
    }
    // irreducibility / periodicity from the gcd of support differences; the
    // span is recorded as a flag (srw has span 2 and is perfectly usable)
    std::int64_t g = 0;
    std::int64_t prev = 0;
    bool first = true;
    bool has_pos = pos_.present(), has_neg = neg_.present();
    for (auto& [x, p] : atoms_) {
        if (p <= 0) continue;
        if (x > 0) has_pos = true;
        if (x < 0) has_neg = true;
        if (!first) g = std::gcd(g, x - prev);
        prev = x;
        first = false;
    }
    if (pos_.present() || neg_.present()) g = 1;  // tails occupy consecutive sites
    tags_.lattice_span = g == 0 ? 1 : g;
    if (!has_pos || !has_neg) throw error("StepDistribution: support must extend to both signs");
}

StepDistribution::StepDistribution(const StepDistribution& o)
    : atoms_(o.atoms_),
      core_min_(o.core_min_),
      core_max_(o.core_max_),
      pos_(o.pos_),
      neg_(o.neg_),
      tags_(o.tags_),
      rational_(o.rational_),
      atom_mass_(o.atom_mass_),
      atom_cdf_(o.atom_cdf_) {}

double StepDistribution::pmf(std::int64_t x) const {
    if (x >= tail_start() && pos_.present())
        return pos_.T(static_cast<double>(x - 1)) - pos_.T(static_cast<double>(x));
    if (x <= -tail_start() && neg_.present())
        return neg_.T(static_cast<double>(-x - 1)) - neg_.T(static_cast<double>(-x));
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const auto& a, std::int64_t v) { return a.first < v; });
    if (it != atoms_.end() && it->first == x) return it->second;
    return 0.0;
}

double StepDistribution::tail_contrib(const TailSide& s, std::int64_t x) const {
    if (!s.present()) return 0.0;
    return s.T(static_cast<double>(std::max<std::int64_t>(x, 1)));
}

double StepDistribution::tail_plus(std::int64_t x) const {
    if (x < 0) throw error("tail_plus: x must be >= 0");
    double v = tail_contrib(pos_, x);
    for (auto it = atoms_.rbegin(); it != atoms_.rend() && it->first > x; ++it) v += it->second;
    return v;
}

double StepDistribution::tail_minus(std::int64_t x) const {
    if (x < 0) throw error("tail_minus: x must be >= 0");
    // The stored side function is the strict tail T-(y) = P[X < -y], so
    // P[X <= -x] picks it up at x-1.
    double v = tail_contrib(neg_, x - 1);
    for (auto it = atoms_.begin(); it != atoms_.end() && it->first <= -x; ++it) v += it->second;
    return v;
}

double StepDistribution::truncated_mean_A(std::int64_t x) const {
    if (x < 0) throw error("truncated_mean_A: x must be >= 0");
    std::lock_guard<std::mutex> lock(a_mutex_);
    if (a_prefix_.empty()) a_prefix_.push_back(0.0);
    while (static_cast<std::int64_t>(a_prefix_.size()) <= x) {
        std::int64_t k = static_cast<std::int64_t>(a_prefix_.size()) - 1;
        a_prefix_.push_back(a_prefix_.back() + tail_plus(k) - tail_minus(k + 1));
    }
    return a_prefix_[static_cast<std::size_t>(x)];
}

std::vector<double> StepDistribution::A_table(std::int64_t xmax) const {
    std::vector<double> out(static_cast<std::size_t>(xmax) + 1);
    truncated_mean_A(xmax);
    std::lock_guard<std::mutex> lock(a_mutex_);
    std::copy(a_prefix_.begin(), a_prefix_.begin() + xmax + 1, out.begin());
    return out;
}

namespace {

// Smallest integer x >= 2 with w*psi(x) < v, for monotone decreasing psi.
std::int64_t invert_tail(const TailSide& s, double v) {
    double guess;
    if (s.kind == TailKind::power) {
        guess = std::pow(s.weight / v, 1.0 / s.alpha);
    } else {
        double x = s.weight / v;
        for (int i = 0; i < 48; ++i) {
            double nx = s.weight / (v * std::pow(std::log(x + M_E), s.log_power));
            if (std::abs(nx - x) <= 0.25) {
                x = nx;
                break;
            }
            x = nx;
        }
        guess = x;
    }
    std::int64_t x = std::max<std::int64_t>(2, static_cast<std::int64_t>(guess) - 2);
    int steps = 0;
    while (s.T(static_cast<double>(x)) >= v && steps < 64) {
        ++x;
        ++steps;
    }
    if (steps >= 64) {
        std::int64_t lo = x, hi = x;
        while (s.T(static_cast<double>(hi)) >= v) {
            lo = hi;
            hi *= 2;
        }
        while (lo + 1 < hi) {
            std::int64_t mid = lo + (hi - lo) / 2;
            (s.T(static_cast<double>(mid)) >= v ? lo : hi) = mid;
        }
        x = hi;
    }
    while (x > 2 && s.T(static_cast<double>(x - 1)) < v) --x;
    return x;
}

}  // namespace

std::int64_t StepDistribution::sample(Rng& rng) const {
    const double mneg = neg_.present() ? neg_.T(1.0) : 0.0;
    for (;;) {
        double u = rng.next_double();
        if (u < mneg) {
            double v = mneg - u;  // uniform in (0, mneg]
            if (v <= 0) continue;
            return -invert_tail(neg_, v);
        }
        if (!atom_cdf_.empty() && u < atom_cdf_.back()) {
            std::size_t i =
                std::lower_bound(atom_cdf_.begin(), atom_cdf_.end(), u) - atom_cdf_.begin();
            // skip over zero-mass atoms that share a cdf value
            while (i < atoms_.size() && atoms_[i].second == 0.0) ++i;
            if (i < atoms_.size()) return atoms_[i].first;
            continue;
        }
        if (pos_.present()) {
            double v = 1.0 - u;  // uniform in (0, T_pos(1)]
            if (v <= 0 || v > pos_.T(1.0)) continue;
            return invert_tail(pos_, v);
        }
        // numeric edge: u landed in roundoff gap; redraw
    }
}

double StepDistribution::mean() const {
    if (!tags_.mean_finite) throw applicability_error("mean: E|X| is infinite for this builder");
    double m = 0.0;
    for (auto& [x, p] : atoms_) m += static_cast<double>(x) * p;
    // tail first moment: sum_{x>=2} x [T(x-1)-T(x)] = T(1) + sum_{x>=1} T(x)
    if (pos_.present()) m += pos_.T(1.0) + em_tail_sum(pos_.terms(), 1);
    if (neg_.present()) m -= neg_.T(1.0) + em_tail_sum(neg_.terms(), 1);
    return m;
}

double StepDistribution::mass_check() const {
    double total = atom_mass_;
    if (pos_.present()) total += pos_.T(1.0);
    if (neg_.present()) total += neg_.T(1.0);
    return total;
}

std::vector<double> StepDistribution::pmf_window(std::int64_t w) const {
    std::vector<double> out(static_cast<std::size_t>(2 * w + 1), 0.0);
    for (auto& [x, p] : atoms_)
        if (std::llabs(x) <= w) out[static_cast<std::size_t>(x + w)] = p;
    if (pos_.present()) {
        double prev = pos_.T(1.0);
        for (std::int64_t x = tail_start(); x <= w; ++x) {
            double cur = pos_.T(static_cast<double>(x));
            out[static_cast<std::size_t>(x + w)] = prev - cur;
            prev = cur;
        }
    }
    if (neg_.present()) {
        double prev = neg_.T(1.0);
        for (std::int64_t x = tail_start(); x <= w; ++x) {
            double cur = neg_.T(static_cast<double>(x));
            out[static_cast<std::size_t>(w - x)] = prev - cur;
            prev = cur;
        }
    }
    return out;
}

std::complex<double> StepDistribution::char_fn(double theta) const {
    if (theta == 0.0) return {1.0, 0.0};
    const std::complex<double> I(0.0, 1.0);
    std::complex<double> v(0.0, 0.0);
    for (auto& [x, p] : atoms_) v += p * std::exp(I * (static_cast<double>(x) * theta));
    // sum_{x>=2} [T(x-1)-T(x)] e^{+-i x theta}
    //   = T(1) e^{+-2 i theta} + (e^{+-i theta} - 1) sum_{x>=2} T(x) e^{+-i x theta}
    if (pos_.present()) {
        auto s2 = oscillatory_tail_sum(pos_.terms(), 2, theta);
        v += pos_.T(1.0) * std::exp(I * (2.0 * theta)) + (std::exp(I * theta) - 1.0) * s2;
    }
    if (neg_.present()) {
        auto s2 = oscillatory_tail_sum(neg_.terms(), 2, -theta);
        v += neg_.T(1.0) * std::exp(-I * (2.0 * theta)) + (std::exp(-I * theta) - 1.0) * s2;
    }
    return v;
}

std::string StepDistribution::spec_string() const {
    std::ostringstream os;
    os << "family=" << tags_.family;
    if (tags_.family == "lazy_srw") {
        double h = 0;
        for (auto& [x, p] : atoms_)
            if (x == 0) h = p;
        os << " hold=" << fmt_g17(h);
    } else if (tags_.family == "zipf_pair" || tags_.family == "log_regular") {
        os << " p=" << fmt_g17(tags_.p) << " q=" << fmt_g17(tags_.q);
    } else if (tags_.family == "stable_like") {
        os << " alpha=" << fmt_g17(tags_.alpha) << " p=" << fmt_g17(tags_.p)
           << " q=" << fmt_g17(tags_.q);
    } else if (tags_.family == "finite") {
        os << " atoms={";
        bool first = true;
        for (auto& [x, p] : atoms_) {
            if (!first) os << ",";
            os << x << ":" << fmt_g17(p);
            first = false;
        }
        os << "}";
    }
    return os.str();
}

std::uint64_t StepDistribution::hash() const { return fnv1a64(spec_string()); }

// ---------------------------------------------------------------------------
// Builders

StepDistribution srw() {
    DistTags t;
    t.family = "srw";
    t.symmetric = t.bounded = t.mean_zero = t.mean_finite = true;
    t.recurrence_class = +1;
    t.rho = 0.5;
    StepDistribution d({{-1, 0.5}, {1, 0.5}}, {}, {}, t);
    d.set_rational_table({{-1, {1, 2}}, {1, {1, 2}}});
    return d;
}

StepDistribution lazy_srw(double hold_prob) {
    if (!(hold_prob > 0.0 && hold_prob < 1.0)) throw error("lazy_srw: hold_prob in (0,1)");
    DistTags t;
    t.family = "lazy_srw";
    t.symmetric = t.bounded = t.mean_zero = t.mean_finite = true;
    t.recurrence_class = +1;
    t.rho = 0.5;
    double side = (1.0 - hold_prob) / 2.0;
    return StepDistribution({{-1, side}, {0, hold_prob}, {1, side}}, {}, {}, t);
}

StepDistribution finite(const std::map<std::int64_t, double>& table) {
    DistTags t;
    t.family = "finite";
    t.bounded = t.mean_finite = true;
    std::vector<std::pair<std::int64_t, double>> atoms(table.begin(), table.end());
    double mean = 0.0;
    bool sym = true;
    for (auto& [x, p] : atoms) {
        mean += static_cast<double>(x) * p;
        auto it = table.find(-x);
        if (it == table.end() || std::abs(it->second - p) > 1e-15) sym = false;
    }
    t.symmetric = sym;
    t.mean_zero = std::abs(mean) < 1e-12;
    t.recurrence_class = t.mean_zero ? +1 : -1;
    return StepDistribution(std::move(atoms), {}, {}, t);
}

StepDistribution finite_rational(
    const std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>>& table) {
    std::map<std::int64_t, double> dt;
    for (auto& [x, f] : table) dt[x] = static_cast<double>(f.first) / static_cast<double>(f.second);
    StepDistribution d = finite(dt);
    std::vector<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>> rt(table.begin(),
                                                                                   table.end());
    d.set_rational_table(std::move(rt));
    return d;
}

StepDistribution zipf_pair(double p, double q) {
    if (!(p >= 0 && q >= 0 && p + q > 0 && p + q <= 1.0 + 1e-15))
        throw error("zipf_pair: need p,q >= 0, 0 < p+q <= 1");
    DistTags t;
    t.family = "zipf_pair";
    t.p = p;
    t.q = q;
    t.alpha = 1.0;
    t.symmetric = (p == q);
    t.mean_finite = false;
    t.rs_class = p < q ? -1 : (p > q ? +1 : 0);
    t.recurrence_class = (p == q) ? +1 : -1;
    if (p == q) t.rho = 0.5;
    TailSide pos{p > 0 ? TailKind::power : TailKind::none, p, 1.0, 0};
    TailSide neg{q > 0 ? TailKind::power : TailKind::none, q, 1.0, 0};
    std::vector<std::pair<std::int64_t, double>> atoms;
    if (1.0 - p - q > 0) atoms.push_back({0, 1.0 - p - q});
    return StepDistribution(std::move(atoms), pos, neg, t);
}

namespace {

// Shared scheme for the mean-corrected builders: side tails w+- * psi with the
// {-1, 0, +1} atoms absorbing normalisation and forcing EX = 0 exactly.
StepDistribution corrected_builder(DistTags t, TailKind kind, double alpha, int log_power,
                                   double p, double q) {
    TailSide proto{kind, 1.0, alpha, log_power};
    const double psi1 = proto.T(1.0);
    // first moment of one side's tail block per unit weight
    const double m_t = psi1 + em_tail_sum(proto.terms(), 1);
    const double kappa = 1.0 / (2.0 * ((p + q) * psi1 + std::abs(p - q) * m_t));
    const double wp = kappa * p, wq = kappa * q;
    const double delta = -(wp - wq) * m_t;  // a1 - a(-1)
    const double S = 1.0 - (wp + wq) * psi1;
    double a1 = std::max(delta, 0.0), am1 = std::max(-delta, 0.0);
    double a0 = S - a1 - am1;
    TailSide pos{wp > 0 ? kind : TailKind::none, wp, alpha, log_power};
    TailSide neg{wq > 0 ? kind : TailKind::none, wq, alpha, log_power};
    std::vector<std::pair<std::int64_t, double>> atoms;
    if (am1 > 0) atoms.push_back({-1, am1});
    if (a0 > 0) atoms.push_back({0, a0});
    if (a1 > 0) atoms.push_back({1, a1});
    t.mean_zero = true;
    t.mean_finite = true;
    return StepDistribution(std::move(atoms), pos, neg, t);
}

}  // namespace

StepDistribution stable_like(double alpha, double p, double q) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw error("stable_like: need 1 < alpha < 2");
    if (!(p >= 0 && q >= 0 && p + q > 0)) throw error("stable_like: need p,q >= 0, p+q > 0");
    DistTags t;
    t.family = "stable_like";
    t.p = p;
    t.q = q;
    t.alpha = alpha;
    t.symmetric = (p == q);
    t.rs_class = 0;  // A(x)/xH(x) has a finite limit for 1 < alpha < 2, EX = 0
    t.recurrence_class = +1;
    if (p == q) t.rho = 0.5;
    return corrected_builder(t, TailKind::power, alpha, 0, p, q);
}

StepDistribution log_regular(double p, double q) {
    if (!(p >= 0 && q >= 0 && p + q > 0)) throw error("log_regular: need p,q >= 0, p+q > 0");
    DistTags t;
    t.family = "log_regular";
    t.p = p;
    t.q = q;
    t.alpha = 1.0;
    t.symmetric = (p == q);
    // EX = 0 with E|X| < inf: A(x) = int_x^inf [P(X<=-t) - P(X>t)] dt, so the
    // heavier POSITIVE tail drives A negative (negative relative stability) --
    // the opposite of the infinite-mean zipf_pair case.
    t.rs_class = p > q ? -1 : (p < q ? +1 : 0);
    t.recurrence_class = +1;
    if (p == q) t.rho = 0.5;
    return corrected_builder(t, TailKind::power_log, 1.0, 2, p, q);
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

double parse_number(const std::string& v) {
    auto slash = v.find('/');
    if (slash != std::string::npos)
        return std::stod(v.substr(0, slash)) / std::stod(v.substr(slash + 1));
    return std::stod(v);
}

}  // namespace

StepDistribution parse_dist_spec(const std::string& text) {
    std::map<std::string, std::string> kv;
    // strip comments, collapse whitespace around '=' so "k = v" parses
    std::string clean;
    bool in_comment = false;
    for (char c : text) {
        if (c == '\n') in_comment = false;
        if (in_comment) continue;
        if (c == '#') {
            in_comment = true;
            continue;
        }
        if (c == '=') {
            while (!clean.empty() && std::isspace(static_cast<unsigned char>(clean.back())))
                clean.pop_back();
            clean.push_back('=');
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c)) && !clean.empty() && clean.back() == '=')
            continue;
        clean.push_back(c);
    }
    std::string cur;
    std::vector<std::string> toks;
    auto flush = [&]() {
        if (!cur.empty()) {
            toks.push_back(cur);
            cur.clear();
        }
    };
    bool in_brace = false;
    for (char c : clean) {
        if (c == '{') in_brace = true;
        if (c == '}') in_brace = false;
        if (!in_brace && (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';')) {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    for (auto& tok : toks) {
        if (tok.front() == '[') continue;  // section header
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw error("dist spec: expected key=value, got '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto need = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw error("dist spec: missing key '" + k + "'");
        return it->second;
    };
    std::string family = need("family");
    if (family == "srw") return srw();
    if (family == "lazy_srw") return lazy_srw(parse_number(need("hold")));
    if (family == "zipf_pair") return zipf_pair(parse_number(need("p")), parse_number(need("q")));
    if (family == "stable_like")
        return stable_like(parse_number(need("alpha")), parse_number(need("p")),
                           parse_number(need("q")));
    if (family == "log_regular")
        return log_regular(parse_number(need("p")), parse_number(need("q")));
    if (family == "finite") {
        std::string body = need("atoms");
        if (body.size() < 2 || body.front() != '{' || body.back() != '}')
            throw error("dist spec: atoms={x:p,...}");
        body = body.substr(1, body.size() - 2);
        std::map<std::int64_t, double> table;
        std::istringstream is(body);
        std::string item;
        while (std::getline(is, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos) throw error("dist spec: atom entry '" + item + "'");
            table[std::stoll(item.substr(0, colon))] = parse_number(item.substr(colon + 1));
        }
        return finite(table);
    }
    throw error("dist spec: unknown family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Diagnostics

RsDiagnostic rs_diagnostic(const StepDistribution& d, const std::vector<std::int64_t>& grid) {
    RsDiagnostic r;
    r.grid = grid;
    for (auto x : grid) {
        if (x < 1) throw error("rs_diagnostic: grid values must be >= 1");
        double h = d.H(x);
        if (h <= 0.0) {
            r.verdict = "degenerate";
            r.note = "bounded support: relative-stability diagnostic degenerate";
            return r;
        }
        r.ratio.push_back(d.truncated_mean_A(x) / (static_cast<double>(x) * h));
    }
    // monotonicity of |ratio| over the trailing three decades of the grid
    double top = static_cast<double>(r.grid.back());
    std::vector<double> window;
    std::vector<double> sgn;
    for (std::size_t i = 0; i < r.grid.size(); ++i)
        if (static_cast<double>(r.grid[i]) >= top / 1000.0) {
            window.push_back(std::abs(r.ratio[i]));
            sgn.push_back(r.ratio[i]);
        }
    bool increasing = window.size() >= 2;
    for (std::size_t i = 1; i < window.size(); ++i)
        if (window[i] <= window[i - 1]) increasing = false;
    bool all_neg = std::all_of(sgn.begin(), sgn.end(), [](double v) { return v < 0; });
    bool all_pos = std::all_of(sgn.begin(), sgn.end(), [](double v) { return v > 0; });
    if (increasing && all_neg)
        r.verdict = "nrs-trend";
    else if (increasing && all_pos)
        r.verdict = "prs-trend";
    else
        r.verdict = "inconclusive";
    return r;
}

RecurrenceDiagnostic recurrence_diagnostic(const StepDistribution& d, std::int64_t x_max) {
    if (x_max < 1000) throw error("recurrence_diagnostic: x_max must be >= 1000");
    RecurrenceDiagnostic r;
    r.note = "numeric partial integrals with extrapolated tail; heuristic, not a proof";
    if (d.bounded()) {
        double m = d.mean();
        r.verdict = std::abs(m) < 1e-12 ? "recurrent-trend" : "transient-trend";
        r.note += "; bounded support classified by mean";
        return r;
    }
    // integrand f(t) = H(t) / A(t)^2 on a geometric grid
    std::vector<double> ts, fs;
    for (double t = 16; t <= static_cast<double>(x_max); t *= 1.25) {
        auto ti = static_cast<std::int64_t>(t);
        double a = d.truncated_mean_A(ti);
        if (a == 0.0) {
            r.verdict = "recurrent-trend";
            r.note += "; A(x) = 0 (symmetric tails)";
            return r;
        }
        ts.push_back(static_cast<double>(ti));
        fs.push_back(d.H(ti) / (a * a));
    }
    double partial = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i)
        partial += 0.5 * (fs[i] + fs[i - 1]) * (ts[i] - ts[i - 1]);
    r.partial_integral = partial;
    // local log-log slope at the top
    std::size_t n = ts.size();
    double sigma = std::log(fs[n - 1] / fs[n - 5]) / std::log(ts[n - 1] / ts[n - 5]);
    if (sigma < -1.1) {
        r.verdict = "transient-trend";
        r.tail_estimate = fs[n - 1] * ts[n - 1] / (-1.0 - sigma);
    } else if (sigma > -0.9) {
        r.verdict = "recurrent-trend";
        r.tail_estimate = std::numeric_limits<double>::infinity();
    } else {
        // near 1/t: decide by slope of log(t f(t)) against log log t
        double tau = std::log((ts[n - 1] * fs[n - 1]) / (ts[n - 5] * fs[n - 5])) /
                     std::log(std::log(ts[n - 1]) / std::log(ts[n - 5]));
        if (tau < -1.05) {
            r.verdict = "transient-trend";
            double lg = std::log(ts[n - 1]);
            r.tail_estimate = ts[n - 1] * fs[n - 1] * lg / (-tau - 1.0);
        } else if (tau > -0.95) {
            r.verdict = "recurrent-trend";
            r.tail_estimate = std::numeric_limits<double>::infinity();
        } else {
            r.verdict = "inconclusive";
        }
    }
    return r;
}

}  // namespace fluctlab
