#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fluctlab/rng.hpp"
#include "fluctlab/termsum.hpp"

namespace fluctlab {

enum class TailKind { none, power, power_log };

// One side of a parametric tail: T(x) = weight * psi(x) for x >= 1, with the
// lattice pmf given by consecutive differences from tail_start() = 2 upward.
struct TailSide {
    TailKind kind = TailKind::none;
    double weight = 0.0;
    double alpha = 1.0;   // psi(x) = x^-alpha            (power)
    int log_power = 0;    // psi(x) = x^-1 log(x+e)^-lp   (power_log)

    bool present() const { return kind != TailKind::none && weight > 0.0; }
    double T(double x) const;
    TermSum terms() const;  // weight * psi as a TermSum
};

// Classification metadata the builders can assert a priori. Used by the
// asymptotics module to gate formula applicability.
struct DistTags {
    std::string family;
    double p = 0.0, q = 0.0, alpha = 0.0;
    bool symmetric = false;
    bool bounded = false;
    bool mean_zero = false;
    bool mean_finite = false;
    int rs_class = 0;          // +1 positively relatively stable trend, -1 negative, 0 neither
    int recurrence_class = 0;  // +1 recurrent, -1 transient, 0 unknown
    std::optional<double> rho;  // known only in symmetric stable-type cases
    std::int64_t lattice_span = 1;  // gcd of support differences (2 for srw)
};

// Immutable integer step distribution: small atom table plus optional
// closed-form two-sided tails. All tail functionals are exact (telescoping
// sums of T), so identities hold to full double precision.
class StepDistribution {
  public:
    StepDistribution(std::vector<std::pair<std::int64_t, double>> atoms, TailSide pos,
                     TailSide neg, DistTags tags);
    StepDistribution(const StepDistribution& other);
    StepDistribution& operator=(const StepDistribution&) = delete;

    double pmf(std::int64_t x) const;
    // P[X > x] for x >= 0.
    double tail_plus(std::int64_t x) const;
    // P[X <= -x] for x >= 0 (beware: at x = 0 this includes the atom at 0,
    // matching the right-continuous distribution-function convention; getting
    // this wrong corrupts truncated_mean_A).
    double tail_minus(std::int64_t x) const;
    // H(x) = P[|X| > x] = tail_plus(x) + P[X < -x].
    double H(std::int64_t x) const { return tail_plus(x) + tail_minus(x + 1); }
    // A(x) = int_0^x [P(X > t) - P(X <= -t)] dt rendered exactly on the
    // lattice: sum_{k=0}^{x-1} [tail_plus(k) - tail_minus(k+1)]. The negative
    // side enters with tail_minus(k+1) = P[X < -k] because the distribution
    // function is right-continuous; using tail_minus(k) would count the atom
    // at -k on a set of measure zero and break A == 0 for symmetric laws.
    double truncated_mean_A(std::int64_t x) const;
    std::vector<double> A_table(std::int64_t xmax) const;

    std::int64_t sample(Rng& rng) const;

    double mean() const;  // exact; throws applicability_error when E|X| = inf
    double mass_check() const;

    bool bounded() const { return !pos_.present() && !neg_.present(); }
    std::int64_t support_min() const { return core_min_; }
    std::int64_t support_max() const { return core_max_; }
    static constexpr int tail_start() { return 2; }
    const TailSide& tail_pos() const { return pos_; }
    const TailSide& tail_neg() const { return neg_; }
    const DistTags& tags() const { return tags_; }

    std::vector<double> pmf_window(std::int64_t w) const;  // index x + w
    std::complex<double> char_fn(double theta) const;

    std::string spec_string() const;
    std::uint64_t hash() const;

    bool has_rational_table() const { return !rational_.empty(); }
    const std::vector<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>>&
    rational_table() const {
        return rational_;
    }
    void set_rational_table(
        std::vector<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>> t) {
        rational_ = std::move(t);
    }

  private:
    std::vector<std::pair<std::int64_t, double>> atoms_;  // sorted by position
    std::int64_t core_min_ = 0, core_max_ = 0;
    TailSide pos_, neg_;
    DistTags tags_;
    std::vector<std::pair<std::int64_t, std::pair<std::int64_t, std::int64_t>>> rational_;
    double atom_mass_ = 0.0;
    // cumulative atom mass for sampling
    std::vector<double> atom_cdf_;
    mutable std::mutex a_mutex_;
    mutable std::vector<double> a_prefix_;  // A(x) cache

    double tail_contrib(const TailSide& s, std::int64_t x) const;
};

// Builders.
StepDistribution srw();
StepDistribution lazy_srw(double hold_prob);
StepDistribution finite(const std::map<std::int64_t, double>& table);
// Exact-rational bounded table (numerator/denominator pairs).
StepDistribution finite_rational(
    const std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>>& table);
// Two-sided tails ~ p/x and q/x (alpha = 1, E|X| = inf).
StepDistribution zipf_pair(double p, double q);
// Two-sided tails ~ w x^-alpha, 1 < alpha < 2, mean-corrected to EX = 0.
StepDistribution stable_like(double alpha, double p, double q);
// Two-sided tails ~ c / (x log^2(x+e)), EX = 0 exactly, sigma^2 = inf.
StepDistribution log_regular(double p, double q);

// Parse "family=zipf_pair p=0.3 q=0.7" (also accepts ',' or ';' separators,
// '#' comments and [section] headers from config files).
StepDistribution parse_dist_spec(const std::string& text);

struct RsDiagnostic {
    std::vector<std::int64_t> grid;
    std::vector<double> ratio;  // A(x) / (x H(x))
    std::string verdict;        // prs-trend | nrs-trend | inconclusive | degenerate
    std::string note;
};
RsDiagnostic rs_diagnostic(const StepDistribution& d, const std::vector<std::int64_t>& grid);

struct RecurrenceDiagnostic {
    double partial_integral = 0.0;
    double tail_estimate = 0.0;
    std::string verdict;  // recurrent-trend | transient-trend | inconclusive
    std::string note;     // heuristic, not a proof
};
RecurrenceDiagnostic recurrence_diagnostic(const StepDistribution& d, std::int64_t x_max);

}  // namespace fluctlab
