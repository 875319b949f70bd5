#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fluctlab/ladder.hpp"
#include "fluctlab/report.hpp"
#include "fluctlab/stepdist.hpp"

namespace fluctlab {

// "1e2:1e5:geometric[:pts_per_decade]", "a:b:linear:n" or "10,100,1000".
std::vector<std::int64_t> parse_grid(const std::string& spec);

// File-backed JSON cache keyed by a canonical string; directory from
// FLUCTLAB_CACHE (empty -> disabled). Stored doubles round-trip exactly, so
// cached reuse reproduces downstream bytes.
class Cache {
  public:
    explicit Cache(std::string dir) : dir_(std::move(dir)) {}
    bool enabled() const { return !dir_.empty(); }
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& json_text) const;

  private:
    std::string dir_;
};

std::string default_cache_dir();  // $FLUCTLAB_CACHE or ""
int default_threads();            // $FLUCTLAB_THREADS or 1

// Ladder computation with transparent caching.
LadderData compute_ladder_cached(const StepDistribution& d, const LadderOptions& opts,
                                 const Cache& cache);

// Exact P_x(Lambda_R) column with caching (dense or matrix-free solve).
std::vector<double> exit_up_cached(const StepDistribution& d, std::int64_t R, const Cache& cache,
                                   std::int64_t dense_limit = 2600);

void write_report_csv(const ConvergenceReport& rep, const std::string& path);
std::string report_summary_json(const ConvergenceReport& rep);
void write_text_file(const std::string& path, const std::string& text);

// Command entry points used by the CLI; each returns the process exit code.
struct CommonArgs {
    std::string dist_spec;
    std::string out;
    std::uint64_t seed = 42;
    int threads = 1;
    std::string cache_dir;
};
int run_ladder_cmd(const CommonArgs& c, std::int64_t N, double tol, int grid_log2,
                   std::ostream& log);
int run_green_cmd(const CommonArgs& c, const std::string& mode, std::int64_t R,
                  std::int64_t window, std::ostream& log);
int run_exit_cmd(const CommonArgs& c, std::int64_t R, std::int64_t x,
                 const std::vector<std::string>& what, std::int64_t mc_paths, std::ostream& log);
int run_verify_cmd(const CommonArgs& c, const std::string& formula, const std::string& grid_spec,
                   std::int64_t N, int grid_log2, std::ostream& log);
int run_mc_cmd(const CommonArgs& c, std::int64_t R, std::int64_t x, const std::string& estimand,
               std::int64_t y, std::int64_t n_paths, std::ostream& log);

// Acceptance suite.
struct SuiteOptions {
    bool quick = false;  // reduced grids for smoke runs
    std::int64_t mc_paths = 1000000;
    std::uint64_t seed = 42;
    int threads = 1;
    int grid_log2 = 23;
    std::string cache_dir;
};
struct CriterionResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};
struct SuiteResult {
    std::vector<CriterionResult> items;
    bool all_pass = true;
};
SuiteResult run_suite(const SuiteOptions& opts, const std::string& out_dir, std::ostream& log);

}  // namespace fluctlab
