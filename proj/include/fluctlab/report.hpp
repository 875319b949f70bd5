#pragma once

#include <string>
#include <vector>

namespace fluctlab {

// Ratio table for one asymptotic claim on a geometric grid, with a
// trend verdict. "converging" requires the decade-averaged |ratio - 1| to
// improve strictly across the last three grid decades; a single-x equality is
// never asserted.
struct ConvergenceReport {
    std::string formula_id;
    std::vector<double> grid;
    std::vector<double> exact;
    std::vector<double> predicted;
    std::vector<double> ratio;
    std::vector<double> bound;  // per-point numeric error bound (may be empty)
    double trend_stat = 0.0;    // log-log slope of |ratio-1| over the last 3 decades
    std::string verdict;        // converging | flat | diverging | inconclusive
    std::string note;
    bool applicable = true;

    void finalize();  // fills ratio (if empty), trend_stat and verdict
};

}  // namespace fluctlab
