#include "fluctlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fluctlab {

void ConvergenceReport::finalize() {
    if (!applicable) {
        if (verdict.empty()) verdict = "inconclusive";
        return;
    }
    if (ratio.empty() && exact.size() == predicted.size()) {
        ratio.resize(exact.size());
        for (std::size_t i = 0; i < exact.size(); ++i)
            ratio[i] = predicted[i] != 0.0 ? exact[i] / predicted[i]
                                           : std::numeric_limits<double>::quiet_NaN();
    }
    if (grid.empty() || ratio.size() != grid.size()) {
        verdict = "inconclusive";
        return;
    }
    const double top = *std::max_element(grid.begin(), grid.end());
    // decade-averaged log |ratio - 1|: bin k holds (top/10^{k+1}, top/10^k]
    double dec_mean[3] = {0, 0, 0};
    int dec_cnt[3] = {0, 0, 0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int npts = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0) || !std::isfinite(ratio[i])) continue;
        double rel = std::max(std::abs(ratio[i] - 1.0), 1e-300);
        int dec = static_cast<int>(std::floor(std::log10(top / grid[i]) + 1e-9));
        if (dec >= 0 && dec < 3) {
            dec_mean[dec] += std::log(rel);
            dec_cnt[dec]++;
            double lx = std::log(grid[i]), ly = std::log(rel);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++npts;
        }
    }
    if (npts >= 2 && sxx * npts - sx * sx > 1e-12)
        trend_stat = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    if (dec_cnt[0] == 0 || dec_cnt[1] == 0 || dec_cnt[2] == 0) {
        verdict = "inconclusive";
        note += (note.empty() ? "" : "; ");
        note += "grid spans fewer than three decades";
        return;
    }
    for (int i = 0; i < 3; ++i) dec_mean[i] /= dec_cnt[i];
    // bin 0 is the newest decade: improvement means mean[0] < mean[1] < mean[2]
    if (dec_mean[0] < dec_mean[1] && dec_mean[1] < dec_mean[2])
        verdict = "converging";
    else if (dec_mean[0] > dec_mean[1] && dec_mean[1] > dec_mean[2])
        verdict = "diverging";
    else if (std::abs(trend_stat) < 0.02)
        verdict = "flat";
    else
        verdict = "inconclusive";
}

}  // namespace fluctlab
