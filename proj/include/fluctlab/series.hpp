#pragma once

#include <cstdint>
#include <vector>

namespace fluctlab {

// Coefficients u[0..n] of exp(sum_{k>=1} b[k] s^k), b indexed from 0 with
// b[0] ignored. Blocked divide-and-conquer with FFT cross-terms, O(n log^2 n).
std::vector<double> exp_series(const std::vector<double>& b, std::size_t n);

// Renewal sequence of a (possibly defective) pmf on {1, 2, ...}:
// u[0] = 1, u[x] = sum_{k=1}^{x} pmf[k] u[x-k]. pmf[0] must be 0.
std::vector<double> renewal_sequence(const std::vector<double>& pmf, std::size_t n);

}  // namespace fluctlab
