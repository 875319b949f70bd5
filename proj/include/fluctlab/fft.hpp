#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fluctlab {

// Iterative radix-2 complex FFT, power-of-two sizes only.
// sign = +1: X[j] = sum_n a[n] exp(+2*pi*i*n*j/N); sign = -1 for the inverse
// kernel (no 1/N normalisation applied).
void fft_inplace(std::vector<std::complex<double>>& a, int sign);

// Linear convolution of two real sequences, zero-padded FFT. Result length
// a.size()+b.size()-1. Falls back to the direct sum for short inputs.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b);

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace fluctlab
