#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace eegssm {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 FFT. buf.size() must be a power of two.
/// The inverse transform includes the 1/N scaling.
void fft_inplace(std::vector<std::complex<double>>& buf, bool inverse);

}  // namespace eegssm
