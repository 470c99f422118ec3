#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "eegssm/matrix.hpp"

namespace eegssm {

enum class Band { Delta = 0, Theta = 1, Alpha = 2, Beta = 3, Gamma = 4 };

struct BandDefinition {
  Band band;
  const char* name;
  double lo_hz;
  double hi_hz;
};

/// The fixed clinical band table: Delta 0.5-4, Theta 4-8, Alpha 8-12,
/// Beta 12-20, Gamma 20-40 Hz. Contiguous and non-overlapping.
const std::array<BandDefinition, 5>& standard_bands();

/// Zero-phase band-pass (Butterworth sections run forward and backward).
/// Same shape as the input; passband gain within +-1 dB at band center.
Matrix bandpass_filter(const Matrix& signal, const BandDefinition& band, double fs_hz);

/// Band stack in fixed Delta..Gamma order, one filtered copy per band.
std::vector<Matrix> decompose_bands(const Matrix& segment, double fs_hz);

enum class WindowKind { Hann, Boxcar };

struct WelchConfig {
  std::size_t nperseg = 512;
  double overlap = 0.5;  // fraction of nperseg
  WindowKind window = WindowKind::Hann;
};

/// One-sided power spectral density, density scaling (integrates to signal
/// power), uniform bin spacing fs/nfft over [0, fs/2].
struct Psd {
  std::vector<double> freqs_hz;
  Matrix power;  // channels x frequency bins, uV^2/Hz
};

/// Welch's method: mean of windowed periodograms over overlapping segments.
Psd welch_psd(const Matrix& signal, double fs_hz, const WelchConfig& cfg = {});

/// Per-channel log band power, channels x 5, band order Delta..Gamma.
/// values[c][b] = log(eps + mean PSD over [lo, hi)), eps = 1e-12.
struct BandFeatures {
  Matrix values;
};

BandFeatures band_powers(const Psd& psd,
                         const std::array<BandDefinition, 5>& bands = standard_bands());

/// Welch config the pipeline uses for a given segment length: nperseg is
/// capped at 512 so Delta keeps at least two bins at every supported rate.
WelchConfig pipeline_welch_config(std::size_t n_seq);

}  // namespace eegssm
