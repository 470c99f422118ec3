#include "eegssm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "eegssm/errors.hpp"
#include "eegssm/fft.hpp"

namespace eegssm {

const std::array<BandDefinition, 5>& standard_bands() {
  static const std::array<BandDefinition, 5> bands = {{
      {Band::Delta, "Delta", 0.5, 4.0},
      {Band::Theta, "Theta", 4.0, 8.0},
      {Band::Alpha, "Alpha", 8.0, 12.0},
      {Band::Beta, "Beta", 12.0, 20.0},
      {Band::Gamma, "Gamma", 20.0, 40.0},
  }};
  return bands;
}

namespace {

struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 normalized to 1)
};

// Band-pass Butterworth as second-order sections: order-2 analog prototype,
// low-pass -> band-pass transform (4 poles total), bilinear transform. The
// n prototype zeros land at z=+1 and n at z=-1; each section gets one of each
// (b = g*[1, 0, -1]).
std::vector<Biquad> design_butter_bandpass(double lo_hz, double hi_hz, double fs_hz) {
  constexpr int kOrder = 2;  // prototype order; 2*kOrder poles in the band-pass
  const double pi = std::acos(-1.0);
  const double fs2 = 2.0 * fs_hz;

  // Prewarped analog edge frequencies.
  const double w_lo = fs2 * std::tan(pi * lo_hz / fs_hz);
  const double w_hi = fs2 * std::tan(pi * hi_hz / fs_hz);
  const double bw = w_hi - w_lo;
  const double w0_sq = w_lo * w_hi;

  // Analog band-pass poles from the prototype pair, then bilinear map.
  std::vector<std::complex<double>> zpoles;
  for (int k = 0; k < kOrder; ++k) {
    const double theta = pi * (2.0 * k + kOrder + 1.0) / (2.0 * kOrder);
    const std::complex<double> proto(std::cos(theta), std::sin(theta));
    const std::complex<double> pb = proto * (0.5 * bw);
    const std::complex<double> disc = std::sqrt(pb * pb - w0_sq);
    for (const std::complex<double> s : {pb + disc, pb - disc}) {
      zpoles.push_back((fs2 + s) / (fs2 - s));
    }
  }

  // Pair each pole with its conjugate partner into real sections.
  std::vector<Biquad> sos;
  std::vector<bool> used(zpoles.size(), false);
  for (std::size_t i = 0; i < zpoles.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t mate = i;
    double best = 1e300;
    for (std::size_t j = i + 1; j < zpoles.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(zpoles[j] - std::conj(zpoles[i]));
      if (dist < best) {
        best = dist;
        mate = j;
      }
    }
    used[mate] = true;
    const std::complex<double> p = zpoles[i];
    const std::complex<double> q = zpoles[mate];
    Biquad s{1.0, 0.0, -1.0, -(p + q).real(), (p * q).real()};
    sos.push_back(s);
  }

  // Unit gain at the (digital) center frequency, applied to the first section.
  const double theta0 = 2.0 * std::atan(std::sqrt(w0_sq) / fs2);
  const std::complex<double> z(std::cos(theta0), std::sin(theta0));
  const std::complex<double> z1 = 1.0 / z;
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> gain(1.0, 0.0);
  for (const Biquad& s : sos) {
    gain *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  sos.front().b0 /= std::abs(gain);
  sos.front().b1 /= std::abs(gain);
  sos.front().b2 /= std::abs(gain);
  return sos;
}

// Direct-form-II-transposed run of one section over a buffer, in place.
void sosfilt_section(const Biquad& s, std::vector<double>& x, double zi1, double zi2) {
  double z1 = zi1, z2 = zi2;
  for (double& v : x) {
    const double xn = v;
    const double yn = s.b0 * xn + z1;
    z1 = s.b1 * xn - s.a1 * yn + z2;
    z2 = s.b2 * xn - s.a2 * yn;
    v = yn;
  }
}

// Steady-state section states for a unit-amplitude constant input; the
// cumulative DC gain feeds each later section's scale (zero here whenever an
// earlier section has a zero at z=1, as band-pass sections do).
struct SectionZi {
  double z1, z2;
};
std::vector<SectionZi> sos_steady_state(const std::vector<Biquad>& sos) {
  std::vector<SectionZi> zi(sos.size());
  double scale = 1.0;
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const Biquad& s = sos[i];
    const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    zi[i].z1 = scale * (dc - s.b0);
    zi[i].z2 = scale * (s.b2 - s.a2 * dc);
    scale *= dc;
  }
  return zi;
}

void sosfiltfilt_row(const std::vector<Biquad>& sos, const std::vector<SectionZi>& zi_unit,
                     const double* x, std::size_t len, double* out) {
  const std::size_t padlen = std::min<std::size_t>(len - 1, 3 * (2 * sos.size() + 1));

  // Odd extension at both ends.
  std::vector<double> ext(len + 2 * padlen);
  for (std::size_t i = 0; i < padlen; ++i) ext[i] = 2.0 * x[0] - x[padlen - i];
  std::copy(x, x + len, ext.begin() + static_cast<std::ptrdiff_t>(padlen));
  for (std::size_t i = 0; i < padlen; ++i) ext[padlen + len + i] = 2.0 * x[len - 1] - x[len - 2 - i];

  const auto run = [&](std::vector<double>& buf) {
    const double head = buf.front();
    for (std::size_t i = 0; i < sos.size(); ++i) {
      sosfilt_section(sos[i], buf, zi_unit[i].z1 * head, zi_unit[i].z2 * head);
    }
  };

  run(ext);
  std::reverse(ext.begin(), ext.end());
  run(ext);
  std::reverse(ext.begin(), ext.end());

  std::copy(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
            ext.begin() + static_cast<std::ptrdiff_t>(padlen + len), out);
}

}  // namespace

Matrix bandpass_filter(const Matrix& signal, const BandDefinition& band, double fs_hz) {
  if (fs_hz <= 2.0 * band.hi_hz) {
    throw DataError(std::string("bandpass_filter: ") + band.name + " band above Nyquist");
  }
  if (signal.cols() < 2) throw DataError("bandpass_filter: signal too short");

  const std::vector<Biquad> sos = design_butter_bandpass(band.lo_hz, band.hi_hz, fs_hz);
  const std::vector<SectionZi> zi = sos_steady_state(sos);

  Matrix out(signal.rows(), signal.cols());
  for (std::size_t ch = 0; ch < signal.rows(); ++ch) {
    sosfiltfilt_row(sos, zi, signal.row(ch), signal.cols(), out.row(ch));
  }
  return out;
}

std::vector<Matrix> decompose_bands(const Matrix& segment, double fs_hz) {
  if (fs_hz <= 2.0 * standard_bands().back().hi_hz) {
    throw DataError("decompose_bands: Gamma band above Nyquist");
  }
  std::vector<Matrix> stack;
  stack.reserve(standard_bands().size());
  for (const BandDefinition& band : standard_bands()) {
    stack.push_back(bandpass_filter(segment, band, fs_hz));
  }
  return stack;
}

Psd welch_psd(const Matrix& signal, double fs_hz, const WelchConfig& cfg) {
  if (fs_hz <= 0.0) throw std::invalid_argument("welch_psd: fs_hz must be > 0");
  if (cfg.nperseg < 8) throw std::invalid_argument("welch_psd: nperseg must be >= 8");
  if (cfg.overlap < 0.0 || cfg.overlap >= 1.0) {
    throw std::invalid_argument("welch_psd: overlap must be in [0, 1)");
  }
  const std::size_t len = signal.cols();
  if (len < cfg.nperseg) throw DataError("welch_psd: signal shorter than nperseg");

  const std::size_t nperseg = cfg.nperseg;
  const std::size_t noverlap = static_cast<std::size_t>(std::floor(cfg.overlap * nperseg));
  const std::size_t hop = nperseg - noverlap;
  const std::size_t nfft = next_pow2(nperseg);
  const std::size_t nfreq = nfft / 2 + 1;

  std::vector<double> window(nperseg, 1.0);
  if (cfg.window == WindowKind::Hann) {
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < nperseg; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / nperseg);
    }
  }
  double win_energy = 0.0;
  for (const double w : window) win_energy += w * w;
  const double scale = 1.0 / (fs_hz * win_energy);

  Psd psd;
  psd.freqs_hz.resize(nfreq);
  for (std::size_t k = 0; k < nfreq; ++k) psd.freqs_hz[k] = fs_hz * static_cast<double>(k) / nfft;
  psd.power = Matrix(signal.rows(), nfreq, 0.0);

  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t ch = 0; ch < signal.rows(); ++ch) {
    const double* x = signal.row(ch);
    std::size_t n_windows = 0;
    for (std::size_t start = 0; start + nperseg <= len; start += hop) {
      for (std::size_t i = 0; i < nperseg; ++i) buf[i] = x[start + i] * window[i];
      for (std::size_t i = nperseg; i < nfft; ++i) buf[i] = 0.0;
      fft_inplace(buf, false);
      double* p = psd.power.row(ch);
      for (std::size_t k = 0; k < nfreq; ++k) {
        double v = std::norm(buf[k]) * scale;
        if (k != 0 && k != nfft / 2) v *= 2.0;  // one-sided
        p[k] += v;
      }
      ++n_windows;
    }
    double* p = psd.power.row(ch);
    for (std::size_t k = 0; k < nfreq; ++k) p[k] /= static_cast<double>(n_windows);
  }
  return psd;
}

BandFeatures band_powers(const Psd& psd, const std::array<BandDefinition, 5>& bands) {
  constexpr double kEps = 1e-12;
  if (psd.freqs_hz.empty() || psd.freqs_hz.back() < bands.back().hi_hz) {
    throw DataError("band_powers: psd does not cover [0.5, 40] Hz");
  }

  // Bin index ranges per band, [lo, hi).
  std::array<std::pair<std::size_t, std::size_t>, 5> ranges;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto lo = std::lower_bound(psd.freqs_hz.begin(), psd.freqs_hz.end(), bands[b].lo_hz);
    const auto hi = std::lower_bound(psd.freqs_hz.begin(), psd.freqs_hz.end(), bands[b].hi_hz);
    const std::size_t n_bins = static_cast<std::size_t>(hi - lo);
    if (n_bins < 2) {
      throw DataError(std::string("band_powers: insufficient resolution in ") + bands[b].name);
    }
    ranges[b] = {static_cast<std::size_t>(lo - psd.freqs_hz.begin()),
                 static_cast<std::size_t>(hi - psd.freqs_hz.begin())};
  }

  BandFeatures feats;
  feats.values = Matrix(psd.power.rows(), bands.size());
  for (std::size_t ch = 0; ch < psd.power.rows(); ++ch) {
    const double* p = psd.power.row(ch);
    for (std::size_t b = 0; b < bands.size(); ++b) {
      double sum = 0.0;
      for (std::size_t k = ranges[b].first; k < ranges[b].second; ++k) sum += p[k];
      feats.values(ch, b) = std::log(kEps + sum / static_cast<double>(ranges[b].second - ranges[b].first));
    }
  }
  return feats;
}

WelchConfig pipeline_welch_config(std::size_t n_seq) {
  WelchConfig cfg;
  cfg.nperseg = std::min<std::size_t>(n_seq, 512);
  return cfg;
}

}  // namespace eegssm
