#include "eegssm/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eegssm/errors.hpp"
#include "eegssm/fft.hpp"
#include "eegssm/rng.hpp"

namespace eegssm {

SsmParams init_ssm(std::size_t n_state, std::uint64_t seed) {
  if (n_state < 1) throw std::invalid_argument("init_ssm: n_state must be >= 1");
  SsmParams p;
  p.a_log.resize(n_state);
  p.b.resize(n_state);
  p.c.resize(n_state);
  for (std::size_t n = 0; n < n_state; ++n) {
    p.a_log[n] = std::log(static_cast<double>(n + 1));
  }
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n_state));
  for (std::size_t n = 0; n < n_state; ++n) p.b[n] = rng.uniform(-scale, scale);
  for (std::size_t n = 0; n < n_state; ++n) p.c[n] = rng.uniform(-scale, scale);
  p.d = 1.0;
  p.dt_log = std::log(0.01);
  return p;
}

ZohCoeffs zoh_scalar(double a, double dt, double b) {
  const double z = dt * a;
  const double a_bar = std::exp(z);
  // (e^z - 1)/a loses all digits as z -> 0; below 1e-8 the linear term is
  // exact to double precision.
  const double b_bar = (std::abs(z) < 1e-8) ? dt * b : ((a_bar - 1.0) / a) * b;
  return {a_bar, b_bar};
}

DiscreteSsm discretize_zoh(const SsmParams& params) {
  const std::size_t n = params.n_state();
  const double dt = std::exp(params.dt_log);
  if (!std::isfinite(dt)) throw DataError("discretize_zoh: non-finite step size");
  DiscreteSsm disc;
  disc.a_bar.resize(n);
  disc.b_bar.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -std::exp(params.a_log[i]);
    if (!std::isfinite(a) || !std::isfinite(params.b[i])) {
      throw DataError("discretize_zoh: non-finite parameter");
    }
    const ZohCoeffs co = zoh_scalar(a, dt, params.b[i]);
    disc.a_bar[i] = co.a_bar;
    disc.b_bar[i] = co.b_bar;
  }
  return disc;
}

std::vector<double> scan(const DiscreteSsm& disc, std::span<const double> c, double d,
                         std::span<const double> x) {
  const std::size_t n = disc.a_bar.size();
  if (c.size() != n) throw std::invalid_argument("scan: c length mismatch");
  const std::size_t len = x.size();
  std::vector<double> y(len, 0.0);
  std::vector<double> h(n, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    const double xt = x[t];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = disc.a_bar[i] * h[i] + disc.b_bar[i] * xt;
      acc += c[i] * h[i];
    }
    y[t] = acc + d * xt;
  }
  return y;
}

Kernel kernel(const DiscreteSsm& disc, std::span<const double> c, std::size_t len) {
  if (len < 1) throw std::invalid_argument("kernel: length must be >= 1");
  const std::size_t n = disc.a_bar.size();
  if (c.size() != n) throw std::invalid_argument("kernel: c length mismatch");
  Kernel kern;
  kern.k.assign(len, 0.0);
  // Running powers: pw[i] = a_bar[i]^m * b_bar[i] at step m.
  std::vector<double> pw(disc.b_bar.begin(), disc.b_bar.end());
  for (std::size_t m = 0; m < len; ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += c[i] * pw[i];
      pw[i] *= disc.a_bar[i];
    }
    kern.k[m] = acc;
  }
  return kern;
}

namespace {

std::vector<double> conv_direct(std::span<const double> k, std::span<const double> x) {
  const std::size_t len = x.size();
  std::vector<double> y(len, 0.0);
  for (std::size_t m = 0; m < len; ++m) {
    const double km = k[m];
    if (km == 0.0) continue;
    for (std::size_t t = m; t < len; ++t) y[t] += km * x[t - m];
  }
  return y;
}

std::vector<double> conv_fft(std::span<const double> k, std::span<const double> x) {
  const std::size_t len = x.size();
  const std::size_t nfft = next_pow2(2 * len);
  std::vector<std::complex<double>> fk(nfft), fx(nfft);
  for (std::size_t i = 0; i < len; ++i) {
    fk[i] = k[i];
    fx[i] = x[i];
  }
  fft_inplace(fk, false);
  fft_inplace(fx, false);
  for (std::size_t i = 0; i < nfft; ++i) fk[i] *= fx[i];
  fft_inplace(fk, true);
  std::vector<double> y(len);
  for (std::size_t i = 0; i < len; ++i) y[i] = fk[i].real();
  return y;
}

}  // namespace

std::vector<double> conv_apply(const Kernel& kern, double d, std::span<const double> x,
                               bool use_fft) {
  if (kern.k.size() != x.size()) {
    throw std::invalid_argument("conv_apply: kernel and input length mismatch");
  }
  std::vector<double> y = use_fft ? conv_fft(kern.k, x) : conv_direct(kern.k, x);
  for (std::size_t t = 0; t < x.size(); ++t) y[t] += d * x[t];
  return y;
}

void scan_backward(const DiscreteSsm& disc, std::span<const double> c, double d,
                   std::span<const double> x, std::span<const double> dy,
                   std::span<double> dx, ScanGrads& grads) {
  const std::size_t n = disc.a_bar.size();
  const std::size_t len = x.size();
  if (dy.size() != len || dx.size() != len) {
    throw std::invalid_argument("scan_backward: length mismatch");
  }
  if (grads.d_a_bar.size() != n || grads.d_b_bar.size() != n || grads.d_c.size() != n) {
    throw std::invalid_argument("scan_backward: gradient shape mismatch");
  }

  constexpr std::size_t kChunk = 2048;
  const std::size_t n_chunks = (len + kChunk - 1) / kChunk;

  // Forward pass storing only the entry state of each chunk.
  std::vector<double> checkpoints(n_chunks * n, 0.0);
  {
    std::vector<double> h(n, 0.0);
    for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
      std::copy(h.begin(), h.end(), checkpoints.begin() + static_cast<std::ptrdiff_t>(chunk * n));
      const std::size_t t_end = std::min(len, (chunk + 1) * kChunk);
      for (std::size_t t = chunk * kChunk; t < t_end; ++t) {
        const double xt = x[t];
        for (std::size_t i = 0; i < n; ++i) h[i] = disc.a_bar[i] * h[i] + disc.b_bar[i] * xt;
      }
    }
  }

  std::vector<double> dh(n, 0.0);          // dL/dh[t] after output contribution
  std::vector<double> hbuf((kChunk + 1) * n);  // states h[t0-1 .. t1-1] for one chunk
  for (std::size_t chunk = n_chunks; chunk-- > 0;) {
    const std::size_t t0 = chunk * kChunk;
    const std::size_t t1 = std::min(len, t0 + kChunk);
    const std::size_t steps = t1 - t0;

    // Recompute states within the chunk. hbuf row s holds h[t0+s-1].
    std::copy(checkpoints.begin() + static_cast<std::ptrdiff_t>(chunk * n),
              checkpoints.begin() + static_cast<std::ptrdiff_t>((chunk + 1) * n), hbuf.begin());
    for (std::size_t s = 0; s < steps; ++s) {
      const double xt = x[t0 + s];
      const double* prev = hbuf.data() + s * n;
      double* cur = hbuf.data() + (s + 1) * n;
      for (std::size_t i = 0; i < n; ++i) cur[i] = disc.a_bar[i] * prev[i] + disc.b_bar[i] * xt;
    }

    for (std::size_t s = steps; s-- > 0;) {
      const std::size_t t = t0 + s;
      const double dyt = dy[t];
      const double xt = x[t];
      const double* h_cur = hbuf.data() + (s + 1) * n;
      const double* h_prev = hbuf.data() + s * n;

      grads.d_d += dyt * xt;
      double dxt = d * dyt;
      for (std::size_t i = 0; i < n; ++i) {
        grads.d_c[i] += dyt * h_cur[i];
        const double dhi = dh[i] + c[i] * dyt;
        grads.d_a_bar[i] += dhi * h_prev[i];
        grads.d_b_bar[i] += dhi * xt;
        dxt += dhi * disc.b_bar[i];
        dh[i] = disc.a_bar[i] * dhi;
      }
      dx[t] += dxt;
    }
  }
}

void zoh_backward(const SsmParams& params, const ScanGrads& grads, SsmParams& param_grads) {
  const std::size_t n = params.n_state();
  if (param_grads.n_state() != n) throw std::invalid_argument("zoh_backward: shape mismatch");
  const double dt = std::exp(params.dt_log);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = -std::exp(params.a_log[i]);
    const double z = dt * a;
    const double ez = std::exp(z);
    const double da_bar = grads.d_a_bar[i];
    const double db_bar = grads.d_b_bar[i];

    // a_bar = e^{dt a}: d/da = dt e^z, d/ddt = a e^z.
    double da = da_bar * dt * ez;
    double ddt = da_bar * a * ez;

    // b_bar = ((e^{dt a} - 1)/a) b: the small-|z| branch uses the series limits.
    double db;
    if (std::abs(z) < 1e-8) {
      db = db_bar * dt;
      da += db_bar * params.b[i] * 0.5 * dt * dt;
      ddt += db_bar * params.b[i];  // limit of e^z as z->0
    } else {
      const double phi = (ez - 1.0) / a;
      db = db_bar * phi;
      da += db_bar * params.b[i] * (dt * ez * a - (ez - 1.0)) / (a * a);
      ddt += db_bar * params.b[i] * ez;
    }

    param_grads.b[i] += db;
    // a = -exp(a_log) so da/da_log = a.
    param_grads.a_log[i] += da * a;
    param_grads.dt_log += ddt * dt;
    param_grads.c[i] += grads.d_c[i];
  }
  param_grads.d += grads.d_d;
}

}  // namespace eegssm
