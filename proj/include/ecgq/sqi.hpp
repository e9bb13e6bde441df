#pragma once

// Five per-record quality indices: RR-interval variability, standardized
// third and fourth moments, and two spectral ratios from a rectangular
// periodogram. Ratios with a zero denominator are defined as 0.

#include <optional>
#include <span>

#include "ecgq/common.hpp"

namespace ecgq {

struct SqiReport {
  std::optional<double> rr_cv;  // unset with fewer than two R peaks
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double p_sqi = 0.0;    // power(5-15 Hz) / power(5-40 Hz)
  double bas_sqi = 0.0;  // 1 - power(0-1 Hz) / power(0-40 Hz)
};

namespace detail {

// One-sided periodogram power at bin k (frequency k*fs/n), Goertzel form.
inline double bin_power(std::span<const double> x, std::size_t k) {
  const std::size_t n = x.size();
  const double w = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
  const double coeff = 2.0 * std::cos(w);
  double s1 = 0, s2 = 0;
  for (double v : x) {
    const double s0 = v + coeff * s1 - s2;
    s2 = s1;
    s1 = s0;
  }
  const double mag2 = s1 * s1 + s2 * s2 - coeff * s1 * s2;
  const double scale = (k == 0 || 2 * k == n) ? 1.0 : 2.0;
  return scale * mag2 / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace detail

// Total power over natural frequency bins k*fs/n with f_lo <= k*fs/n <= f_hi,
// the DC bin included when f_lo = 0. Band edges are inclusive so that nested
// bands yield ratios in [0, 1].
inline double band_power(std::span<const double> x, double fs, double f_lo, double f_hi) {
  const std::size_t n = x.size();
  if (n < 2) throw SignalTooShort("band_power needs at least 2 samples");
  if (!(0.0 <= f_lo && f_lo <= f_hi)) throw InvalidSpec("band edges must satisfy 0 <= lo <= hi");
  const double df = fs / static_cast<double>(n);
  const auto k_lo = static_cast<std::size_t>(std::ceil(f_lo / df - 1e-9));
  const auto k_hi_raw = static_cast<std::size_t>(std::floor(f_hi / df + 1e-9));
  const std::size_t k_hi = std::min(k_hi_raw, n / 2);
  double total = 0;
  for (std::size_t k = k_lo; k <= k_hi && k <= n / 2; ++k) {
    total += detail::bin_power(x, k);
  }
  return total;
}

inline SqiReport compute_sqi(std::span<const double> signal,
                             const std::vector<std::size_t>& r_peaks, double fs) {
  if (static_cast<double>(signal.size()) < 2.0 * fs) {
    throw TooShort("quality indices need at least 2 s of signal");
  }

  SqiReport rep;

  if (r_peaks.size() >= 2) {
    std::vector<double> rr;
    rr.reserve(r_peaks.size() - 1);
    for (std::size_t i = 1; i < r_peaks.size(); ++i) {
      rr.push_back(static_cast<double>(r_peaks[i] - r_peaks[i - 1]) / fs);
    }
    const double m = mean_of(rr);
    rep.rr_cv = (m > 0) ? std::sqrt(population_variance(rr)) / m : 0.0;
  }

  // Standardized central moments, population convention. A flat signal has
  // no defined shape; both moments fall back to 0 to keep the report finite.
  const auto n = static_cast<double>(signal.size());
  double mean = 0;
  for (double v : signal) mean += v;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : signal) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 > 1e-18 * (1.0 + mean * mean)) {
    rep.skewness = m3 / std::pow(m2, 1.5);
    rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }

  const double p_mid = band_power(signal, fs, 5.0, 15.0);
  const double p_wide = band_power(signal, fs, 5.0, 40.0);
  const double p_low = band_power(signal, fs, 0.0, 1.0);
  const double p_full = band_power(signal, fs, 0.0, 40.0);
  rep.p_sqi = (p_wide > 0) ? p_mid / p_wide : 0.0;
  rep.bas_sqi = 1.0 - ((p_full > 0) ? p_low / p_full : 0.0);

  return rep;
}

}  // namespace ecgq
