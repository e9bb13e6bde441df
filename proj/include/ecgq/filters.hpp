#pragma once

// IIR denoising chain: Butterworth band/low-pass design (zpk + bilinear
// transform, evaluated as second-order sections), an RBJ notch, zero-phase
// forward-backward filtering with reflection padding and steady-state
// initial conditions, rate conversion, and per-record standardization.

#include <algorithm>
#include <complex>
#include <span>

#include "ecgq/common.hpp"

namespace ecgq {

enum class FilterKind { Bandpass, Notch };

struct FilterSpec {
  FilterKind kind = FilterKind::Bandpass;
  int order = 4;  // pole pairs per band edge for the bandpass
  double low_cut_hz = 0.1;
  double high_cut_hz = 100.0;
  std::vector<double> notch_freqs_hz = {50.0, 60.0};
  double q_factor = 30.0;
};

// One biquad, coefficients normalized so a0 = 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  double gain_at_dc() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

using Sos = std::vector<Biquad>;

namespace detail {

using cplx = std::complex<double>;

// Analog Butterworth lowpass prototype poles (unit cutoff, left half plane).
inline std::vector<cplx> butter_prototype(int order) {
  std::vector<cplx> poles;
  poles.reserve(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    const double theta = M_PI * (2.0 * k + order - 1.0) / (2.0 * order);
    poles.emplace_back(std::cos(theta), std::sin(theta));
  }
  return poles;
}

inline double prewarp(double hz, double fs) {
  return 2.0 * fs * std::tan(M_PI * hz / fs);
}

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
  double gain = 1.0;
};

inline Zpk lp2bp(const std::vector<cplx>& proto, double w_lo, double w_hi) {
  const double w0 = std::sqrt(w_lo * w_hi);
  const double bw = w_hi - w_lo;
  Zpk out;
  for (const cplx& p : proto) {
    const cplx q = p * (bw / 2.0);
    const cplx d = std::sqrt(q * q - w0 * w0);
    out.poles.push_back(q + d);
    out.poles.push_back(q - d);
  }
  out.zeros.assign(proto.size(), cplx(0.0, 0.0));
  out.gain = std::pow(bw, static_cast<double>(proto.size()));
  return out;
}

inline Zpk lp2lp(const std::vector<cplx>& proto, double wc) {
  Zpk out;
  for (const cplx& p : proto) out.poles.push_back(p * wc);
  out.gain = std::pow(wc, static_cast<double>(proto.size()));
  return out;
}

// Bilinear transform; zeros at infinity map to z = -1.
inline Zpk bilinear(const Zpk& analog, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (const cplx& z : analog.zeros) {
    out.zeros.push_back((fs2 + z) / (fs2 - z));
    num *= (fs2 - z);
  }
  for (const cplx& p : analog.poles) {
    out.poles.push_back((fs2 + p) / (fs2 - p));
    den *= (fs2 - p);
  }
  const std::size_t deficit = analog.poles.size() - analog.zeros.size();
  for (std::size_t i = 0; i < deficit; ++i) out.zeros.emplace_back(-1.0, 0.0);
  out.gain = analog.gain * (num / den).real();
  return out;
}

// Pair conjugate poles into biquads. The digital zeros arrive as n at +1 and
// n at -1 (bandpass) or all at -1 (lowpass); each section takes two.
inline Sos zpk_to_sos(const Zpk& zpk) {
  std::vector<cplx> upper;
  for (const cplx& p : zpk.poles) {
    if (p.imag() > 1e-12) upper.push_back(p);
  }
  std::vector<cplx> real_poles;
  for (const cplx& p : zpk.poles) {
    if (std::abs(p.imag()) <= 1e-12) real_poles.push_back(p);
  }
  // Deterministic ordering: sections sorted by pole magnitude, closest to
  // the unit circle last, which keeps intermediate signals bounded.
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });

  std::vector<cplx> zeros_pos, zeros_neg;
  for (const cplx& z : zpk.zeros) {
    (z.real() >= 0 ? zeros_pos : zeros_neg).push_back(z);
  }

  Sos sos;
  std::size_t zp = 0, zn = 0;
  auto take_zero_pair = [&]() -> std::pair<cplx, cplx> {
    // Prefer one zero from each cluster (+1 and -1) per section; fall back
    // to whatever remains.
    cplx z1(0, 0), z2(0, 0);
    if (zp < zeros_pos.size() && zn < zeros_neg.size()) {
      z1 = zeros_pos[zp++];
      z2 = zeros_neg[zn++];
    } else if (zn + 1 < zeros_neg.size()) {
      z1 = zeros_neg[zn++];
      z2 = zeros_neg[zn++];
    } else if (zp + 1 < zeros_pos.size()) {
      z1 = zeros_pos[zp++];
      z2 = zeros_pos[zp++];
    }
    return {z1, z2};
  };

  for (const cplx& p : upper) {
    auto [z1, z2] = take_zero_pair();
    Biquad s;
    s.b0 = 1.0;
    s.b1 = -(z1 + z2).real();
    s.b2 = (z1 * z2).real();
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    sos.push_back(s);
  }
  // Real poles only appear for odd prototype orders, which the specs in use
  // do not request; pair them up defensively anyway.
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    auto [z1, z2] = take_zero_pair();
    Biquad s;
    s.b0 = 1.0;
    s.b1 = -(z1 + z2).real();
    s.b2 = (z1 * z2).real();
    s.a1 = -(real_poles[i] + real_poles[i + 1]).real();
    s.a2 = (real_poles[i] * real_poles[i + 1]).real();
    sos.push_back(s);
  }

  if (!sos.empty()) {
    // Spread the overall gain evenly across sections.
    const double g = zpk.gain;
    const double per = std::pow(std::abs(g), 1.0 / static_cast<double>(sos.size()));
    for (Biquad& s : sos) {
      s.b0 *= per;
      s.b1 *= per;
      s.b2 *= per;
    }
    if (g < 0) {
      sos.front().b0 = -sos.front().b0;
      sos.front().b1 = -sos.front().b1;
      sos.front().b2 = -sos.front().b2;
    }
  }
  return sos;
}

// Direct form II transposed, single pass, caller-supplied initial state.
inline void biquad_run(const Biquad& q, std::span<double> x, double s1_init, double s2_init) {
  double s1 = s1_init, s2 = s2_init;
  for (double& v : x) {
    const double in = v;
    const double out = q.b0 * in + s1;
    s1 = q.b1 * in - q.a1 * out + s2;
    s2 = q.b2 * in - q.a2 * out;
    v = out;
  }
}

// Steady-state DF2T state for a constant input of 1; scaled by the first
// sample this suppresses the step transient at the record edges.
inline std::pair<double, double> biquad_zi(const Biquad& q) {
  const double y = q.gain_at_dc();
  return {y - q.b0, q.b2 - q.a2 * y};
}

inline void sos_pass(const Sos& sos, std::span<double> x) {
  for (const Biquad& q : sos) {
    const auto [zi1, zi2] = biquad_zi(q);
    const double x0 = x.empty() ? 0.0 : x.front();
    biquad_run(q, x, zi1 * x0, zi2 * x0);
  }
}

}  // namespace detail

inline Sos design_bandpass(int order, double low_hz, double high_hz, double fs) {
  if (order <= 0 || order % 2 != 0) throw InvalidSpec("bandpass order must be even and positive");
  if (!(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0)) {
    throw InvalidSpec("bandpass cutoffs must satisfy 0 < low < high < fs/2");
  }
  const auto proto = detail::butter_prototype(order);
  const auto analog = detail::lp2bp(proto, detail::prewarp(low_hz, fs), detail::prewarp(high_hz, fs));
  return detail::zpk_to_sos(detail::bilinear(analog, fs));
}

inline Sos design_lowpass(int order, double cut_hz, double fs) {
  if (order <= 0 || order % 2 != 0) throw InvalidSpec("lowpass order must be even and positive");
  if (!(0.0 < cut_hz && cut_hz < fs / 2.0)) throw InvalidSpec("lowpass cutoff must be in (0, fs/2)");
  const auto proto = detail::butter_prototype(order);
  const auto analog = detail::lp2lp(proto, detail::prewarp(cut_hz, fs));
  return detail::zpk_to_sos(detail::bilinear(analog, fs));
}

// RBJ cookbook notch: unit gain at DC and Nyquist, null at f0.
inline Sos design_notch(const std::vector<double>& freqs_hz, double q_factor, double fs) {
  if (q_factor <= 0) throw InvalidSpec("notch Q must be positive");
  Sos sos;
  for (double f0 : freqs_hz) {
    if (!(0.0 < f0 && f0 < fs / 2.0)) throw InvalidSpec("notch frequency must be in (0, fs/2)");
    const double w0 = 2.0 * M_PI * f0 / fs;
    const double alpha = std::sin(w0) / (2.0 * q_factor);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = 1.0 / a0;
    s.b1 = -2.0 * std::cos(w0) / a0;
    s.b2 = 1.0 / a0;
    s.a1 = -2.0 * std::cos(w0) / a0;
    s.a2 = (1.0 - alpha) / a0;
    sos.push_back(s);
  }
  return sos;
}

// Samples until the cascade's slowest pole decays to e^-5. A 0.1 Hz edge at
// 500 Hz needs about 4000 samples; edge padding shorter than this leaks a
// sub-hertz transient into the record body on every pass.
inline std::size_t settle_samples(const Sos& sos) {
  double r_max = 0.0;
  for (const Biquad& s : sos) {
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    double r;
    if (disc < 0.0) {
      r = std::sqrt(std::max(0.0, s.a2));  // conjugate pair, |p|^2 = a2
    } else {
      const double sq = std::sqrt(disc);
      r = std::max(std::abs(-s.a1 + sq), std::abs(-s.a1 - sq)) / 2.0;
    }
    r_max = std::max(r_max, r);
  }
  const std::size_t floor = 6 * sos.size();
  if (!(r_max > 0.0) || r_max >= 1.0) return floor;
  return std::max(floor, static_cast<std::size_t>(std::ceil(-5.0 / std::log(r_max))));
}

// Zero-phase forward-backward pass over a section cascade. The input is
// reflect-padded (odd extension) by the cascade's settle time, capped by the
// signal length.
inline std::vector<double> filtfilt(const Sos& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw SignalTooShort("filtfilt needs at least 2 samples");
  const std::size_t padlen = std::min(n - 1, settle_samples(sos));

  std::vector<double> buf;
  buf.reserve(n + 2 * padlen);
  for (std::size_t i = 0; i < padlen; ++i) buf.push_back(2.0 * x[0] - x[padlen - i]);
  buf.insert(buf.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < padlen; ++i) buf.push_back(2.0 * x[n - 1] - x[n - 2 - i]);

  detail::sos_pass(sos, buf);
  std::reverse(buf.begin(), buf.end());
  detail::sos_pass(sos, buf);
  std::reverse(buf.begin(), buf.end());

  return std::vector<double>(buf.begin() + static_cast<std::ptrdiff_t>(padlen),
                             buf.begin() + static_cast<std::ptrdiff_t>(padlen + n));
}

inline std::vector<double> apply_bandpass(std::span<const double> signal, double fs,
                                          const FilterSpec& spec) {
  const std::size_t poles = 2 * static_cast<std::size_t>(spec.order);
  if (signal.size() <= 3 * poles) throw SignalTooShort("signal shorter than 3x filter order");
  if (fs <= 2.0 * spec.high_cut_hz) throw InvalidSpec("fs must exceed twice the high cutoff");
  return filtfilt(design_bandpass(spec.order, spec.low_cut_hz, spec.high_cut_hz, fs), signal);
}

inline std::vector<double> apply_notch(std::span<const double> signal, double fs,
                                       const std::vector<double>& notch_freqs_hz,
                                       double q_factor) {
  return filtfilt(design_notch(notch_freqs_hz, q_factor, fs), signal);
}

inline std::vector<double> apply_notch(std::span<const double> signal, double fs,
                                       const FilterSpec& spec) {
  return apply_notch(signal, fs, spec.notch_freqs_hz, spec.q_factor);
}

// Rate conversion between the two rates present in the source data.
// 1000 -> 500 is an anti-alias lowpass followed by decimation by two.
inline std::vector<double> resample(std::span<const double> signal, double fs_in,
                                    double fs_out = 500.0) {
  if (fs_in == fs_out) return std::vector<double>(signal.begin(), signal.end());
  if (!(fs_in == 1000.0 && fs_out == 500.0)) {
    throw UnsupportedRate("supported rates: 500 Hz (identity) and 1000 -> 500 Hz");
  }
  const Sos aa = design_lowpass(8, 0.8 * (fs_out / 2.0), fs_in);
  const std::vector<double> smooth = filtfilt(aa, signal);
  std::vector<double> out;
  out.reserve(smooth.size() / 2 + 1);
  for (std::size_t i = 0; i < smooth.size(); i += 2) out.push_back(smooth[i]);
  return out;
}

// Standard-scaler normalization, population-std convention, per lead.
inline std::vector<double> standardize(std::span<const double> signal) {
  if (signal.size() < 2) throw SignalTooShort("standardize needs at least 2 samples");
  double mean = 0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(signal.size());
  double var = 0;
  for (double v : signal) var += (v - mean) * (v - mean);
  var /= static_cast<double>(signal.size());
  // Relative guard: a constant signal accumulates rounding noise of order
  // (n * ulp(mean))^2, which an absolute epsilon would miss.
  if (var <= 1e-18 * (1.0 + mean * mean)) {
    throw ZeroVariance("flat signal cannot be standardized");
  }
  const double inv = 1.0 / std::sqrt(var);
  std::vector<double> out;
  out.reserve(signal.size());
  for (double v : signal) out.push_back((v - mean) * inv);
  return out;
}

}  // namespace ecgq
