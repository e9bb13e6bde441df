#pragma once

// Parametric two-lead beat generator with exact ground truth. Beats are
// Gaussian-wave sums; each class carries its defining morphology (P width,
// PR interval, RR regime, atrial overlay). Used as the oracle for detector,
// pipeline, and agent tests, and as a full on-disk fixture source.

#include <array>
#include <filesystem>
#include <optional>

#include "ecgq/common.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

enum class WaveShape { Gaussian, Biphasic };

struct WaveParams {
  double amp = 0.0;     // mV; for Biphasic, each lobe peaks at +/-amp
  double center = 0.0;  // s, relative to the R peak
  double sigma = 0.0;   // s
  WaveShape shape = WaveShape::Gaussian;
};

struct LeadWaves {
  WaveParams p, q, r, s, t;
};

enum class RrRegime { Regular, Irregular };

struct RrModel {
  double mean_s = 0.8;
  double jitter_s = 0.05;
  RrRegime regime = RrRegime::Regular;
};

enum class Overlay { None, Fibrillatory, Sawtooth };

struct OverlayParams {
  Overlay kind = Overlay::None;
  double amp_ii = 0.0;  // mV
  double amp_v1 = 0.0;
  double freq_hz = 4.5;  // sawtooth rate; fibrillatory uses a fixed triple
};

struct ClassTemplate {
  ClassLabel label = ClassLabel::NSR;
  LeadWaves lead_ii, lead_v1;
  RrModel rr;
  double pr_s = 0.0;  // P onset to QRS onset; 0 when the class has no P
  OverlayParams overlay;
};

struct BeatTruth {
  std::size_t r_index = 0;
  double r_time_s = 0.0;
  std::optional<double> pr_s;
  std::optional<double> p_onset_s;
  std::optional<double> p_offset_s;
};

struct GroundTruth {
  ClassLabel label = ClassLabel::NSR;
  std::vector<BeatTruth> beats;

  std::vector<std::size_t> r_indices() const {
    std::vector<std::size_t> out;
    out.reserve(beats.size());
    for (const BeatTruth& b : beats) out.push_back(b.r_index);
    return out;
  }
};

struct SynthRecord {
  std::vector<double> lead_ii, lead_v1;  // mV
  double fs = 500.0;
  GroundTruth truth;
};

namespace detail {

// Half-depth width of one lobe of the normalized Gaussian-derivative shape,
// in units of sigma (solve x*exp(-x^2/2) = exp(-1/2)/2).
inline constexpr double kBiphasicLobeWidth = 1.586;

inline double p_onset_offset(const WaveParams& p) {
  return p.center - (p.shape == WaveShape::Gaussian ? 2.0 : 2.5) * p.sigma;
}

inline double p_offset_offset(const WaveParams& p) {
  return p.center + (p.shape == WaveShape::Gaussian ? 2.0 : 2.5) * p.sigma;
}

inline double qrs_onset_offset(const LeadWaves& w) {
  return (w.q.amp != 0.0) ? w.q.center - 2.0 * w.q.sigma : w.r.center - 2.0 * w.r.sigma;
}

inline double geometric_pr(const LeadWaves& w) {
  return qrs_onset_offset(w) - p_onset_offset(w.p);
}

}  // namespace detail

inline void validate_template(const ClassTemplate& tpl) {
  auto check_lead = [](const LeadWaves& w, const char* lead) {
    for (const WaveParams* wv : {&w.p, &w.q, &w.r, &w.s, &w.t}) {
      if (wv->amp != 0.0 && wv->sigma <= 0.0) {
        throw InvalidTemplate(std::string("nonzero wave with nonpositive width on lead ") + lead);
      }
    }
  };
  check_lead(tpl.lead_ii, "II");
  check_lead(tpl.lead_v1, "V1");
  if (tpl.lead_ii.r.amp <= 0.0) throw InvalidTemplate("lead II R amplitude must be positive");

  const RrModel& rr = tpl.rr;
  if (rr.mean_s <= 0.0 || rr.jitter_s < 0.0) throw InvalidTemplate("RR model needs mean > 0, jitter >= 0");
  const double spread = (rr.regime == RrRegime::Irregular ? 2.0 : 1.0) * rr.jitter_s;
  if (rr.mean_s - spread <= 0.0) throw InvalidTemplate("RR jitter reaches nonpositive intervals");

  const WaveParams& p2 = tpl.lead_ii.p;
  const bool has_p = p2.amp != 0.0;
  if (has_p) {
    const double pr = detail::geometric_pr(tpl.lead_ii);
    if (std::abs(pr - tpl.pr_s) > 1e-9) {
      throw InvalidTemplate("pr_s does not match the P/QRS wave geometry");
    }
  }

  switch (tpl.label) {
    case ClassLabel::NSR:
      if (!has_p) throw InvalidTemplate("NSR needs a P wave");
      if (4.0 * p2.sigma >= 0.12) throw InvalidTemplate("NSR P duration must stay under 0.12 s");
      if (tpl.pr_s < 0.12 || tpl.pr_s > 0.20) throw InvalidTemplate("NSR PR must lie in [0.12, 0.20] s");
      break;
    case ClassLabel::AF:
      if (has_p || tpl.lead_v1.p.amp != 0.0) throw InvalidTemplate("AF must have no P wave");
      if (tpl.rr.regime != RrRegime::Irregular) throw InvalidTemplate("AF needs an irregular RR regime");
      if (tpl.overlay.kind != Overlay::Fibrillatory) throw InvalidTemplate("AF needs a fibrillatory overlay");
      break;
    case ClassLabel::AFL:
      if (has_p || tpl.lead_v1.p.amp != 0.0) throw InvalidTemplate("AFL must have no discrete P wave");
      if (tpl.overlay.kind != Overlay::Sawtooth) throw InvalidTemplate("AFL needs a sawtooth overlay");
      break;
    case ClassLabel::LAE: {
      if (!has_p) throw InvalidTemplate("LAE needs a P wave");
      if (4.0 * p2.sigma <= 0.12) throw InvalidTemplate("LAE lead II P duration must exceed 0.12 s");
      const WaveParams& pv = tpl.lead_v1.p;
      if (pv.shape != WaveShape::Biphasic || pv.amp <= 0.1) {
        throw InvalidTemplate("LAE lead V1 needs a biphasic P with terminal depth over 0.1 mV");
      }
      if (detail::kBiphasicLobeWidth * pv.sigma <= 0.04) {
        throw InvalidTemplate("LAE lead V1 terminal P lobe must be wider than 40 ms");
      }
      break;
    }
    case ClassLabel::AVB1:
      if (!has_p) throw InvalidTemplate("first-degree block needs a P wave");
      if (4.0 * p2.sigma >= 0.12) throw InvalidTemplate("first-degree block keeps a normal P duration");
      if (tpl.pr_s <= 0.20) throw InvalidTemplate("first-degree block needs PR > 0.2 s");
      break;
  }
}

namespace detail {

// Solve the P center so that P onset precedes QRS onset by exactly pr.
inline void place_p(LeadWaves& w, double pr) {
  const double onset_lead = (w.p.shape == WaveShape::Gaussian ? 2.0 : 2.5) * w.p.sigma;
  w.p.center = qrs_onset_offset(w) - pr + onset_lead;
}

}  // namespace detail

inline std::array<ClassTemplate, 5> default_templates() {
  auto base_ii = [] {
    LeadWaves w;
    w.p = {0.15, 0.0, 0.025, WaveShape::Gaussian};
    w.q = {-0.08, -0.035, 0.010, WaveShape::Gaussian};
    w.r = {1.00, 0.0, 0.018, WaveShape::Gaussian};
    w.s = {-0.15, 0.035, 0.012, WaveShape::Gaussian};
    w.t = {0.30, 0.30, 0.060, WaveShape::Gaussian};
    return w;
  };
  auto base_v1 = [] {
    LeadWaves w;
    w.p = {0.05, 0.0, 0.025, WaveShape::Biphasic};
    w.q = {0.0, 0.0, 0.0, WaveShape::Gaussian};
    w.r = {0.25, 0.0, 0.015, WaveShape::Gaussian};
    w.s = {-0.45, 0.030, 0.020, WaveShape::Gaussian};
    w.t = {-0.10, 0.30, 0.060, WaveShape::Gaussian};
    return w;
  };

  std::array<ClassTemplate, 5> out;

  ClassTemplate& nsr = out[0];
  nsr.label = ClassLabel::NSR;
  nsr.lead_ii = base_ii();
  nsr.lead_v1 = base_v1();
  nsr.pr_s = 0.16;
  nsr.rr = {1.00, 0.05, RrRegime::Regular};
  detail::place_p(nsr.lead_ii, nsr.pr_s);
  nsr.lead_v1.p.center = nsr.lead_ii.p.center;

  ClassTemplate& af = out[1];
  af.label = ClassLabel::AF;
  af.lead_ii = base_ii();
  af.lead_v1 = base_v1();
  af.lead_ii.p.amp = 0.0;
  af.lead_v1.p.amp = 0.0;
  af.pr_s = 0.0;
  af.rr = {0.85, 0.12, RrRegime::Irregular};  // intervals 0.61/0.85/1.09 s, cv 0.23
  af.overlay = {Overlay::Fibrillatory, 0.05, 0.04, 4.4};

  ClassTemplate& afl = out[2];
  afl.label = ClassLabel::AFL;
  afl.lead_ii = base_ii();
  afl.lead_v1 = base_v1();
  afl.lead_ii.p.amp = 0.0;
  afl.lead_v1.p.amp = 0.0;
  afl.pr_s = 0.0;
  // 3:1 conduction of a 4.5 Hz flutter: ventricular cycle of 2/3 s.
  afl.rr = {2.0 / 3.0, 0.0, RrRegime::Regular};
  afl.overlay = {Overlay::Sawtooth, 0.15, 0.10, 4.5};

  ClassTemplate& lae = out[3];
  lae.label = ClassLabel::LAE;
  lae.lead_ii = base_ii();
  lae.lead_v1 = base_v1();
  lae.lead_ii.p = {0.18, 0.0, 0.035, WaveShape::Gaussian};  // 4*sigma = 0.14 s
  lae.lead_v1.p = {0.15, 0.0, 0.030, WaveShape::Biphasic};
  lae.pr_s = 0.16;
  lae.rr = {1.00, 0.05, RrRegime::Regular};
  detail::place_p(lae.lead_ii, lae.pr_s);
  lae.lead_v1.p.center = lae.lead_ii.p.center;

  ClassTemplate& avb = out[4];
  avb.label = ClassLabel::AVB1;
  avb.lead_ii = base_ii();
  avb.lead_v1 = base_v1();
  avb.pr_s = 0.26;
  avb.rr = {1.00, 0.05, RrRegime::Regular};
  detail::place_p(avb.lead_ii, avb.pr_s);
  avb.lead_v1.p.center = avb.lead_ii.p.center;

  return out;
}

namespace detail {

inline std::vector<double> rr_buckets(const RrModel& rr) {
  if (rr.jitter_s == 0.0) return {rr.mean_s};
  // Irregular rhythms swing twice the jitter. Three levels per regime keep
  // the interval alphabet small, so interval pairs recur often within a
  // record; continuous jitter would make nearly every beat context unique.
  const double j = (rr.regime == RrRegime::Regular ? 1.0 : 2.0) * rr.jitter_s;
  return {rr.mean_s - j, rr.mean_s, rr.mean_s + j};
}

// Fixed per-record composition: every interior bucket appears floor(m/B) or
// floor(m/B)+1 times; only the order is randomized. Keeps the window-length
// histogram identical across records of a class. The first and last few
// intervals are held at the mean bucket: the denoising filters carry seconds
// of memory past each record edge, and a fixed edge rhythm keeps the edge
// transient, and with it the early and late beat windows, identical across
// records of a class.
inline std::vector<double> draw_rr_sequence(const RrModel& rr, std::size_t n_intervals, Rng& rng) {
  const std::vector<double> buckets = rr_buckets(rr);
  const std::size_t pin = std::min<std::size_t>(4, n_intervals / 4);
  std::vector<double> seq(n_intervals, rr.mean_s);
  std::vector<double> interior;
  interior.reserve(n_intervals - 2 * pin);
  for (std::size_t i = 0; i + 2 * pin < n_intervals; ++i) {
    interior.push_back(buckets[i % buckets.size()]);
  }
  shuffle_in_place(interior, rng);
  for (std::size_t i = 0; i < interior.size(); ++i) seq[pin + i] = interior[i];
  return seq;
}

inline void add_wave(std::vector<double>& x, double fs, double center_s, const WaveParams& w) {
  if (w.amp == 0.0) return;
  const double reach = 8.0 * w.sigma;
  const auto lo = static_cast<long>(std::floor((center_s - reach) * fs));
  const auto hi = static_cast<long>(std::ceil((center_s + reach) * fs));
  for (long i = std::max(0l, lo); i <= hi && i < static_cast<long>(x.size()); ++i) {
    const double d = static_cast<double>(i) / fs - center_s;
    const double g = std::exp(-d * d / (2.0 * w.sigma * w.sigma));
    if (w.shape == WaveShape::Gaussian) {
      x[static_cast<std::size_t>(i)] += w.amp * g;
    } else {
      // Lobes peak at exactly +/-amp (normalized Gaussian derivative).
      x[static_cast<std::size_t>(i)] += -w.amp * std::exp(0.5) * (d / w.sigma) * g;
    }
  }
}

// Area and first moment of one beat, analytic; Biphasic waves have zero
// area and first moment -amp*sqrt(e)*sigma^2*sqrt(2*pi) about their center.
inline std::pair<double, double> beat_moments(const LeadWaves& w) {
  constexpr double rt2pi = 2.5066282746310002;
  double area = 0, m1 = 0;
  for (const WaveParams* wv : {&w.p, &w.q, &w.r, &w.s, &w.t}) {
    if (wv->amp == 0.0) continue;
    if (wv->shape == WaveShape::Gaussian) {
      const double a = wv->amp * wv->sigma * rt2pi;
      area += a;
      m1 += a * wv->center;
    } else {
      m1 += -wv->amp * std::exp(0.5) * wv->sigma * wv->sigma * rt2pi;
    }
  }
  return {area, m1};
}

// Two broad lobes that cancel the beat's area and first moment, keeping beat
// energy out of the high-pass filter's sub-0.1 Hz memory. Without them the
// denoising chain would imprint each record's interval ordering onto every
// beat window, and identical beats would stop being identical downstream.
// One lobe sits ahead of the P onset (0.35 s before R when no P exists), the
// other behind the T wave, so neither reaches the QRS or any P support.
inline std::array<WaveParams, 2> compensator(const LeadWaves& w) {
  constexpr double rt2pi = 2.5066282746310002;
  const auto [area, m1] = beat_moments(w);
  const double c1 = (w.p.amp != 0.0 ? p_onset_offset(w.p) - 0.15 : -0.35);
  const double c2 = (w.t.amp != 0.0 ? w.t.center : 0.30) + 0.15;
  const double a1 = (m1 - area * c2) / (c2 - c1);
  const double a2 = -area - a1;
  constexpr double sigma = 0.08;
  return {WaveParams{a1 / (sigma * rt2pi), c1, sigma, WaveShape::Gaussian},
          WaveParams{a2 / (sigma * rt2pi), c2, sigma, WaveShape::Gaussian}};
}

inline double sawtooth(double phase_cycles) {
  const double f = phase_cycles - std::floor(phase_cycles);
  return 1.0 - 2.0 * f;
}

inline void add_overlay(std::vector<double>& x, double fs, const OverlayParams& ov, double amp,
                        const std::vector<std::size_t>& r_indices) {
  if (ov.kind == Overlay::None || amp == 0.0 || r_indices.empty()) return;
  // Windows [R_k, R_{k+1}); the tail after the last peak gets up to 1.2 s.
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  for (std::size_t k = 0; k + 1 < r_indices.size(); ++k) {
    windows.emplace_back(r_indices[k], r_indices[k + 1]);
  }
  const std::size_t tail_end =
      std::min(x.size(), r_indices.back() + static_cast<std::size_t>(1.2 * fs));
  if (tail_end > r_indices.back()) windows.emplace_back(r_indices.back(), tail_end);

  const double f2 = ov.freq_hz * 59.0 / 44.0;  // fibrillatory component spread
  const double f3 = ov.freq_hz * 76.0 / 44.0;
  for (const auto& [lo, hi] : windows) {
    const double len_s = static_cast<double>(hi - lo) / fs;
    const double ramp = std::min(0.1, len_s / 4.0);  // cosine fade at each end
    double sum = 0.0;
    std::vector<double> vals(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      const double tau = static_cast<double>(i - lo) / fs;  // phase-locked to the window
      double v = 0.0;
      if (ov.kind == Overlay::Sawtooth) {
        v = amp * sawtooth(tau * ov.freq_hz);
      } else {
        v = amp * (std::sin(2.0 * M_PI * ov.freq_hz * tau) +
                   0.8 * std::sin(2.0 * M_PI * f2 * tau + 1.3) +
                   0.6 * std::sin(2.0 * M_PI * f3 * tau + 2.1));
      }
      // Taper to zero at the window ends. The fades sit under the QRS where
      // atrial waves are obscured anyway, and they remove the step the
      // window-locked phase would otherwise leave at each beat boundary;
      // such steps would leak into the high-pass band and couple beat
      // windows to the whole interval ordering.
      const double edge = std::min(tau, len_s - 1.0 / fs - tau);
      if (edge < ramp) v *= 0.5 - 0.5 * std::cos(M_PI * edge / ramp);
      vals[i - lo] = v;
      sum += v;
    }
    // Demean per window, then cancel the window's first moment with one
    // cycle of a sine (zero at the edges, zero sum over a full discrete
    // cycle). Area and tilt are what the high-pass filter's seconds-long
    // memory responds to; leaving either in would couple every beat window
    // to the record's interval ordering, as with the beat compensator.
    const double n = static_cast<double>(vals.size());
    const double mean = sum / n;
    double m1 = 0.0, basis_m1 = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double b = std::sin(2.0 * M_PI * static_cast<double>(i) / n);
      m1 += static_cast<double>(i) * (vals[i] - mean);
      basis_m1 += static_cast<double>(i) * b;
    }
    const double coeff = m1 / basis_m1;
    for (std::size_t i = lo; i < hi; ++i) {
      const double b = std::sin(2.0 * M_PI * static_cast<double>(i - lo) / n);
      x[i] += vals[i - lo] - mean - coeff * b;
    }
  }
}

}  // namespace detail

inline SynthRecord synth_record(const ClassTemplate& tpl, int n_beats, double fs = 500.0,
                                std::optional<double> noise_snr_db = std::nullopt,
                                std::uint64_t seed = 1) {
  if (n_beats < 1) throw InvalidSpec("a record needs at least one beat");
  if (fs <= 0) throw InvalidSpec("sampling rate must be positive");
  validate_template(tpl);

  Rng rng(seed);
  const auto n_intervals = static_cast<std::size_t>(n_beats - 1);
  const std::vector<double> rr = detail::draw_rr_sequence(tpl.rr, n_intervals, rng);

  const double lead_in = 0.8, tail = 0.8;
  std::vector<std::size_t> r_indices;
  double t = lead_in;
  for (int k = 0; k < n_beats; ++k) {
    r_indices.push_back(static_cast<std::size_t>(std::lround(t * fs)));
    if (k < n_beats - 1) t += rr[static_cast<std::size_t>(k)];
  }
  const auto n_samples = static_cast<std::size_t>(std::lround((t + tail) * fs));

  SynthRecord rec;
  rec.fs = fs;
  rec.lead_ii.assign(n_samples, 0.0);
  rec.lead_v1.assign(n_samples, 0.0);

  const auto comp_ii = detail::compensator(tpl.lead_ii);
  const auto comp_v1 = detail::compensator(tpl.lead_v1);
  for (std::size_t idx : r_indices) {
    const double center = static_cast<double>(idx) / fs;
    for (const WaveParams* w : {&tpl.lead_ii.p, &tpl.lead_ii.q, &tpl.lead_ii.r, &tpl.lead_ii.s,
                                &tpl.lead_ii.t, &comp_ii[0], &comp_ii[1]}) {
      detail::add_wave(rec.lead_ii, fs, center + w->center, {w->amp, 0, w->sigma, w->shape});
    }
    for (const WaveParams* w : {&tpl.lead_v1.p, &tpl.lead_v1.q, &tpl.lead_v1.r, &tpl.lead_v1.s,
                                &tpl.lead_v1.t, &comp_v1[0], &comp_v1[1]}) {
      detail::add_wave(rec.lead_v1, fs, center + w->center, {w->amp, 0, w->sigma, w->shape});
    }
  }

  detail::add_overlay(rec.lead_ii, fs, tpl.overlay, tpl.overlay.amp_ii, r_indices);
  detail::add_overlay(rec.lead_v1, fs, tpl.overlay, tpl.overlay.amp_v1, r_indices);

  if (noise_snr_db) {
    for (std::vector<double>* lead : {&rec.lead_ii, &rec.lead_v1}) {
      double power = 0;
      for (double v : *lead) power += v * v;
      power /= static_cast<double>(lead->size());
      const double sigma = std::sqrt(power / std::pow(10.0, *noise_snr_db / 10.0));
      for (double& v : *lead) v += sigma * draw_normal(rng);
    }
  }

  rec.truth.label = tpl.label;
  const bool has_p = tpl.lead_ii.p.amp != 0.0;
  for (std::size_t idx : r_indices) {
    BeatTruth b;
    b.r_index = idx;
    b.r_time_s = static_cast<double>(idx) / fs;
    if (has_p) {
      b.pr_s = tpl.pr_s;
      b.p_onset_s = b.r_time_s + detail::p_onset_offset(tpl.lead_ii.p);
      b.p_offset_s = b.r_time_s + detail::p_offset_offset(tpl.lead_ii.p);
    }
    rec.truth.beats.push_back(b);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// On-disk cohorts through the same formats the ingestion side reads.

struct SynthCohortSpec {
  std::array<int, 5> patients_per_class = {10, 10, 10, 10, 10};
  int beats_min = 20;
  int beats_max = 20;
  double fs = 500.0;
  std::optional<double> noise_snr_db;
  std::uint64_t seed = 1;
  std::array<ClassTemplate, 5> templates = default_templates();
};

struct SynthPatientInfo {
  std::string record_id;
  ClassLabel label = ClassLabel::NSR;
  int age = 0;
  Sex sex = Sex::Unknown;
  GroundTruth truth;
};

inline std::vector<std::uint8_t> digitize_record(const SynthRecord& rec, double gain = 1000.0) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(4 * rec.lead_ii.size());
  auto push = [&](double mv) {
    long v = std::lround(mv * gain);
    v = std::clamp(v, -32768l, 32767l);
    bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
    bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  };
  for (std::size_t i = 0; i < rec.lead_ii.size(); ++i) {
    push(rec.lead_ii[i]);
    push(rec.lead_v1[i]);
  }
  return bytes;
}

inline RecordHeader make_synth_header(const std::string& record_id, const SynthRecord& rec,
                                      double gain = 1000.0) {
  RecordHeader h;
  h.record_name = record_id;
  h.n_signals = 2;
  h.fs = rec.fs;
  h.n_samples = static_cast<long>(rec.lead_ii.size());
  const char* leads[2] = {"II", "V1"};
  const std::vector<double>* arr[2] = {&rec.lead_ii, &rec.lead_v1};
  for (int i = 0; i < 2; ++i) {
    SignalDesc d;
    d.file = record_id + ".dat";
    d.format_code = 16;
    d.gain = gain;
    d.baseline = 0.0;
    d.units = "mV";
    d.adc_res = 16;
    d.adc_zero = 0;
    long init = 0, sum = 0;
    for (std::size_t k = 0; k < arr[i]->size(); ++k) {
      const long v = std::clamp(std::lround((*arr[i])[k] * gain), -32768l, 32767l);
      if (k == 0) init = v;
      sum += v;
    }
    d.init_value = init;
    // WFDB checksum convention: 16-bit wraparound sum of the samples.
    d.checksum = static_cast<std::int16_t>(static_cast<std::uint16_t>(sum & 0xffff));
    d.block_size = 0;
    d.lead_name = leads[i];
    h.signals.push_back(std::move(d));
  }
  return h;
}

inline std::vector<SynthPatientInfo> synth_cohort(const SynthCohortSpec& spec,
                                                  const std::filesystem::path& out_dir) {
  for (int c : spec.patients_per_class) {
    if (c < 0) throw InvalidSpec("patient counts cannot be negative");
  }
  if (spec.beats_min < 1 || spec.beats_max < spec.beats_min) {
    throw InvalidSpec("beat range needs 1 <= min <= max");
  }
  for (const ClassTemplate& tpl : spec.templates) validate_template(tpl);

  const auto code_of = [] {
    std::array<std::string, 5> codes;
    for (const auto& [code, label] : default_label_map()) {
      codes[static_cast<std::size_t>(static_cast<int>(label))] = code;
    }
    return codes;
  }();

  std::filesystem::create_directories(out_dir);
  std::vector<SynthPatientInfo> out;
  for (int cls = 0; cls < 5; ++cls) {
    for (int i = 0; i < spec.patients_per_class[static_cast<std::size_t>(cls)]; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "Y%d%03d", cls, i);
      const std::uint64_t rec_seed = spec.seed ^ fnv1a64(id);
      Rng pick(rec_seed);
      const int n_beats =
          spec.beats_min +
          static_cast<int>(spec.beats_max > spec.beats_min
                               ? draw_index(pick, static_cast<std::size_t>(spec.beats_max - spec.beats_min + 1))
                               : 0);
      const SynthRecord rec = synth_record(spec.templates[static_cast<std::size_t>(cls)], n_beats,
                                           spec.fs, spec.noise_snr_db, rec_seed);

      SynthPatientInfo info;
      info.record_id = id;
      info.label = static_cast<ClassLabel>(cls);
      info.age = 25 + (7 * i + 13 * cls) % 50;
      info.sex = (i % 2 == 0) ? Sex::Male : Sex::Female;
      info.truth = rec.truth;

      PatientMeta meta;
      meta.age = info.age;
      meta.sex = info.sex;
      meta.dx_codes = {code_of[static_cast<std::size_t>(cls)]};

      const RecordHeader header = make_synth_header(info.record_id, rec);
      const auto bytes = digitize_record(rec);
      write_file_atomic(out_dir / (info.record_id + ".hea"), serialize_header(header, &meta));
      write_file_atomic(out_dir / (info.record_id + ".dat"),
                        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      out.push_back(std::move(info));
    }
  }
  return out;
}

}  // namespace ecgq
