#pragma once
// Hamilton adaptive-threshold QRS detection, RR-window beat segmentation,
// and the per-sample beat table CSV that feeds the encoder.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgq/common.hpp"
#include "ecgq/filters.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

struct RPeakList {
  std::vector<std::size_t> indices;  // ascending; consecutive gaps >= 0.2 s * fs
  double fs = 0.0;
};

// One beat = the RR interval ending at the labeling R peak, so the window
// carries the P wave and PR interval that precede that peak.
struct BeatWindow {
  std::string patient_id;
  std::size_t beat_number = 0;
  std::size_t start = 0;  // opening R peak, inclusive
  std::size_t end = 0;    // labeling R peak, exclusive
  std::vector<double> lead_ii;  // standardized slices, equal length end - start
  std::vector<double> lead_v1;
  ClassLabel label = ClassLabel::NSR;
};

namespace qrs_detail {

// Running mean over the last 8 entries, the buffer depth Hamilton uses for
// both the QRS and the noise peak estimates.
struct MeanBuf8 {
  double vals[8] = {};
  std::size_t count = 0;
  std::size_t next = 0;
  void push(double v) {
    vals[next] = v;
    next = (next + 1) % 8;
    if (count < 8) ++count;
  }
  bool empty() const { return count == 0; }
  double mean() const {
    if (count == 0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += vals[i];
    return s / static_cast<double>(count);
  }
};

// Centered moving average, width 2*half+1. Constant divisor; the taper it
// causes inside `half` samples of the ends is irrelevant to peak picking.
inline std::vector<double> moving_average(const std::vector<double>& v, std::size_t half) {
  const std::size_t n = v.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
  std::vector<double> out(n, 0.0);
  const double width = static_cast<double>(2 * half + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = i > half ? i - half : 0;
    const std::size_t b = std::min(n, i + half + 1);
    out[i] = (prefix[b] - prefix[a]) / width;
  }
  return out;
}

}  // namespace qrs_detail

// Hamilton pipeline on an already-denoised lead: 8-16 Hz zero-phase bandpass,
// rectified central difference, 80 ms smoothing, then peak classification with
// the adaptive threshold  noise_mean + 0.3125 * (qrs_mean - noise_mean)  over
// the last 8 peaks of each kind. 200 ms refractory; peaks within 360 ms of the
// prior beat whose slope is under half the prior beat's slope are T waves;
// when the gap since the last beat exceeds 1.5x the running RR mean, the
// strongest sub-threshold candidate above half threshold is taken instead.
// Each detection is snapped to the strongest input deflection within 40 ms.
inline RPeakList detect_qrs(std::span<const double> signal, double fs) {
  const std::size_t n = signal.size();
  const auto at_rate = [fs](double seconds) {
    return static_cast<std::size_t>(std::llround(seconds * fs));
  };
  const std::size_t refractory = at_rate(0.2);
  const std::size_t twave_win = at_rate(0.36);
  const std::size_t half40 = at_rate(0.04);
  if (n < 3) throw NoBeats("too few samples to detect in");

  std::vector<double> band = filtfilt(design_bandpass(2, 8.0, 16.0, fs), signal);
  std::vector<double> slope(n, 0.0);  // rectified central difference
  for (std::size_t i = 1; i + 1 < n; ++i) slope[i] = std::abs(0.5 * (band[i + 1] - band[i - 1]));
  const std::vector<double> smoothed = qrs_detail::moving_average(slope, half40);

  const auto slope_at = [&](std::size_t i) {
    const std::size_t a = i > half40 ? i - half40 : 0;
    const std::size_t b = std::min(n, i + half40 + 1);
    double s = 0.0;
    for (std::size_t k = a; k < b; ++k) s = std::max(s, slope[k]);
    return s;
  };

  // Hamilton leaves initialization open: seed the QRS estimate from the
  // strongest smoothed value in the first two seconds (whole record if flat).
  double qrs_seed = 0.0;
  const std::size_t lead_in = std::min(n, at_rate(2.0));
  for (std::size_t i = 0; i < lead_in; ++i) qrs_seed = std::max(qrs_seed, smoothed[i]);
  if (qrs_seed == 0.0)
    for (std::size_t i = 0; i < n; ++i) qrs_seed = std::max(qrs_seed, smoothed[i]);
  if (qrs_seed <= 0.0) throw NoBeats("signal has no slope energy");
  qrs_seed *= 0.6;

  qrs_detail::MeanBuf8 qrs_peaks, noise_peaks, rr_gaps;
  struct Cand {
    std::size_t idx;
    double height, slope;
  };
  std::vector<Cand> pending;  // sub-threshold peaks since the last beat
  std::vector<std::size_t> det;
  std::ptrdiff_t last = -1;
  double last_slope = 0.0;

  const auto threshold = [&]() {
    const double qm = qrs_peaks.empty() ? qrs_seed : qrs_peaks.mean();
    const double nm = noise_peaks.mean();
    return nm + 0.3125 * (qm - nm);
  };
  const auto accept = [&](std::size_t i, double height, double sl) {
    if (last >= 0) rr_gaps.push(static_cast<double>(i) - static_cast<double>(last));
    qrs_peaks.push(height);
    last = static_cast<std::ptrdiff_t>(i);
    last_slope = sl;
    det.push_back(i);
    pending.clear();
  };

  const auto classify = [&](std::size_t i, double height) {
    if (last >= 0 && !rr_gaps.empty() &&
        static_cast<double>(i) - static_cast<double>(last) > 1.5 * rr_gaps.mean()) {
      const double half_th = 0.5 * threshold();
      const Cand* best = nullptr;
      for (const Cand& c : pending) {
        if (c.idx >= static_cast<std::size_t>(last) + refractory && c.height > half_th &&
            (!best || c.height > best->height))
          best = &c;
      }
      if (best) {
        const Cand b = *best;
        accept(b.idx, b.height, b.slope);
      }
    }
    if (last >= 0 && i - static_cast<std::size_t>(last) < refractory) return;
    const double sl = slope_at(i);
    if (last >= 0 && i - static_cast<std::size_t>(last) < twave_win && sl < 0.5 * last_slope) {
      noise_peaks.push(height);  // T wave: rejected for cause, not a search-back candidate
      return;
    }
    if (height > threshold()) {
      accept(i, height, sl);
    } else {
      noise_peaks.push(height);
      if (height > 0.5 * threshold()) pending.push_back({i, height, sl});
    }
  };

  // Hamilton's peak rule: a burst becomes one candidate, reported at its
  // maximum once the smoothed signal falls to half that maximum. Without it
  // the QRS envelope's ripples would fire on the leading flank and the
  // refractory would then mask the true apex.
  std::size_t burst_arg = 0;
  double burst_max = 0.0;
  bool armed = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (smoothed[i] > burst_max) {
      burst_max = smoothed[i];
      burst_arg = i;
      armed = true;
    } else if (!armed && smoothed[i] < burst_max) {
      burst_max = smoothed[i];  // track the falling floor between bursts
      burst_arg = i;
    }
    if (armed && smoothed[i] <= 0.5 * burst_max) {
      if (burst_max > 0.05 * threshold()) classify(burst_arg, burst_max);
      armed = false;
      burst_max = smoothed[i];
      burst_arg = i;
    }
  }
  if (det.empty()) throw NoBeats("no QRS complexes found");

  // Pin each detection to the strongest input deflection nearby; snapping can
  // only move an index by half40 < refractory/2, so order is preserved, but
  // two detections may still collide on one extremum. Keep the earlier.
  std::vector<std::size_t> snapped;
  snapped.reserve(det.size());
  for (const std::size_t i : det) {
    const std::size_t a = i > half40 ? i - half40 : 0;
    const std::size_t b = std::min(n, i + half40 + 1);
    std::size_t best = a;
    for (std::size_t k = a; k < b; ++k)
      if (std::abs(signal[k]) > std::abs(signal[best])) best = k;
    if (!snapped.empty() && (best <= snapped.back() || best - snapped.back() < refractory))
      continue;
    snapped.push_back(best);
  }
  if (snapped.empty()) throw NoBeats("no QRS complexes found");
  return RPeakList{std::move(snapped), fs};
}

// Cut [R_k, R_{k+1}) windows from the standardized leads. Windows outside
// [0.24 s, 2.0 s] are dropped (reason appended to drop_log when given) and the
// surviving beats are renumbered from 0 without gaps.
inline std::vector<BeatWindow> segment_beats(const RPeakList& peaks,
                                             std::span<const double> lead_ii,
                                             std::span<const double> lead_v1, ClassLabel label,
                                             std::string_view patient_id,
                                             std::vector<std::string>* drop_log = nullptr) {
  const std::vector<std::size_t>& idx = peaks.indices;
  if (idx.size() < 2) throw TooFewPeaks("segmentation needs at least two R peaks");
  if (lead_ii.size() != lead_v1.size()) throw LengthMismatch("lead lengths differ");
  if (idx.back() > lead_ii.size()) throw LengthMismatch("R peak beyond the signal end");
  const std::size_t shortest = static_cast<std::size_t>(std::llround(0.24 * peaks.fs));
  const std::size_t longest = static_cast<std::size_t>(std::llround(2.0 * peaks.fs));
  std::vector<BeatWindow> out;
  out.reserve(idx.size() - 1);
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    const std::size_t start = idx[k];
    const std::size_t end = idx[k + 1];
    const std::size_t len = end - start;
    if (len < shortest || len > longest) {
      if (drop_log) {
        drop_log->push_back(std::string(patient_id) + ": window [" + std::to_string(start) +
                            ", " + std::to_string(end) + ") of " + std::to_string(len) +
                            " samples outside [" + std::to_string(shortest) + ", " +
                            std::to_string(longest) + "]");
      }
      continue;
    }
    BeatWindow w;
    w.patient_id = std::string(patient_id);
    w.beat_number = out.size();
    w.start = start;
    w.end = end;
    w.lead_ii.assign(lead_ii.begin() + static_cast<std::ptrdiff_t>(start),
                     lead_ii.begin() + static_cast<std::ptrdiff_t>(end));
    w.lead_v1.assign(lead_v1.begin() + static_cast<std::ptrdiff_t>(start),
                     lead_v1.begin() + static_cast<std::ptrdiff_t>(end));
    w.label = label;
    out.push_back(std::move(w));
  }
  return out;
}

inline constexpr std::string_view kBeatTableHeader =
    "patient_id,sample_number,lead_ii,lead_v1,qrs_peak_index,beat_number,label_int";

// One row per sample. qrs_peak_index is the labeling peak (the window's
// exclusive end), so start/end are both recoverable from the rows. Doubles go
// through shortest-round-trip formatting and import bit-exactly.
inline std::string export_beat_table(const std::vector<BeatWindow>& beats) {
  std::string out(kBeatTableHeader);
  out += '\n';
  for (const BeatWindow& w : beats) {
    for (std::size_t i = 0; i < w.lead_ii.size(); ++i) {
      out += w.patient_id;
      out += ',';
      out += std::to_string(w.start + i);
      out += ',';
      out += fmt_double(w.lead_ii[i]);
      out += ',';
      out += fmt_double(w.lead_v1[i]);
      out += ',';
      out += std::to_string(w.end);
      out += ',';
      out += std::to_string(w.beat_number);
      out += ',';
      out += std::to_string(static_cast<int>(w.label));
      out += '\n';
    }
  }
  return out;
}

inline std::vector<BeatWindow> import_beat_table(std::string_view csv) {
  std::vector<std::string> lines = split(csv, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty() || trim(lines.front()) != kBeatTableHeader)
    throw IoError("beat table: missing or wrong header row");
  std::vector<BeatWindow> out;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::vector<std::string> f = split(lines[ln], ',');
    if (f.size() != 7) throw IoError("beat table: row " + std::to_string(ln) + " has " +
                                     std::to_string(f.size()) + " fields");
    const std::size_t sample = static_cast<std::size_t>(parse_long(f[1], "sample_number"));
    const std::size_t beat_no = static_cast<std::size_t>(parse_long(f[5], "beat_number"));
    const long label_int = parse_long(f[6], "label_int");
    if (label_int < 0 || label_int > 4) throw IoError("beat table: label_int out of range");
    const bool fresh =
        out.empty() || out.back().patient_id != f[0] || out.back().beat_number != beat_no;
    if (fresh) {
      BeatWindow w;
      w.patient_id = f[0];
      w.beat_number = beat_no;
      w.start = sample;
      w.end = static_cast<std::size_t>(parse_long(f[4], "qrs_peak_index"));
      w.label = static_cast<ClassLabel>(label_int);
      out.push_back(std::move(w));
    }
    BeatWindow& w = out.back();
    if (sample != w.start + w.lead_ii.size())
      throw IoError("beat table: sample numbers not contiguous at row " + std::to_string(ln));
    w.lead_ii.push_back(parse_double(f[2], "lead_ii"));
    w.lead_v1.push_back(parse_double(f[3], "lead_v1"));
  }
  for (const BeatWindow& w : out)
    if (w.start + w.lead_ii.size() != w.end)
      throw IoError("beat table: window length disagrees with qrs_peak_index for " +
                    w.patient_id + " beat " + std::to_string(w.beat_number));
  return out;
}

// Per-record peak list as a bare JSON array of sample numbers.
inline std::string peaks_to_json(const RPeakList& peaks) {
  std::string out = "[";
  for (std::size_t i = 0; i < peaks.indices.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(peaks.indices[i]);
  }
  out += ']';
  return out;
}

}  // namespace ecgq
