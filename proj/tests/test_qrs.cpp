#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ecgq/filters.hpp"
#include "ecgq/qrs.hpp"
#include "ecgq/synth.hpp"

using namespace ecgq;

namespace {

std::vector<double> denoise(const std::vector<double>& x, double fs) {
  const FilterSpec spec;
  return apply_notch(apply_bandpass(x, fs, spec), fs, spec);
}

struct MatchStats {
  std::size_t tp = 0, fp = 0, fn = 0;
  double sensitivity() const { return tp + fn ? double(tp) / double(tp + fn) : 0.0; }
  double ppv() const { return tp + fp ? double(tp) / double(tp + fp) : 0.0; }
};

// One-to-one left-to-right matching between sorted truth and detections.
MatchStats match_peaks(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& det,
                       std::size_t tol) {
  MatchStats m;
  std::vector<bool> used(det.size(), false);
  std::size_t j = 0;
  for (const std::size_t t : truth) {
    while (j < det.size() && (used[j] || det[j] + tol < t)) ++j;
    if (j < det.size() && det[j] <= t + tol) {
      used[j] = true;
      ++m.tp;
    } else {
      ++m.fn;
    }
  }
  for (const bool u : used)
    if (!u) ++m.fp;
  return m;
}

std::vector<std::size_t> truth_indices(const SynthRecord& rec) {
  std::vector<std::size_t> out;
  for (const BeatTruth& b : rec.truth.beats) out.push_back(b.r_index);
  return out;
}

}  // namespace

TEST_CASE("clean sinus detections land on the generator truth") {
  const ClassTemplate tpl = default_templates()[0];
  const SynthRecord rec = synth_record(tpl, 10, 500.0, std::nullopt, 5);
  const RPeakList peaks = detect_qrs(denoise(rec.lead_ii, rec.fs), rec.fs);
  const std::vector<std::size_t> truth = truth_indices(rec);
  REQUIRE(peaks.indices.size() == truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const auto diff = static_cast<long long>(peaks.indices[k]) - static_cast<long long>(truth[k]);
    INFO("beat " << k << " truth " << truth[k] << " detected " << peaks.indices[k]);
    REQUIRE(std::llabs(diff) <= 5);
  }
}

TEST_CASE("an all-zeros trace has no beats to find") {
  const std::vector<double> flat(4000, 0.0);
  REQUIRE_THROWS_AS(detect_qrs(flat, 500.0), NoBeats);
  REQUIRE_THROWS_AS(detect_qrs(std::vector<double>{0.0, 0.0}, 500.0), NoBeats);
}

TEST_CASE("every class template detects cleanly") {
  const auto templates = default_templates();
  for (std::size_t c = 0; c < templates.size(); ++c) {
    const SynthRecord rec = synth_record(templates[c], 20, 500.0, std::nullopt, 21 + c);
    const RPeakList peaks = detect_qrs(denoise(rec.lead_ii, rec.fs), rec.fs);
    const MatchStats m = match_peaks(truth_indices(rec), peaks.indices, 5);
    INFO("class " << c << " tp " << m.tp << " fp " << m.fp << " fn " << m.fn);
    REQUIRE(m.sensitivity() >= 0.99);
    REQUIRE(m.ppv() >= 0.99);
  }
}

TEST_CASE("noisy sinus stays above 0.95 sensitivity and precision") {
  const ClassTemplate tpl = default_templates()[0];
  const SynthRecord rec = synth_record(tpl, 100, 500.0, 10.0, 11);
  const RPeakList peaks = detect_qrs(denoise(rec.lead_ii, rec.fs), rec.fs);
  const MatchStats m = match_peaks(truth_indices(rec), peaks.indices, 5);
  INFO("tp " << m.tp << " fp " << m.fp << " fn " << m.fn);
  REQUIRE(m.sensitivity() >= 0.95);
  REQUIRE(m.ppv() >= 0.95);
}

TEST_CASE("detections respect the refractory gap on arbitrary noise") {
  const double fs = 500.0;
  const auto gap_min = static_cast<std::size_t>(0.2 * fs);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<double> noise(5000);
    for (double& v : noise) v = draw_normal(rng);
    try {
      const RPeakList peaks = detect_qrs(noise, fs);
      for (std::size_t k = 1; k < peaks.indices.size(); ++k) {
        REQUIRE(peaks.indices[k] > peaks.indices[k - 1]);
        REQUIRE(peaks.indices[k] - peaks.indices[k - 1] >= gap_min);
      }
    } catch (const NoBeats&) {
      // an empty result is a legal outcome on noise
    }
  }
}

TEST_CASE("translated input yields translated detections") {
  const ClassTemplate tpl = default_templates()[0];
  const SynthRecord rec = synth_record(tpl, 12, 500.0, std::nullopt, 31);
  const std::vector<double> base = denoise(rec.lead_ii, rec.fs);
  const std::size_t shift = 191;
  std::vector<double> moved(shift, 0.0);
  moved.insert(moved.end(), base.begin(), base.end());
  const RPeakList a = detect_qrs(base, rec.fs);
  const RPeakList b = detect_qrs(moved, rec.fs);
  REQUIRE(a.indices.size() == b.indices.size());
  for (std::size_t k = 0; k < a.indices.size(); ++k)
    REQUIRE(b.indices[k] == a.indices[k] + shift);
}

TEST_CASE("two peaks make one beat window") {
  std::vector<double> ii(1000), v1(1000);
  for (std::size_t i = 0; i < ii.size(); ++i) {
    ii[i] = static_cast<double>(i);
    v1[i] = -static_cast<double>(i);
  }
  const RPeakList peaks{{200, 600}, 500.0};
  const std::vector<BeatWindow> beats = segment_beats(peaks, ii, v1, ClassLabel::AF, "r1");
  REQUIRE(beats.size() == 1);
  const BeatWindow& w = beats[0];
  REQUIRE(w.beat_number == 0);
  REQUIRE(w.start == 200);
  REQUIRE(w.end == 600);
  REQUIRE(w.lead_ii.size() == 400);
  REQUIRE(w.lead_v1.size() == 400);
  REQUIRE(w.lead_ii.front() == 200.0);
  REQUIRE(w.lead_ii.back() == 599.0);
  REQUIRE(w.lead_v1.front() == -200.0);
  REQUIRE(w.label == ClassLabel::AF);
  REQUIRE(w.patient_id == "r1");
}

TEST_CASE("equally spaced peaks cut equal disjoint windows") {
  std::vector<double> ii(5000), v1(5000);
  for (std::size_t i = 0; i < ii.size(); ++i) ii[i] = v1[i] = 0.001 * static_cast<double>(i);
  RPeakList peaks;
  peaks.fs = 500.0;
  for (std::size_t k = 0; k < 11; ++k) peaks.indices.push_back(100 + 400 * k);
  const std::vector<BeatWindow> beats = segment_beats(peaks, ii, v1, ClassLabel::NSR, "r2");
  REQUIRE(beats.size() == 10);
  for (std::size_t k = 0; k < beats.size(); ++k) {
    REQUIRE(beats[k].end - beats[k].start == 400);
    REQUIRE(beats[k].beat_number == k);
    if (k) REQUIRE(beats[k].start == beats[k - 1].end);
    for (std::size_t i = 0; i < 400; ++i)
      REQUIRE(beats[k].lead_ii[i] == ii[beats[k].start + i]);
  }
  REQUIRE(beats.front().start == peaks.indices.front());
  REQUIRE(beats.back().end == peaks.indices.back());
}

TEST_CASE("implausible windows are dropped and numbering stays gapless") {
  const std::vector<double> ii(3000, 0.0), v1(3000, 0.0);
  std::vector<std::string> log;
  const RPeakList peaks{{0, 500, 2000, 2500}, 500.0};  // middle gap is 3 s
  const std::vector<BeatWindow> beats = segment_beats(peaks, ii, v1, ClassLabel::NSR, "r3", &log);
  REQUIRE(beats.size() == 2);
  REQUIRE(beats[0].start == 0);
  REQUIRE(beats[0].end == 500);
  REQUIRE(beats[1].start == 2000);
  REQUIRE(beats[1].end == 2500);
  REQUIRE(beats[0].beat_number == 0);
  REQUIRE(beats[1].beat_number == 1);
  REQUIRE(log.size() == 1);
  REQUIRE(log[0].find("1500") != std::string::npos);

  const RPeakList tight{{0, 100, 600}, 500.0};  // first gap under 0.24 s
  const std::vector<BeatWindow> kept = segment_beats(tight, ii, v1, ClassLabel::NSR, "r4");
  REQUIRE(kept.size() == 1);
  REQUIRE(kept[0].start == 100);
  REQUIRE(kept[0].beat_number == 0);

  REQUIRE_THROWS_AS(segment_beats(RPeakList{{42}, 500.0}, ii, v1, ClassLabel::NSR, "r5"),
                    TooFewPeaks);
}

TEST_CASE("beat table export matches the column contract") {
  std::vector<double> ii(1000), v1(1000);
  for (std::size_t i = 0; i < ii.size(); ++i) {
    ii[i] = 0.25 * static_cast<double>(i);
    v1[i] = -0.5 * static_cast<double>(i);
  }
  const RPeakList peaks{{100, 400}, 500.0};
  const std::vector<BeatWindow> beats = segment_beats(peaks, ii, v1, ClassLabel::NSR, "p01");
  const std::string csv = export_beat_table(beats);
  const std::vector<std::string> lines = split(csv, '\n');
  REQUIRE(lines.front() == kBeatTableHeader);
  REQUIRE(lines.back().empty());  // trailing newline
  REQUIRE(lines.size() == 302);   // header + 300 rows + empty tail
  for (std::size_t r = 1; r <= 300; ++r) {
    const std::vector<std::string> f = split(lines[r], ',');
    REQUIRE(f.size() == 7);
    REQUIRE(f[0] == "p01");
    REQUIRE(f[1] == std::to_string(99 + r));
    REQUIRE(f[4] == "400");
    REQUIRE(f[5] == "0");
    REQUIRE(f[6] == "0");
  }
}

TEST_CASE("round-trip import reproduces the windows bit-exactly") {
  const ClassTemplate tpl = default_templates()[4];
  const SynthRecord rec = synth_record(tpl, 8, 500.0, 25.0, 47);
  const std::vector<double> ii = standardize(denoise(rec.lead_ii, rec.fs));
  const std::vector<double> v1 = standardize(denoise(rec.lead_v1, rec.fs));
  const RPeakList peaks = detect_qrs(denoise(rec.lead_ii, rec.fs), rec.fs);
  const std::vector<BeatWindow> beats =
      segment_beats(peaks, ii, v1, ClassLabel::AVB1, "synth-1AVB-000");
  REQUIRE(beats.size() >= 5);
  const std::vector<BeatWindow> back = import_beat_table(export_beat_table(beats));
  REQUIRE(back.size() == beats.size());
  for (std::size_t k = 0; k < beats.size(); ++k) {
    REQUIRE(back[k].patient_id == beats[k].patient_id);
    REQUIRE(back[k].beat_number == beats[k].beat_number);
    REQUIRE(back[k].start == beats[k].start);
    REQUIRE(back[k].end == beats[k].end);
    REQUIRE(back[k].label == beats[k].label);
    REQUIRE(back[k].lead_ii == beats[k].lead_ii);
    REQUIRE(back[k].lead_v1 == beats[k].lead_v1);
  }
}

TEST_CASE("beat table import rejects malformed input") {
  REQUIRE_THROWS_AS(import_beat_table("nonsense\n"), IoError);
  const std::string header(kBeatTableHeader);
  REQUIRE_THROWS_AS(import_beat_table(header + "\np,1,0.5,0.5,2,0\n"), IoError);
  REQUIRE_THROWS_AS(import_beat_table(header + "\np,1,0.5,0.5,3,0,9\n"), IoError);
  // sample numbers must be contiguous within a beat
  REQUIRE_THROWS_AS(
      import_beat_table(header + "\np,1,0.5,0.5,3,0,0\np,3,0.5,0.5,3,0,0\n"), IoError);
}

TEST_CASE("peak list serializes as a JSON array") {
  REQUIRE(peaks_to_json(RPeakList{{}, 500.0}) == "[]");
  REQUIRE(peaks_to_json(RPeakList{{12, 512, 1024}, 500.0}) == "[12,512,1024]");
}
