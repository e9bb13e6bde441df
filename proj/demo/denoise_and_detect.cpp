// Denoise one record and detect its R peaks.
//
//   demo_denoise [record.hea]
//
// With a header path the record is read from disk; without one a noisy
// synthetic atrial-fibrillation record stands in, which also provides ground
// truth to score the detector against.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ecgq/filters.hpp"
#include "ecgq/qrs.hpp"
#include "ecgq/sqi.hpp"
#include "ecgq/synth.hpp"
#include "ecgq/wfdb.hpp"

using namespace ecgq;

namespace {

void print_sqi(const char* tag, const SqiReport& r) {
  std::printf("  %-16s skew %+7.3f  excess kurt %7.3f  p_sqi %.3f  bas_sqi %.3f  rr cv %s\n",
              tag, r.skewness, r.excess_kurtosis, r.p_sqi, r.bas_sqi,
              r.rr_cv ? fmt_double(*r.rr_cv).c_str() : "n/a");
}

}  // namespace

int main(int argc, char** argv) try {
  double fs = 500.0;
  std::vector<double> lead_ii, lead_v1;
  std::optional<std::vector<std::size_t>> truth;

  if (argc > 1) {
    const ParsedRecord rec = parse_header(read_text_file(argv[1]));
    const auto dir = std::filesystem::path(argv[1]).parent_path();
    const auto payload = read_binary_file(dir / rec.header.signals.front().file);
    const SignalMatrix leads = select_leads(read_signal(rec.header, payload), rec.header);
    fs = rec.header.fs;
    lead_ii = leads[0];
    lead_v1 = leads[1];
    std::printf("record %s: %ld samples at %g Hz\n", rec.header.record_name.c_str(),
                rec.header.n_samples, fs);
  } else {
    const ClassTemplate af = default_templates()[1];
    const SynthRecord rec = synth_record(af, 30, fs, 10.0, 7);
    lead_ii = rec.lead_ii;
    lead_v1 = rec.lead_v1;
    truth.emplace();
    for (const BeatTruth& b : rec.truth.beats) truth->push_back(b.r_index);
    std::printf("synthetic AF record: %zu samples at %g Hz, 10 dB SNR, %zu true beats\n",
                lead_ii.size(), fs, truth->size());
  }

  const FilterSpec spec;
  const std::vector<double> filt_ii = apply_notch(apply_bandpass(lead_ii, fs, spec), fs, spec);
  const std::vector<double> filt_v1 = apply_notch(apply_bandpass(lead_v1, fs, spec), fs, spec);
  const std::vector<double> std_ii = standardize(filt_ii);

  const RPeakList peaks = detect_qrs(std_ii, fs);
  std::printf("detected %zu R peaks\n", peaks.indices.size());

  std::printf("lead II quality:\n");
  print_sqi("raw", compute_sqi(lead_ii, peaks.indices, fs));
  print_sqi("filtered", compute_sqi(filt_ii, peaks.indices, fs));
  std::printf("lead V1 quality:\n");
  print_sqi("raw", compute_sqi(lead_v1, peaks.indices, fs));
  print_sqi("filtered", compute_sqi(filt_v1, peaks.indices, fs));

  if (peaks.indices.size() > 1) {
    std::printf("first RR intervals (s):");
    for (std::size_t k = 1; k < peaks.indices.size() && k <= 8; ++k) {
      std::printf(" %.3f", static_cast<double>(peaks.indices[k] - peaks.indices[k - 1]) / fs);
    }
    std::printf("\n");
  }

  if (truth) {
    const auto tol = static_cast<std::size_t>(0.010 * fs);
    std::size_t hits = 0;
    std::vector<bool> used(truth->size(), false);
    for (const std::size_t d : peaks.indices) {
      for (std::size_t k = 0; k < truth->size(); ++k) {
        const std::size_t dist = d > (*truth)[k] ? d - (*truth)[k] : (*truth)[k] - d;
        if (!used[k] && dist <= tol) {
          used[k] = true;
          ++hits;
          break;
        }
      }
    }
    std::printf("against ground truth at +-10 ms: %zu/%zu matched, %zu spurious\n", hits,
                truth->size(), peaks.indices.size() - hits);
  }
  return 0;
} catch (const ecgq::Error& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 1;
}
