// Train and evaluate the beat classifier on an in-memory synthetic cohort,
// exercising the library end to end without touching the filesystem:
// generate -> denoise -> detect -> segment -> encode -> learn -> score.
//
//   demo_train [patients_per_class] [beats_per_record]

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ecgq/agent.hpp"
#include "ecgq/filters.hpp"
#include "ecgq/grid.hpp"
#include "ecgq/metrics.hpp"
#include "ecgq/qrs.hpp"
#include "ecgq/synth.hpp"

using namespace ecgq;

int main(int argc, char** argv) try {
  const int per_class = argc > 1 ? std::atoi(argv[1]) : 5;
  const int beats = argc > 2 ? std::atoi(argv[2]) : 15;
  if (per_class < 2 || beats < 3) {
    std::fprintf(stderr, "need at least 2 patients per class and 3 beats\n");
    return 1;
  }

  const double fs = 500.0;
  const FilterSpec spec;
  const auto templates = default_templates();

  // Per class, the last record is held out for testing.
  std::vector<BeatWindow> train_beats, test_beats;
  for (std::size_t cls = 0; cls < templates.size(); ++cls) {
    for (int p = 0; p < per_class; ++p) {
      const std::uint64_t seed = 1000 + 131 * cls + static_cast<std::uint64_t>(p);
      const SynthRecord rec = synth_record(templates[cls], beats, fs, std::nullopt, seed);
      const auto clean = [&](const std::vector<double>& x) {
        return standardize(apply_notch(apply_bandpass(x, fs, spec), fs, spec));
      };
      const std::vector<double> ii = clean(rec.lead_ii);
      const std::vector<double> v1 = clean(rec.lead_v1);
      const RPeakList peaks = detect_qrs(ii, fs);
      const std::string id = "D" + std::to_string(cls) + std::to_string(p);
      auto segs = segment_beats(peaks, ii, v1, static_cast<ClassLabel>(cls), id);
      auto& dest = p + 1 == per_class ? test_beats : train_beats;
      dest.insert(dest.end(), segs.begin(), segs.end());
    }
  }
  std::printf("cohort: %zu training beats, %zu held-out beats\n", train_beats.size(),
              test_beats.size());

  const EnvConfig env;  // grid-hash keying, 21 levels, [-1, +1] clip
  const auto train_split = encode_split(train_beats, env);
  const auto test_split = encode_split(test_beats, env);

  Hyperparams hp;  // alpha 0.001, gamma 0.9, tau 0.1, R3_softmax, 100 episodes
  const TrainResult result = train(train_split, test_split, hp);

  std::printf("\n  episode   eval accuracy   eval mean reward\n");
  for (const EvalRecord& ev : result.evals) {
    std::printf("  %7zu   %13.4f   %16.4f\n", ev.episode, ev.accuracy, ev.mean_reward);
  }

  const TestResult verdict = test(result.table, test_split, hp);
  const MetricsReport& rep = verdict.report;

  std::printf("\nconfusion (rows true, cols predicted):\n      ");
  for (std::size_t c = 0; c < kNumClasses; ++c)
    std::printf("%8s", label_name(static_cast<ClassLabel>(c)));
  std::printf("\n");
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    std::printf("%6s", label_name(static_cast<ClassLabel>(t)));
    for (std::size_t p = 0; p < kNumClasses; ++p)
      std::printf("%8llu", static_cast<unsigned long long>(rep.confusion.counts[t][p]));
    std::printf("\n");
  }
  std::printf("\nmacro accuracy %s, hamming loss %s, states learned %zu\n",
              fmt_double(rep.macro_accuracy).c_str(), fmt_double(rep.hamming_loss).c_str(),
              result.table.rows.size());
  return 0;
} catch (const ecgq::Error& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return 1;
}
