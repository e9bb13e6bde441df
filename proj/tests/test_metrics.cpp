#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ecgq/metrics.hpp"

using namespace ecgq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ecgq-metrics-" + std::to_string(Catch::rngSeed()) + "-" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<ClassLabel> labels(std::initializer_list<int> xs) {
  std::vector<ClassLabel> out;
  for (const int x : xs) out.push_back(static_cast<ClassLabel>(x));
  return out;
}

EpisodeLog dummy_log(std::size_t episode, double reward) {
  EpisodeLog log;
  log.episode = episode;
  log.mean_reward = reward;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    log.total_reward[c] = reward;
    log.accuracy[c] = 0.5;
    log.mean_elapsed[c] = 0.001;
    log.mean_confidence[c] = 0.3;
    log.count[c] = 4;
  }
  return log;
}

}  // namespace

TEST_CASE("all-correct predictions give a diagonal matrix") {
  const auto truths = labels({0, 1, 2, 3, 4, 0, 1, 2, 3, 4});
  const ConfusionMatrix cm = confusion(truths, truths);
  REQUIRE(cm.total() == 10);
  REQUIRE(cm.diagonal() == 10);
  for (std::size_t t = 0; t < kNumClasses; ++t)
    for (std::size_t p = 0; p < kNumClasses; ++p)
      REQUIRE(cm.counts[t][p] == (t == p ? 2u : 0u));
}

TEST_CASE("constant predictions put all mass in one column") {
  const auto truths = labels({0, 1, 2, 3, 4});
  const auto preds = labels({0, 0, 0, 0, 0});
  const ConfusionMatrix cm = confusion(preds, truths);
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    REQUIRE(cm.counts[t][0] == 1);
    for (std::size_t p = 1; p < kNumClasses; ++p) REQUIRE(cm.counts[t][p] == 0);
  }
}

TEST_CASE("a small fixture matches the hand count") {
  const auto truths = labels({0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 4, 4, 4, 4, 0, 1});
  const auto preds = labels({0, 0, 1, 0, 1, 1, 0, 2, 2, 2, 3, 2, 3, 3, 4, 4, 0, 4, 0, 1});
  const ConfusionMatrix cm = confusion(preds, truths);
  REQUIRE(cm.total() == 20);
  REQUIRE(cm.counts[0][0] == 4);
  REQUIRE(cm.counts[0][1] == 1);
  REQUIRE(cm.counts[1][1] == 3);
  REQUIRE(cm.counts[1][0] == 1);
  REQUIRE(cm.counts[2][2] == 4);
  REQUIRE(cm.counts[2][3] == 1);
  REQUIRE(cm.counts[3][3] == 2);
  REQUIRE(cm.counts[4][4] == 3);
  REQUIRE(cm.counts[4][0] == 1);
  REQUIRE_THROWS_AS(confusion(labels({0}), labels({0, 1})), LengthMismatch);
}

TEST_CASE("a diagonal matrix scores ones across the board") {
  ConfusionMatrix cm;
  for (std::size_t c = 0; c < kNumClasses; ++c) cm.counts[c][c] = 7;
  const MetricsReport rep = per_class_metrics(cm);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    REQUIRE(rep.per_class[c].accuracy == 1.0);
    REQUIRE(rep.per_class[c].precision == 1.0);
    REQUIRE(rep.per_class[c].recall == 1.0);
    REQUIRE(rep.per_class[c].f1 == 1.0);
    REQUIRE(rep.per_class[c].hamming_loss == 0.0);
    REQUIRE(rep.per_class[c].support == 7);
    REQUIRE(!rep.per_class[c].degenerate);
  }
  REQUIRE(rep.macro_accuracy == 1.0);
  REQUIRE(rep.micro_accuracy == 1.0);
  REQUIRE(rep.hamming_loss == 0.0);
}

TEST_CASE("accuracy is recall and the hamming identity is exact") {
  const auto truths = labels({0, 0, 0, 1, 1, 2, 2, 2, 3, 4});
  const auto preds = labels({0, 0, 1, 1, 0, 2, 2, 0, 3, 4});
  const MetricsReport rep = per_class_metrics(confusion(preds, truths));
  for (std::size_t c = 0; c < kNumClasses; ++c)
    REQUIRE(rep.per_class[c].accuracy == rep.per_class[c].recall);
  REQUIRE(rep.per_class[0].recall == Catch::Approx(2.0 / 3.0));
  REQUIRE(rep.per_class[0].precision == Catch::Approx(2.0 / 4.0));
  REQUIRE(rep.per_class[2].recall == Catch::Approx(2.0 / 3.0));
  // identity holds bit-exactly, by construction
  REQUIRE(rep.hamming_loss == 1.0 - rep.micro_accuracy);
  REQUIRE(rep.micro_accuracy == 0.7);
}

TEST_CASE("zero predicted positives flags the class and zeroes the scores") {
  ConfusionMatrix cm;
  cm.counts[0][0] = 5;
  cm.counts[1][0] = 5;  // class 1 never predicted
  const MetricsReport rep = per_class_metrics(cm);
  REQUIRE(rep.per_class[1].precision == 0.0);
  REQUIRE(rep.per_class[1].recall == 0.0);
  REQUIRE(rep.per_class[1].f1 == 0.0);
  REQUIRE(rep.per_class[1].degenerate);
  // class 2 has no truth beats either: support 0, flagged, zeros
  REQUIRE(rep.per_class[2].support == 0);
  REQUIRE(rep.per_class[2].degenerate);
  REQUIRE_THROWS_AS(per_class_metrics(ConfusionMatrix{}), EmptyMatrix);
}

TEST_CASE("hamming loss counts mismatches") {
  const auto truths = labels({0, 1, 2, 3, 4, 0, 1, 2, 3, 4});
  REQUIRE(hamming_loss(truths, truths) == 0.0);
  auto preds = truths;
  preds[1] = ClassLabel::NSR;
  preds[5] = ClassLabel::AF;
  preds[9] = ClassLabel::NSR;
  REQUIRE(hamming_loss(preds, truths) == Catch::Approx(0.3).margin(1e-15));
  REQUIRE_THROWS_AS(hamming_loss({}, {}), LengthMismatch);
  REQUIRE_THROWS_AS(hamming_loss(labels({0}), labels({0, 1})), LengthMismatch);
}

TEST_CASE("macro scores ignore consistent relabeling") {
  const auto truths = labels({0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 0, 2});
  const auto preds = labels({0, 1, 1, 1, 2, 0, 3, 4, 4, 4, 0, 2});
  const MetricsReport a = per_class_metrics(confusion(preds, truths));
  // swap classes 0 <-> 3 everywhere
  const auto relabel = [](ClassLabel l) {
    if (l == ClassLabel::NSR) return ClassLabel::LAE;
    if (l == ClassLabel::LAE) return ClassLabel::NSR;
    return l;
  };
  std::vector<ClassLabel> t2, p2;
  for (const ClassLabel l : truths) t2.push_back(relabel(l));
  for (const ClassLabel l : preds) p2.push_back(relabel(l));
  const MetricsReport b = per_class_metrics(confusion(p2, t2));
  REQUIRE(a.macro_precision == Catch::Approx(b.macro_precision).margin(1e-12));
  REQUIRE(a.macro_recall == Catch::Approx(b.macro_recall).margin(1e-12));
  REQUIRE(a.macro_f1 == Catch::Approx(b.macro_f1).margin(1e-12));
  REQUIRE(a.micro_accuracy == b.micro_accuracy);
}

TEST_CASE("report emission is atomic, complete, and deterministic") {
  TempDir dir;
  ConfusionMatrix cm;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    cm.counts[c][c] = 8;
    cm.counts[c][(c + 1) % kNumClasses] = 2;
  }
  const MetricsReport rep = per_class_metrics(cm);

  std::vector<EpisodeLog> train_logs, test_logs;
  for (std::size_t e = 1; e <= 100; ++e)
    train_logs.push_back(dummy_log(e, -1.0 + 0.02 * static_cast<double>(e)));
  for (std::size_t e = 1; e <= 50; ++e) test_logs.push_back(dummy_log(e, 0.9));
  std::vector<EvalRecord> evals;
  for (std::size_t e = 10; e <= 100; e += 10)
    evals.push_back({e, 0.01 * static_cast<double>(e), 0.8, 0.2});

  // rejected inputs must leave the directory untouched
  REQUIRE_THROWS_AS(emit_report(rep, {}, {}, evals, dir.path / "none"), IoError);
  REQUIRE(!fs::exists(dir.path / "none"));

  emit_report(rep, train_logs, test_logs, evals, dir.path);
  for (const char* name : {"metrics.json", "train_episodes.csv", "test_episodes.csv",
                           "eval_periods.csv", "reward_curve.svg", "eval_curve.svg"})
    REQUIRE(fs::exists(dir.path / name));

  const std::string json = read_text_file(dir.path / "metrics.json");
  REQUIRE(json.find("\"schema\": \"ecgq-metrics-v1\"") != std::string::npos);
  REQUIRE(json.find("\"hamming_loss\": " + fmt_double(rep.hamming_loss)) != std::string::npos);

  const std::string csv = read_text_file(dir.path / "train_episodes.csv");
  const std::vector<std::string> lines = split(csv, '\n');
  REQUIRE(lines[0] == "episode,class,total_reward,accuracy,mean_elapsed,mean_confidence");
  REQUIRE(lines.size() == 1 + 100 * kNumClasses + 1);  // header + rows + trailing blank

  // the training polyline carries one point per episode
  const std::string svg = read_text_file(dir.path / "reward_curve.svg");
  const std::size_t poly = svg.find("points=\"");
  REQUIRE(poly != std::string::npos);
  const std::string pts = svg.substr(poly + 8, svg.find('"', poly + 8) - poly - 8);
  REQUIRE(std::count(pts.begin(), pts.end(), ',') == 100);

  // byte-identical on rerun
  emit_report(rep, train_logs, test_logs, evals, dir.path);
  REQUIRE(read_text_file(dir.path / "metrics.json") == json);
  REQUIRE(read_text_file(dir.path / "reward_curve.svg") == svg);
}
