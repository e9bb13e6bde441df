#pragma once
// Confusion-matrix multiclass metrics, hamming loss, episode logs, and the
// JSON/CSV/SVG report files.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ecgq/common.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};  // [true][pred]

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (const std::uint64_t c : row) t += c;
    return t;
  }
  std::uint64_t diagonal() const {
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < kNumClasses; ++i) d += counts[i][i];
    return d;
  }
};

struct ClassMetrics {
  double accuracy = 0.0;  // class-conditional accuracy, identical to recall
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double hamming_loss = 0.0;  // 1 - accuracy for this class's beats
  std::uint64_t support = 0;
  bool degenerate = false;  // a divisor was zero somewhere above
};

struct MetricsReport {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_accuracy = 0.0;
  double hamming_loss = 0.0;  // always exactly 1 - micro_accuracy
  ConfusionMatrix confusion;
};

// Per-episode aggregates, one row per class in the CSV dump.
struct EpisodeLog {
  std::size_t episode = 0;
  std::array<double, kNumClasses> total_reward{};
  std::array<double, kNumClasses> accuracy{};
  std::array<double, kNumClasses> mean_elapsed{};
  std::array<double, kNumClasses> mean_confidence{};
  std::array<std::uint64_t, kNumClasses> count{};
  double mean_reward = 0.0;  // over all beats of the episode
};

// One greedy pass over the held-out split, taken every eval period.
struct EvalRecord {
  std::size_t episode = 0;
  double mean_reward = 0.0;
  double accuracy = 0.0;
  double hamming_loss = 0.0;
};

inline ConfusionMatrix confusion(const std::vector<ClassLabel>& preds,
                                 const std::vector<ClassLabel>& truths) {
  if (preds.size() != truths.size())
    throw LengthMismatch("prediction and truth sequences differ in length");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i)
    ++cm.counts[static_cast<std::size_t>(truths[i])][static_cast<std::size_t>(preds[i])];
  return cm;
}

// The report's hamming loss is written as 1 - accuracy (one subtraction, no
// separate fraction), so the single-label identity holds bit-exactly instead
// of to within an ulp.
inline MetricsReport per_class_metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw EmptyMatrix("confusion matrix holds no beats");
  MetricsReport rep;
  rep.confusion = cm;
  const auto ratio = [](std::uint64_t num, std::uint64_t den, bool& flag) {
    if (den == 0) {
      flag = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::uint64_t tp = cm.counts[c][c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += cm.counts[o][c];
      fn += cm.counts[c][o];
    }
    ClassMetrics& m = rep.per_class[c];
    m.support = tp + fn;
    m.precision = ratio(tp, tp + fp, m.degenerate);
    m.recall = ratio(tp, tp + fn, m.degenerate);
    m.accuracy = m.recall;
    m.hamming_loss = 1.0 - m.accuracy;
    if (m.precision + m.recall == 0.0) {
      m.f1 = 0.0;
      m.degenerate = true;
    } else {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    }
    rep.macro_accuracy += m.accuracy;
    rep.macro_precision += m.precision;
    rep.macro_recall += m.recall;
    rep.macro_f1 += m.f1;
  }
  rep.macro_accuracy /= static_cast<double>(kNumClasses);
  rep.macro_precision /= static_cast<double>(kNumClasses);
  rep.macro_recall /= static_cast<double>(kNumClasses);
  rep.macro_f1 /= static_cast<double>(kNumClasses);
  rep.micro_accuracy = static_cast<double>(cm.diagonal()) / static_cast<double>(total);
  rep.hamming_loss = 1.0 - rep.micro_accuracy;
  return rep;
}

inline double hamming_loss(const std::vector<ClassLabel>& preds,
                           const std::vector<ClassLabel>& truths) {
  if (preds.size() != truths.size() || preds.empty())
    throw LengthMismatch("hamming loss needs equal non-empty sequences");
  std::uint64_t hit = 0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (preds[i] == truths[i]) ++hit;
  return 1.0 - static_cast<double>(hit) / static_cast<double>(preds.size());
}

namespace report_detail {

struct Series {
  std::string name;
  std::string color;
  std::vector<double> x, y;
};

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Minimal deterministic SVG line chart: fixed canvas, one polyline per
// series, axis ranges padded 5% around the data.
inline std::string line_chart(const std::string& title, const std::string& x_label,
                              const std::vector<Series>& series) {
  const double w = 720, h = 400, left = 64, right = 24, top = 40, bottom = 48;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  bool first = true;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        x_lo = x_hi = s.x[i];
        y_lo = y_hi = s.y[i];
        first = false;
      }
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (w - left - right); };
  const auto py = [&](double y) { return h - bottom - (y - y_lo) / (y_hi - y_lo) * (h - top - bottom); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"400\" "
                    "viewBox=\"0 0 720 400\">\n";
  svg += "<rect width=\"720\" height=\"400\" fill=\"white\"/>\n";
  svg += "<text x=\"360\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">" + title + "</text>\n";
  // axes
  svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(left) +
         "\" y2=\"" + fmt2(h - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(h - bottom) + "\" x2=\"" +
         fmt2(w - right) + "\" y2=\"" + fmt2(h - bottom) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + fmt2(left - 8) + "\" y=\"" + fmt2(py(y_hi)) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt2(y_hi) +
         "</text>\n";
  svg += "<text x=\"" + fmt2(left - 8) + "\" y=\"" + fmt2(py(y_lo)) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt2(y_lo) +
         "</text>\n";
  svg += "<text x=\"" + fmt2((left + w - right) / 2) + "\" y=\"" + fmt2(h - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
         "</text>\n";
  double legend_y = top + 4;
  for (const Series& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) pts += ' ';
      pts += fmt2(px(s.x[i])) + "," + fmt2(py(s.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    svg += "<text x=\"" + fmt2(w - right - 4) + "\" y=\"" + fmt2(legend_y) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + s.color +
           "\">" + s.name + "</text>\n";
    legend_y += 16;
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string episode_csv(const std::vector<EpisodeLog>& logs) {
  std::string out = "episode,class,total_reward,accuracy,mean_elapsed,mean_confidence\n";
  for (const EpisodeLog& log : logs) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      out += std::to_string(log.episode) + "," + std::to_string(c) + "," +
             fmt_double(log.total_reward[c]) + "," + fmt_double(log.accuracy[c]) + "," +
             fmt_double(log.mean_elapsed[c]) + "," + fmt_double(log.mean_confidence[c]) + "\n";
    }
  }
  return out;
}

inline std::string metrics_json(const MetricsReport& rep) {
  std::string j = "{\n  \"schema\": \"ecgq-metrics-v1\",\n  \"classes\": [";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (c) j += ", ";
    j += std::string("\"") + label_name(static_cast<ClassLabel>(c)) + "\"";
  }
  j += "],\n  \"confusion\": [";
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    if (t) j += ", ";
    j += "[";
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      if (p) j += ", ";
      j += std::to_string(rep.confusion.counts[t][p]);
    }
    j += "]";
  }
  j += "],\n  \"per_class\": [\n";
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = rep.per_class[c];
    j += std::string("    {\"class\": \"") + label_name(static_cast<ClassLabel>(c)) +
         "\", \"accuracy\": " + fmt_double(m.accuracy) +
         ", \"precision\": " + fmt_double(m.precision) + ", \"recall\": " + fmt_double(m.recall) +
         ", \"f1\": " + fmt_double(m.f1) + ", \"hamming_loss\": " + fmt_double(m.hamming_loss) +
         ", \"support\": " + std::to_string(m.support) +
         ", \"degenerate\": " + (m.degenerate ? "true" : "false") + "}";
    j += c + 1 < kNumClasses ? ",\n" : "\n";
  }
  j += "  ],\n  \"macro\": {\"accuracy\": " + fmt_double(rep.macro_accuracy) +
       ", \"precision\": " + fmt_double(rep.macro_precision) +
       ", \"recall\": " + fmt_double(rep.macro_recall) + ", \"f1\": " + fmt_double(rep.macro_f1) +
       "},\n";
  j += "  \"micro_accuracy\": " + fmt_double(rep.micro_accuracy) + ",\n";
  j += "  \"hamming_loss\": " + fmt_double(rep.hamming_loss) + "\n}\n";
  return j;
}

}  // namespace report_detail

// Writes metrics.json, train/test episode CSVs, the eval-period CSV, and two
// SVG charts into out_dir. All bytes are deterministic functions of the
// inputs; each file lands atomically and nothing is written when inputs are
// rejected up front.
inline void emit_report(const MetricsReport& metrics, const std::vector<EpisodeLog>& train_logs,
                        const std::vector<EpisodeLog>& test_logs,
                        const std::vector<EvalRecord>& evals,
                        const std::filesystem::path& out_dir) {
  if (train_logs.empty() && test_logs.empty()) throw IoError("no episode logs to report");
  if (metrics.confusion.total() == 0) throw EmptyMatrix("metrics report holds no beats");

  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "metrics.json", report_detail::metrics_json(metrics));
  write_file_atomic(out_dir / "train_episodes.csv", report_detail::episode_csv(train_logs));
  write_file_atomic(out_dir / "test_episodes.csv", report_detail::episode_csv(test_logs));

  std::string evals_csv = "episode,mean_reward,accuracy,hamming_loss\n";
  for (const EvalRecord& e : evals) {
    evals_csv += std::to_string(e.episode) + "," + fmt_double(e.mean_reward) + "," +
                 fmt_double(e.accuracy) + "," + fmt_double(e.hamming_loss) + "\n";
  }
  write_file_atomic(out_dir / "eval_periods.csv", evals_csv);

  std::vector<report_detail::Series> reward;
  const auto log_series = [](const std::vector<EpisodeLog>& logs, std::string name,
                             std::string color) {
    report_detail::Series s{std::move(name), std::move(color), {}, {}};
    for (const EpisodeLog& log : logs) {
      s.x.push_back(static_cast<double>(log.episode));
      s.y.push_back(log.mean_reward);
    }
    return s;
  };
  if (!train_logs.empty()) reward.push_back(log_series(train_logs, "train", "#1f77b4"));
  if (!test_logs.empty()) reward.push_back(log_series(test_logs, "test", "#d62728"));
  write_file_atomic(out_dir / "reward_curve.svg",
                    report_detail::line_chart("Mean reward per episode", "episode", reward));

  report_detail::Series ev_reward{"mean reward", "#1f77b4", {}, {}};
  report_detail::Series ev_hamming{"hamming loss", "#d62728", {}, {}};
  for (const EvalRecord& e : evals) {
    ev_reward.x.push_back(static_cast<double>(e.episode));
    ev_reward.y.push_back(e.mean_reward);
    ev_hamming.x.push_back(static_cast<double>(e.episode));
    ev_hamming.y.push_back(e.hamming_loss);
  }
  write_file_atomic(out_dir / "eval_curve.svg",
                    report_detail::line_chart("Held-out eval per period", "episode",
                                              {ev_reward, ev_hamming}));
}

}  // namespace ecgq
