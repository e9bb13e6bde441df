#pragma once
// The pipeline commands behind the CLI. Each takes a RunConfig, writes its
// artifacts under output_dir plus a per-command run manifest, reports through
// a stream, and returns a process exit code. Thrown errors are mapped to the
// exit-code contract by run_command: 0 ok, 2 configuration, 3 empty cohort,
// 4 record failure, 5 empty split, 1 anything else.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ecgq/agent.hpp"
#include "ecgq/config.hpp"
#include "ecgq/filters.hpp"
#include "ecgq/grid.hpp"
#include "ecgq/metrics.hpp"
#include "ecgq/qrs.hpp"
#include "ecgq/sqi.hpp"
#include "ecgq/synth.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEmptyCohort = 3;
inline constexpr int kExitRecordFailure = 4;
inline constexpr int kExitEmptySplit = 5;

namespace pipeline_detail {

// Index-parallel loop with a worker bound; slot i is only ever touched by
// the worker that claimed i, so bodies write results into per-index slots
// without locks. Bodies must not throw; record-level errors are data.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

inline void write_manifest(const RunConfig& cfg, std::string_view command) {
  std::filesystem::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / ("run_manifest_" + std::string(command) + ".json"),
                    run_manifest_json(command, cfg.echo));
}

inline LabelMap load_label_map(const RunConfig& cfg) {
  if (cfg.label_map_path.empty()) return default_label_map();
  if (!std::filesystem::exists(cfg.label_map_path))
    throw ConfigError("label map file does not exist: " + cfg.label_map_path.string());
  return parse_label_map(read_text_file(cfg.label_map_path));
}

struct ManifestRow {
  std::string record_id;
  std::string source;
  std::optional<int> age;
  std::string sex;
  ClassLabel label = ClassLabel::NSR;
  Split split = Split::Train;
};

inline std::vector<ManifestRow> read_cohort_manifest(const RunConfig& cfg) {
  const auto path = cfg.output_dir / "cohort_manifest.csv";
  if (!std::filesystem::exists(path))
    throw ConfigError("cohort manifest not found (run ingest first): " + path.string());
  const std::string text = read_text_file(path);
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != "record_id,source,age,sex,label_int,split")
    throw IoError("unrecognized cohort manifest header");
  std::vector<ManifestRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw IoError("cohort manifest row needs 6 fields: " + line);
    ManifestRow r;
    r.record_id = f[0];
    r.source = f[1];
    if (f[2] != "NaN") r.age = static_cast<int>(parse_long(f[2], "age"));
    r.sex = f[3];
    const long li = parse_long(f[4], "label_int");
    if (li < 0 || li >= static_cast<long>(kNumClasses))
      throw IoError("label_int out of range: " + line);
    r.label = static_cast<ClassLabel>(li);
    if (f[5] == "train") r.split = Split::Train;
    else if (f[5] == "test") r.split = Split::Test;
    else throw IoError("unknown split: " + line);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string sqi_json_block(const SqiReport& r) {
  std::string j = "{";
  j += "\"rr_cv\": " + (r.rr_cv ? fmt_double(*r.rr_cv) : std::string("null"));
  j += ", \"skewness\": " + fmt_double(r.skewness);
  j += ", \"excess_kurtosis\": " + fmt_double(r.excess_kurtosis);
  j += ", \"p_sqi\": " + fmt_double(r.p_sqi);
  j += ", \"bas_sqi\": " + fmt_double(r.bas_sqi);
  j += "}";
  return j;
}

// Episode logs round-trip through two CSVs: the per-class table pinned by
// the reporting contract plus a small per-episode summary carrying what that
// table cannot (step count and mean reward).
inline std::string episode_summary_csv(const std::vector<EpisodeLog>& logs) {
  std::string out = "episode,steps,mean_reward\n";
  for (const EpisodeLog& log : logs) {
    std::uint64_t steps = 0;
    for (const std::uint64_t c : log.count) steps += c;
    out += std::to_string(log.episode) + "," + std::to_string(steps) + "," +
           fmt_double(log.mean_reward) + "\n";
  }
  return out;
}

inline std::vector<EpisodeLog> parse_episode_logs(std::string_view episodes_csv,
                                                  std::string_view summary_csv) {
  const auto ep_lines = split(episodes_csv, '\n');
  if (ep_lines.empty() ||
      trim(ep_lines[0]) != "episode,class,total_reward,accuracy,mean_elapsed,mean_confidence")
    throw IoError("unrecognized episode log header");
  std::vector<EpisodeLog> logs;
  std::map<std::size_t, std::size_t> index_of;
  for (std::size_t i = 1; i < ep_lines.size(); ++i) {
    const std::string line = trim(ep_lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 6) throw IoError("episode log row needs 6 fields: " + line);
    const auto episode = static_cast<std::size_t>(parse_long(f[0], "episode"));
    const long cls = parse_long(f[1], "class");
    if (cls < 0 || cls >= static_cast<long>(kNumClasses))
      throw IoError("class out of range: " + line);
    auto it = index_of.find(episode);
    if (it == index_of.end()) {
      it = index_of.emplace(episode, logs.size()).first;
      logs.emplace_back();
      logs.back().episode = episode;
    }
    EpisodeLog& log = logs[it->second];
    const auto c = static_cast<std::size_t>(cls);
    log.total_reward[c] = parse_double(f[2], "total_reward");
    log.accuracy[c] = parse_double(f[3], "accuracy");
    log.mean_elapsed[c] = parse_double(f[4], "mean_elapsed");
    log.mean_confidence[c] = parse_double(f[5], "mean_confidence");
  }

  const auto sum_lines = split(summary_csv, '\n');
  if (sum_lines.empty() || trim(sum_lines[0]) != "episode,steps,mean_reward")
    throw IoError("unrecognized episode summary header");
  for (std::size_t i = 1; i < sum_lines.size(); ++i) {
    const std::string line = trim(sum_lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw IoError("episode summary row needs 3 fields: " + line);
    const auto episode = static_cast<std::size_t>(parse_long(f[0], "episode"));
    const auto it = index_of.find(episode);
    if (it == index_of.end()) throw IoError("summary names an unknown episode: " + line);
    logs[it->second].mean_reward = parse_double(f[2], "mean_reward");
  }
  return logs;
}

inline std::vector<EvalRecord> parse_eval_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != "episode,mean_reward,accuracy,hamming_loss")
    throw IoError("unrecognized eval log header");
  std::vector<EvalRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw IoError("eval row needs 4 fields: " + line);
    EvalRecord r;
    r.episode = static_cast<std::size_t>(parse_long(f[0], "episode"));
    r.mean_reward = parse_double(f[1], "mean_reward");
    r.accuracy = parse_double(f[2], "accuracy");
    r.hamming_loss = parse_double(f[3], "hamming_loss");
    out.push_back(r);
  }
  return out;
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "truth_int,pred_int,count\n";
  for (std::size_t t = 0; t < kNumClasses; ++t) {
    for (std::size_t p = 0; p < kNumClasses; ++p) {
      out += std::to_string(t) + "," + std::to_string(p) + "," +
             std::to_string(cm.counts[t][p]) + "\n";
    }
  }
  return out;
}

inline ConfusionMatrix parse_confusion_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || trim(lines[0]) != "truth_int,pred_int,count")
    throw IoError("unrecognized confusion header");
  ConfusionMatrix cm;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 3) throw IoError("confusion row needs 3 fields: " + line);
    const long t = parse_long(f[0], "truth_int");
    const long p = parse_long(f[1], "pred_int");
    const long n = parse_long(f[2], "count");
    if (t < 0 || t >= static_cast<long>(kNumClasses) || p < 0 ||
        p >= static_cast<long>(kNumClasses) || n < 0)
      throw IoError("confusion cell out of range: " + line);
    cm.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)] =
        static_cast<std::uint64_t>(n);
  }
  return cm;
}

// Beats of every manifest record in the given split, concatenated in
// manifest order. Records prepare excluded simply have no beat table.
inline std::vector<BeatWindow> load_split_beats(const RunConfig& cfg,
                                                const std::vector<ManifestRow>& manifest,
                                                Split split) {
  std::vector<BeatWindow> all;
  for (const ManifestRow& row : manifest) {
    if (row.split != split) continue;
    const auto path = cfg.output_dir / "beats" / (row.record_id + ".csv");
    if (!std::filesystem::exists(path)) continue;
    const auto beats = import_beat_table(read_text_file(path));
    all.insert(all.end(), beats.begin(), beats.end());
  }
  return all;
}

inline std::array<ClassTemplate, 5> load_templates(const RunConfig& cfg) {
  if (cfg.synth_template_file.empty()) return default_templates();
  if (!std::filesystem::exists(cfg.synth_template_file))
    throw ConfigError("template file does not exist: " + cfg.synth_template_file.string());
  return parse_template_file(read_text_file(cfg.synth_template_file));
}

}  // namespace pipeline_detail

// Generate an on-disk fixture cohort into input_dir, where ingest reads.
inline int cmd_synth(const RunConfig& cfg, std::ostream& out) {
  SynthCohortSpec spec = cfg.synth;
  spec.templates = pipeline_detail::load_templates(cfg);
  const auto patients = synth_cohort(spec, cfg.input_dir);

  std::string truth = "record_id,label_int,n_beats\n";
  for (const SynthPatientInfo& p : patients) {
    truth += p.record_id + "," + std::to_string(static_cast<int>(p.label)) + "," +
             std::to_string(p.truth.beats.size()) + "\n";
  }
  std::filesystem::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / "synth_truth.csv", truth);
  pipeline_detail::write_manifest(cfg, "synth");
  out << "synth: wrote " << patients.size() << " records to " << cfg.input_dir.string() << "\n";
  return kExitOk;
}

// Scan input_dir for headers, apply the cohort rules, write the manifest and
// the rejection log. Headers that fail to parse become rejections, not
// aborts; an empty accepted set is an error by contract.
inline int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
  if (!std::filesystem::is_directory(cfg.input_dir))
    throw ConfigError("input_dir does not exist: " + cfg.input_dir.string());
  const LabelMap label_map = pipeline_detail::load_label_map(cfg);

  std::vector<std::filesystem::path> headers;
  for (const auto& e : std::filesystem::directory_iterator(cfg.input_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".hea") headers.push_back(e.path());
  }
  std::sort(headers.begin(), headers.end());

  struct Slot {
    std::optional<CohortCandidate> candidate;
    std::string error;
  };
  std::vector<Slot> slots(headers.size());
  pipeline_detail::parallel_for(headers.size(), cfg.jobs, [&](std::size_t i) {
    try {
      slots[i].candidate = candidate_from(parse_header(read_text_file(headers[i])));
    } catch (const Error& e) {
      slots[i].error = e.what();
    }
  });

  std::vector<CohortCandidate> candidates;
  std::vector<Rejection> parse_rejects;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].candidate) {
      candidates.push_back(std::move(*slots[i].candidate));
    } else {
      parse_rejects.push_back({headers[i].stem().string(), "malformed_header"});
    }
  }

  Cohort cohort = build_cohort(candidates, cfg.cohort, label_map, cfg.seed);
  cohort.rejections.insert(cohort.rejections.end(), parse_rejects.begin(), parse_rejects.end());

  std::filesystem::create_directories(cfg.output_dir);
  write_file_atomic(cfg.output_dir / "cohort_manifest.csv", cohort_manifest_csv(cohort));
  write_file_atomic(cfg.output_dir / "cohort_rejections.csv", cohort_rejections_csv(cohort));
  pipeline_detail::write_manifest(cfg, "ingest");

  std::size_t n_train = 0;
  for (const CohortEntry& e : cohort.entries)
    if (e.split == Split::Train) ++n_train;
  out << "ingest: " << cohort.entries.size() << " records accepted (train " << n_train
      << " / test " << cohort.entries.size() - n_train << "), " << cohort.rejections.size()
      << " rejected\n";
  for (const auto& [reason, count] : cohort.rejection_counts())
    out << "  rejected " << count << " for " << reason << "\n";
  return kExitOk;
}

// Denoise, quality-score, detect, and segment every manifest record into a
// per-record beat table and SQI report. Data-condition exclusions (flat
// lines, too few beats) are logged and skipped; hard errors are failures
// that flip the exit code while the remaining records still complete.
inline int cmd_prepare(const RunConfig& cfg, std::ostream& out) {
  const auto manifest = pipeline_detail::read_cohort_manifest(cfg);
  std::filesystem::create_directories(cfg.output_dir / "beats");
  std::filesystem::create_directories(cfg.output_dir / "sqi");

  struct Slot {
    std::string status = "ok";  // ok | excluded | failed
    std::string reason;
    std::size_t n_peaks = 0;
    std::size_t n_beats = 0;
    std::size_t n_dropped = 0;
  };
  std::vector<Slot> slots(manifest.size());

  pipeline_detail::parallel_for(manifest.size(), cfg.jobs, [&](std::size_t i) {
    Slot& slot = slots[i];
    const pipeline_detail::ManifestRow& row = manifest[i];
    try {
      const ParsedRecord rec =
          parse_header(read_text_file(cfg.input_dir / (row.record_id + ".hea")));
      const auto payload = read_binary_file(cfg.input_dir / rec.header.signals.front().file);
      const SignalMatrix leads = select_leads(read_signal(rec.header, payload), rec.header);
      const double fs = rec.header.fs;

      const auto filter_lead = [&](const std::vector<double>& x) {
        return apply_notch(apply_bandpass(x, fs, cfg.filter), fs, cfg.filter);
      };
      const std::vector<double> filt_ii = filter_lead(leads[0]);
      const std::vector<double> filt_v1 = filter_lead(leads[1]);
      const std::vector<double> std_ii = standardize(filt_ii);
      const std::vector<double> std_v1 = standardize(filt_v1);

      const RPeakList peaks = detect_qrs(std_ii, fs);
      slot.n_peaks = peaks.indices.size();

      std::string json = "{\n  \"record_id\": \"" + row.record_id + "\",\n";
      json += "  \"fs\": " + fmt_double(fs) + ",\n";
      json += "  \"n_peaks\": " + std::to_string(peaks.indices.size()) + ",\n";
      const char* names[2] = {"lead_ii", "lead_v1"};
      const std::vector<double>* raw[2] = {&leads[0], &leads[1]};
      const std::vector<double>* filt[2] = {&filt_ii, &filt_v1};
      for (int k = 0; k < 2; ++k) {
        json += std::string("  \"") + names[k] + "\": {\n";
        json += "    \"raw\": " +
                pipeline_detail::sqi_json_block(compute_sqi(*raw[k], peaks.indices, fs)) + ",\n";
        json += "    \"filtered\": " +
                pipeline_detail::sqi_json_block(compute_sqi(*filt[k], peaks.indices, fs)) + "\n";
        json += k == 0 ? "  },\n" : "  }\n";
      }
      json += "}\n";
      write_file_atomic(cfg.output_dir / "sqi" / (row.record_id + ".json"), json);

      std::vector<std::string> drop_log;
      const auto beats = segment_beats(peaks, std_ii, std_v1, row.label, row.record_id, &drop_log);
      slot.n_beats = beats.size();
      slot.n_dropped = drop_log.size();
      write_file_atomic(cfg.output_dir / "beats" / (row.record_id + ".csv"),
                        export_beat_table(beats));
    } catch (const ZeroVariance& e) {
      slot = {"excluded", "ZeroVariance", slot.n_peaks, 0, 0};
    } catch (const NoBeats& e) {
      slot = {"excluded", "NoBeats", slot.n_peaks, 0, 0};
    } catch (const TooFewPeaks& e) {
      slot = {"excluded", "TooFewPeaks", slot.n_peaks, 0, 0};
    } catch (const SignalTooShort& e) {
      slot = {"excluded", "SignalTooShort", slot.n_peaks, 0, 0};
    } catch (const TooShort& e) {
      slot = {"excluded", "TooShort", slot.n_peaks, 0, 0};
    } catch (const Error& e) {
      slot = {"failed", e.what(), slot.n_peaks, 0, 0};
    }
  });

  std::string summary = "record_id,status,reason,n_peaks,n_beats,n_dropped\n";
  std::size_t ok = 0, excluded = 0, failed = 0;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const Slot& s = slots[i];
    (s.status == "ok" ? ok : s.status == "excluded" ? excluded : failed) += 1;
    std::string reason = s.reason;
    std::replace(reason.begin(), reason.end(), ',', ';');
    std::replace(reason.begin(), reason.end(), '\n', ' ');
    summary += manifest[i].record_id + "," + s.status + "," + reason + "," +
               std::to_string(s.n_peaks) + "," + std::to_string(s.n_beats) + "," +
               std::to_string(s.n_dropped) + "\n";
  }
  write_file_atomic(cfg.output_dir / "prepare_summary.csv", summary);
  pipeline_detail::write_manifest(cfg, "prepare");

  out << "prepare: " << ok << " ok, " << excluded << " excluded, " << failed << " failed of "
      << manifest.size() << " records\n";
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (slots[i].status != "ok")
      out << "  " << manifest[i].record_id << " " << slots[i].status << ": " << slots[i].reason
          << "\n";
  }
  return failed ? kExitRecordFailure : kExitOk;
}

inline int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const auto manifest = pipeline_detail::read_cohort_manifest(cfg);
  const auto train_beats = pipeline_detail::load_split_beats(cfg, manifest, Split::Train);
  const auto eval_beats = pipeline_detail::load_split_beats(cfg, manifest, Split::Test);
  if (train_beats.empty()) throw EmptySplit("no training beats under " + cfg.output_dir.string());

  const auto train_split = encode_split(train_beats, cfg.env);
  const auto eval_split = encode_split(eval_beats, cfg.env);
  const TrainResult result = train(train_split, eval_split, cfg.hp);

  save_qtable(result.table, cfg.output_dir / "qtable.bin");
  write_file_atomic(cfg.output_dir / "qtable.csv", qtable_to_csv(result.table));
  write_file_atomic(cfg.output_dir / "train_episodes.csv",
                    report_detail::episode_csv(result.logs));
  write_file_atomic(cfg.output_dir / "train_summary.csv",
                    pipeline_detail::episode_summary_csv(result.logs));
  std::string evals_csv = "episode,mean_reward,accuracy,hamming_loss\n";
  for (const EvalRecord& e : result.evals) {
    evals_csv += std::to_string(e.episode) + "," + fmt_double(e.mean_reward) + "," +
                 fmt_double(e.accuracy) + "," + fmt_double(e.hamming_loss) + "\n";
  }
  write_file_atomic(cfg.output_dir / "eval_periods.csv", evals_csv);
  pipeline_detail::write_manifest(cfg, "train");

  out << "train: " << cfg.hp.episodes_train << " episodes over " << train_split.size()
      << " beats, " << result.table.rows.size() << " states touched\n";
  if (!result.evals.empty()) {
    const EvalRecord& last = result.evals.back();
    out << "  final eval: accuracy " << fmt_double(last.accuracy) << ", mean reward "
        << fmt_double(last.mean_reward) << "\n";
  }
  return kExitOk;
}

inline int cmd_test(const RunConfig& cfg, std::ostream& out) {
  const auto qtable_path = cfg.output_dir / "qtable.bin";
  if (!std::filesystem::exists(qtable_path))
    throw ConfigError("Q-table not found (run train first): " + qtable_path.string());
  const QTable table = load_qtable(qtable_path);

  const auto manifest = pipeline_detail::read_cohort_manifest(cfg);
  const auto test_beats = pipeline_detail::load_split_beats(cfg, manifest, Split::Test);
  if (test_beats.empty()) throw EmptySplit("no test beats under " + cfg.output_dir.string());

  const auto split = encode_split(test_beats, cfg.env);
  const TestResult result = test(table, split, cfg.hp);

  write_file_atomic(cfg.output_dir / "test_episodes.csv",
                    report_detail::episode_csv(result.logs));
  write_file_atomic(cfg.output_dir / "test_summary.csv",
                    pipeline_detail::episode_summary_csv(result.logs));
  write_file_atomic(cfg.output_dir / "confusion.csv",
                    pipeline_detail::confusion_csv(result.report.confusion));
  write_file_atomic(cfg.output_dir / "metrics.json", report_detail::metrics_json(result.report));
  pipeline_detail::write_manifest(cfg, "test");

  out << "test: " << cfg.hp.episodes_test << " episodes over " << split.size() << " beats\n";
  out << "  macro accuracy " << fmt_double(result.report.macro_accuracy) << ", hamming loss "
      << fmt_double(result.report.hamming_loss) << "\n";
  return kExitOk;
}

// Rebuild the full report (metrics, episode CSVs, SVG charts) from the
// persisted train/test artifacts. Rewrites what it read byte-identically.
inline int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const auto need = [&](const char* name) {
    const auto path = cfg.output_dir / name;
    if (!std::filesystem::exists(path))
      throw ConfigError("report input not found (run train and test first): " + path.string());
    return read_text_file(path);
  };
  const auto train_logs =
      pipeline_detail::parse_episode_logs(need("train_episodes.csv"), need("train_summary.csv"));
  const auto test_logs =
      pipeline_detail::parse_episode_logs(need("test_episodes.csv"), need("test_summary.csv"));
  const auto evals = pipeline_detail::parse_eval_csv(need("eval_periods.csv"));
  const ConfusionMatrix cm = pipeline_detail::parse_confusion_csv(need("confusion.csv"));

  emit_report(per_class_metrics(cm), train_logs, test_logs, evals, cfg.output_dir);
  pipeline_detail::write_manifest(cfg, "report");
  out << "report: wrote metrics.json, episode CSVs, and SVG charts to "
      << cfg.output_dir.string() << "\n";
  return kExitOk;
}

// Exit-code mapping shared by the binary and the tests.
inline int run_command(std::string_view command, const RunConfig& cfg, std::ostream& out,
                       std::ostream& err) {
  try {
    if (command == "synth") return cmd_synth(cfg, out);
    if (command == "ingest") return cmd_ingest(cfg, out);
    if (command == "prepare") return cmd_prepare(cfg, out);
    if (command == "train") return cmd_train(cfg, out);
    if (command == "test") return cmd_test(cfg, out);
    if (command == "report") return cmd_report(cfg, out);
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidSpec& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidTemplate& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const EmptyCohort& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmptyCohort;
  } catch (const EmptySplit& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmptySplit;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ecgq
