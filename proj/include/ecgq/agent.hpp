#pragma once
// Tabular Q-learning over beat states and the five label actions: policies,
// reward variants, the Bellman update, training/testing loops, and Q-table
// persistence.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ecgq/common.hpp"
#include "ecgq/grid.hpp"
#include "ecgq/metrics.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

enum class RewardVariant { R1, R2, R3Greedy, R3Softmax };

inline const char* reward_variant_name(RewardVariant v) {
  switch (v) {
    case RewardVariant::R1: return "R1";
    case RewardVariant::R2: return "R2";
    case RewardVariant::R3Greedy: return "R3_greedy";
    case RewardVariant::R3Softmax: return "R3_softmax";
  }
  return "?";
}

struct Hyperparams {
  double alpha = 0.001;
  double gamma = 0.9;
  double tau = 0.1;
  double epsilon_start = 1.0;  // decays linearly to epsilon_end over the
  double epsilon_end = 0.05;   // first epsilon_decay_episodes, then constant
  std::size_t epsilon_decay_episodes = 50;
  std::size_t episodes_train = 100;
  std::size_t episodes_test = 50;
  std::size_t eval_period = 10;
  RewardVariant reward_variant = RewardVariant::R3Softmax;
  std::uint64_t seed = 1;
};

inline void validate_hyperparams(const Hyperparams& hp) {
  if (!(hp.alpha > 0.0 && hp.alpha <= 1.0)) throw InvalidSpec("alpha must be in (0, 1]");
  if (!(hp.gamma >= 0.0 && hp.gamma <= 1.0)) throw InvalidSpec("gamma must be in [0, 1]");
  if (!(hp.tau > 0.0)) throw InvalidSpec("tau must be positive");
  for (const double e : {hp.epsilon_start, hp.epsilon_end})
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidSpec("epsilon must be in [0, 1]");
}

inline double epsilon_at(const Hyperparams& hp, std::size_t episode_index) {
  if (hp.epsilon_decay_episodes <= 1 || episode_index + 1 >= hp.epsilon_decay_episodes)
    return hp.epsilon_end;
  const double t = static_cast<double>(episode_index) /
                   static_cast<double>(hp.epsilon_decay_episodes - 1);
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * t;
}

using QRow = std::array<double, kNumClasses>;

// Rows are created zero-initialized the first time an update touches a
// state; reads of untouched states see zeros without inserting anything.
struct QTable {
  std::unordered_map<std::string, QRow> rows;

  const QRow& row_or_zero(const std::string& key) const {
    static const QRow zeros{};
    const auto it = rows.find(key);
    return it == rows.end() ? zeros : it->second;
  }
};

// Watkins update; a null s_next is the terminal marker with max-Q zero.
// Returns the new cell value. Exactly one cell changes.
inline double q_update(QTable& table, const StateKey& s, ClassLabel a, double r,
                       const StateKey* s_next, const Hyperparams& hp) {
  double max_next = 0.0;
  if (s_next) {
    const QRow& next = table.row_or_zero(s_next->key);
    max_next = *std::max_element(next.begin(), next.end());
  }
  double& cell = table.rows[s.key][static_cast<std::size_t>(a)];
  cell += hp.alpha * (r + hp.gamma * max_next - cell);
  return cell;
}

struct ActionChoice {
  ClassLabel action = ClassLabel::NSR;
  double confidence = 0.0;  // max Q under the greedy family, P(chosen) under SoftMax
};

// Argmax with ties broken uniformly at random; the stream is consumed only
// when a tie actually exists, so unique maxima cost no entropy.
inline ClassLabel argmax_action(const QRow& row, Rng& rng) {
  double best = row[0];
  std::array<std::size_t, kNumClasses> tied{};
  std::size_t n_tied = 1;
  for (std::size_t i = 1; i < kNumClasses; ++i) {
    if (row[i] > best) {
      best = row[i];
      tied[0] = i;
      n_tied = 1;
    } else if (row[i] == best) {
      tied[n_tied++] = i;
    }
  }
  return static_cast<ClassLabel>(n_tied == 1 ? tied[0] : tied[draw_index(rng, n_tied)]);
}

inline ActionChoice select_epsilon_greedy(const QRow& row, double epsilon, Rng& rng) {
  const double qmax = *std::max_element(row.begin(), row.end());
  if (epsilon > 0.0 && draw_unit(rng) < epsilon)
    return {static_cast<ClassLabel>(draw_index(rng, kNumClasses)), qmax};
  return {argmax_action(row, rng), qmax};
}

// Overflow-safe SoftMax: exponents are shifted by max(Q)/tau before exp.
inline QRow softmax_probs(const QRow& row, double tau) {
  const double m = *std::max_element(row.begin(), row.end()) / tau;
  QRow p{};
  double z = 0.0;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    p[i] = std::exp(row[i] / tau - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

inline ActionChoice select_softmax(const QRow& row, double tau, Rng& rng) {
  const QRow p = softmax_probs(row, tau);
  const double u = draw_unit(rng);
  double acc = 0.0;
  std::size_t a = kNumClasses - 1;  // numeric leftovers land on the last action
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    acc += p[i];
    if (u < acc) {
      a = i;
      break;
    }
  }
  return {static_cast<ClassLabel>(a), p[a]};
}

// R1 = +-1; R2 = R1 - elapsed; both R3 variants add the policy's confidence
// (max Q under epsilon-greedy, chosen-action probability under SoftMax).
inline double compute_reward(bool correct, double elapsed_s, double confidence,
                             RewardVariant variant) {
  const double r1 = correct ? 1.0 : -1.0;
  switch (variant) {
    case RewardVariant::R1: return r1;
    case RewardVariant::R2: return r1 - elapsed_s;
    case RewardVariant::R3Greedy:
    case RewardVariant::R3Softmax: return r1 - elapsed_s + confidence;
  }
  return r1;
}

struct StepOutcome {
  StateKey state;
  ClassLabel action = ClassLabel::NSR;
  bool correct = false;
  double elapsed = 0.0;
  double confidence = 0.0;
  double reward = 0.0;
};

// Seconds from a monotonic clock; tests inject a fixed fake instead so
// reward math is reproducible.
using Clock = std::function<double()>;

inline double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

namespace agent_detail {

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::size_t n) {
  std::uint64_t h = fnv1a64(tag);
  h ^= seed;
  h *= 1099511628211ull;
  h ^= static_cast<std::uint64_t>(n);
  h *= 1099511628211ull;
  return h;
}

struct LogBuilder {
  EpisodeLog log;
  std::array<std::uint64_t, kNumClasses> hits{};
  std::array<double, kNumClasses> elapsed_sum{};
  std::array<double, kNumClasses> confidence_sum{};
  double reward_sum = 0.0;
  std::uint64_t steps = 0;

  void add(ClassLabel truth, const StepOutcome& o) {
    const auto c = static_cast<std::size_t>(truth);
    log.total_reward[c] += o.reward;
    ++log.count[c];
    if (o.correct) ++hits[c];
    elapsed_sum[c] += o.elapsed;
    confidence_sum[c] += o.confidence;
    reward_sum += o.reward;
    ++steps;
  }
  EpisodeLog finish(std::size_t episode) {
    log.episode = episode;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double n = static_cast<double>(log.count[c]);
      log.accuracy[c] = log.count[c] ? static_cast<double>(hits[c]) / n : 0.0;
      log.mean_elapsed[c] = log.count[c] ? elapsed_sum[c] / n : 0.0;
      log.mean_confidence[c] = log.count[c] ? confidence_sum[c] / n : 0.0;
    }
    log.mean_reward = steps ? reward_sum / static_cast<double>(steps) : 0.0;
    return log;
  }
};

// One action selection with its timing; greedy==true forces exploit-only.
inline StepOutcome run_step(const QTable& table, const EncodedBeat& beat, const Hyperparams& hp,
                            double epsilon, bool greedy, Rng& rng, const Clock& clock) {
  StepOutcome o;
  o.state = beat.state;
  const QRow& row = table.row_or_zero(beat.state.key);
  const double t0 = clock();
  ActionChoice choice;
  if (greedy) {
    choice.action = argmax_action(row, rng);
    choice.confidence = hp.reward_variant == RewardVariant::R3Softmax
                            ? softmax_probs(row, hp.tau)[static_cast<std::size_t>(choice.action)]
                            : *std::max_element(row.begin(), row.end());
  } else if (hp.reward_variant == RewardVariant::R3Softmax) {
    choice = select_softmax(row, hp.tau, rng);
  } else {
    choice = select_epsilon_greedy(row, epsilon, rng);
  }
  o.elapsed = clock() - t0;
  if (o.elapsed < 0.0) o.elapsed = 0.0;
  o.action = choice.action;
  o.confidence = choice.confidence;
  o.correct = choice.action == beat.label;
  o.reward = compute_reward(o.correct, o.elapsed, o.confidence, hp.reward_variant);
  return o;
}

}  // namespace agent_detail

// Greedy no-update pass over a split, in split order. This is both the
// every-10th-episode evaluation and the "memorization" readout for the train
// split itself.
inline EvalRecord evaluate_split(const QTable& table, const std::vector<EncodedBeat>& split,
                                 const Hyperparams& hp, const Clock& clock, std::size_t episode) {
  if (split.empty()) throw EmptySplit("evaluation split is empty");
  Rng rng(agent_detail::derive_seed(hp.seed, "eval", episode));
  double reward_sum = 0.0;
  std::uint64_t hits = 0;
  for (const EncodedBeat& beat : split) {
    const StepOutcome o = agent_detail::run_step(table, beat, hp, 0.0, true, rng, clock);
    reward_sum += o.reward;
    if (o.correct) ++hits;
  }
  const double n = static_cast<double>(split.size());
  EvalRecord rec;
  rec.episode = episode;
  rec.mean_reward = reward_sum / n;
  rec.accuracy = static_cast<double>(hits) / n;
  rec.hamming_loss = 1.0 - rec.accuracy;
  return rec;
}

struct TrainResult {
  QTable table;
  std::vector<EpisodeLog> logs;    // one per training episode
  std::vector<EvalRecord> evals;   // held-out greedy pass every eval_period
};

// episodes_train full passes over the training split (shuffled per episode),
// learning online with the configured policy: SoftMax sampling under the
// R3_softmax variant, epsilon-greedy otherwise. Every eval_period episodes a
// greedy pass over eval_split is recorded. Deterministic given seed + clock.
inline TrainResult train(const std::vector<EncodedBeat>& train_split,
                         const std::vector<EncodedBeat>& eval_split, const Hyperparams& hp,
                         const Clock& clock = steady_seconds) {
  validate_hyperparams(hp);
  if (train_split.empty()) throw EmptySplit("training split is empty");
  TrainResult out;
  Rng policy_rng(agent_detail::derive_seed(hp.seed, "policy", 0));
  for (std::size_t ep = 0; ep < hp.episodes_train; ++ep) {
    const Episode episode =
        episode_stream(train_split, agent_detail::derive_seed(hp.seed, "train-ep", ep));
    const double eps = epsilon_at(hp, ep);
    agent_detail::LogBuilder builder;
    for (std::size_t i = 0; i < episode.steps.size(); ++i) {
      const EncodedBeat& beat = episode.steps[i];
      const StepOutcome o =
          agent_detail::run_step(out.table, beat, hp, eps, false, policy_rng, clock);
      const std::size_t nxt = episode.successor(i);
      q_update(out.table, beat.state, o.action, o.reward,
               nxt == Episode::kTerminal ? nullptr : &episode.steps[nxt].state, hp);
      builder.add(beat.label, o);
    }
    out.logs.push_back(builder.finish(ep + 1));
    if (hp.eval_period && (ep + 1) % hp.eval_period == 0 && !eval_split.empty())
      out.evals.push_back(evaluate_split(out.table, eval_split, hp, clock, ep + 1));
  }
  return out;
}

struct TestResult {
  std::vector<EpisodeLog> logs;  // one per test episode
  MetricsReport report;          // aggregated over every step of every episode
};

// episodes_test greedy exploit-only passes; the table never changes.
inline TestResult test(const QTable& table, const std::vector<EncodedBeat>& split,
                       const Hyperparams& hp, const Clock& clock = steady_seconds) {
  validate_hyperparams(hp);
  if (split.empty()) throw EmptySplit("test split is empty");
  TestResult out;
  std::vector<ClassLabel> preds, truths;
  preds.reserve(hp.episodes_test * split.size());
  truths.reserve(hp.episodes_test * split.size());
  for (std::size_t ep = 0; ep < hp.episodes_test; ++ep) {
    const Episode episode =
        episode_stream(split, agent_detail::derive_seed(hp.seed, "test-ep", ep));
    Rng rng(agent_detail::derive_seed(hp.seed, "test-policy", ep));
    agent_detail::LogBuilder builder;
    for (const EncodedBeat& beat : episode.steps) {
      const StepOutcome o = agent_detail::run_step(table, beat, hp, 0.0, true, rng, clock);
      builder.add(beat.label, o);
      preds.push_back(o.action);
      truths.push_back(beat.label);
    }
    out.logs.push_back(builder.finish(ep + 1));
  }
  out.report = per_class_metrics(confusion(preds, truths));
  return out;
}

// --- persistence ----------------------------------------------------------
// Binary layout: magic "ECGQTBL1", u64 row count, then rows sorted by key:
// u32 key length, key bytes, five little-endian IEEE doubles.

inline constexpr char kQTableMagic[9] = "ECGQTBL1";

namespace agent_detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}
inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}
inline void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

struct ByteReader {
  const std::uint8_t* p;
  std::size_t left;
  void need(std::size_t n) const {
    if (left < n) throw IoError("Q-table file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    p += 4;
    left -= 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    left -= 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(p), n);
    p += n;
    left -= n;
    return s;
  }
};

}  // namespace agent_detail

inline void save_qtable(const QTable& table, const std::filesystem::path& path) {
  std::map<std::string, QRow> sorted(table.rows.begin(), table.rows.end());
  std::string out(kQTableMagic, 8);
  agent_detail::put_u64(out, sorted.size());
  for (const auto& [key, row] : sorted) {
    agent_detail::put_u32(out, static_cast<std::uint32_t>(key.size()));
    out += key;
    for (const double v : row) agent_detail::put_f64(out, v);
  }
  write_file_atomic(path, out);
}

inline QTable load_qtable(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> raw = read_binary_file(path);
  agent_detail::ByteReader r{raw.data(), raw.size()};
  if (r.bytes(8) != std::string(kQTableMagic, 8))
    throw IoError("not a Q-table file: bad magic");
  const std::uint64_t count = r.u64();
  QTable table;
  table.rows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t len = r.u32();
    std::string key = r.bytes(len);
    QRow row;
    for (double& v : row) v = r.f64();
    table.rows.emplace(std::move(key), row);
  }
  if (r.left != 0) throw IoError("Q-table file has trailing bytes");
  return table;
}

inline std::string qtable_to_csv(const QTable& table) {
  std::map<std::string, QRow> sorted(table.rows.begin(), table.rows.end());
  std::string out = "key,q0,q1,q2,q3,q4\n";
  for (const auto& [key, row] : sorted) {
    out += key;
    for (const double v : row) {
      out += ',';
      out += fmt_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ecgq
