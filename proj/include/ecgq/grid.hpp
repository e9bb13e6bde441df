#pragma once
// 21-level grid encoding of beat windows, the two state-keying schemes, and
// the shuffled per-episode beat stream the learner consumes.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ecgq/common.hpp"
#include "ecgq/qrs.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

inline constexpr std::size_t kGridRows = 21;

// Binary occupancy over 21 voltage levels; row 0 is the most negative level.
struct GridFrame {
  std::size_t width = 0;                // beat width in samples
  std::vector<std::uint8_t> occupancy;  // kGridRows * width, row-major, in {0,1}

  std::uint8_t at(std::size_t row, std::size_t col) const { return occupancy[row * width + col]; }
  // Each column carries exactly one occupied cell; return its row.
  std::size_t row_of(std::size_t col) const {
    for (std::size_t r = 0; r < kGridRows; ++r)
      if (occupancy[r * width + col]) return r;
    return kGridRows;  // unreachable on frames produced by encode_grid
  }
};

enum class Lead { II, V1 };

enum class KeyMode { BeatIndex, GridHash };

// Both leads always enter the key; the field exists so the rule is visible in
// the run config rather than buried in code.
enum class LeadFusion { Both };

struct EnvConfig {
  KeyMode mode = KeyMode::GridHash;
  double clip_lo = -1.0;
  double clip_hi = +1.0;
  std::size_t hash_width = 50;  // columns after resampling, >= 8
  LeadFusion fusion = LeadFusion::Both;
};

inline void validate_env(const EnvConfig& cfg) {
  if (cfg.hash_width < 8) throw InvalidSpec("grid hash width must be at least 8");
  if (!(cfg.clip_hi > 0.0) || cfg.clip_lo != -cfg.clip_hi)
    throw InvalidSpec("clip range must be symmetric around zero");
}

struct StateKey {
  KeyMode mode = KeyMode::GridHash;
  std::string key;  // opaque bytes; printable in both modes
  friend bool operator==(const StateKey&, const StateKey&) = default;
};

// Clip to the configured range and bin into 21 rows:
//   row = min(floor((v + 1) / 2 * 21), 20) for the default [-1, +1] range.
// Standardized R peaks routinely exceed +-1 and saturate the edge rows.
inline GridFrame encode_grid(const BeatWindow& beat, Lead lead, const EnvConfig& cfg = {}) {
  validate_env(cfg);
  const std::vector<double>& series = lead == Lead::II ? beat.lead_ii : beat.lead_v1;
  if (series.empty()) throw EmptyBeat("cannot encode a beat with no samples");
  GridFrame f;
  f.width = series.size();
  f.occupancy.assign(kGridRows * f.width, 0);
  const double span = cfg.clip_hi - cfg.clip_lo;
  for (std::size_t col = 0; col < f.width; ++col) {
    double v = series[col];
    v = v < cfg.clip_lo ? cfg.clip_lo : (v > cfg.clip_hi ? cfg.clip_hi : v);
    const double scaled = (v - cfg.clip_lo) / span * static_cast<double>(kGridRows);
    std::size_t row = static_cast<std::size_t>(scaled);  // scaled >= 0, floor by truncation
    if (row >= kGridRows) row = kGridRows - 1;
    f.occupancy[row * f.width + col] = 1;
  }
  return f;
}

// Resample a frame to out_w columns. Target column j covers source columns
// [j*W/out_w, (j+1)*W/out_w); a row is set only when it holds a strict
// majority of that span, so a split span yields an empty column. Near-tie
// content then lands on "empty" from both sides instead of flipping the key.
inline std::vector<std::uint8_t> resample_majority(const GridFrame& f, std::size_t out_w) {
  std::vector<std::uint8_t> out(kGridRows * out_w, 0);
  for (std::size_t j = 0; j < out_w; ++j) {
    const std::size_t a = j * f.width / out_w;
    const std::size_t b = (j + 1) * f.width / out_w;
    std::array<std::size_t, kGridRows> hist{};
    for (std::size_t c = a; c < b; ++c) ++hist[f.row_of(c)];
    for (std::size_t r = 0; r < kGridRows; ++r)
      if (2 * hist[r] > b - a) out[r * out_w + j] = 1;
  }
  return out;
}

inline StateKey state_key(const GridFrame& frame_ii, const GridFrame& frame_v1,
                          const BeatWindow& beat, const EnvConfig& cfg) {
  validate_env(cfg);
  if (cfg.mode == KeyMode::BeatIndex)
    return {cfg.mode, beat.patient_id + "#" + std::to_string(beat.beat_number)};
  std::vector<std::uint8_t> bytes = resample_majority(frame_ii, cfg.hash_width);
  const std::vector<std::uint8_t> tail = resample_majority(frame_v1, cfg.hash_width);
  bytes.insert(bytes.end(), tail.begin(), tail.end());
  const std::uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return {cfg.mode, std::string(hex, 16)};
}

inline StateKey state_key_for(const BeatWindow& beat, const EnvConfig& cfg) {
  if (cfg.mode == KeyMode::BeatIndex) {
    validate_env(cfg);
    return {cfg.mode, beat.patient_id + "#" + std::to_string(beat.beat_number)};
  }
  return state_key(encode_grid(beat, Lead::II, cfg), encode_grid(beat, Lead::V1, cfg), beat, cfg);
}

// One beat of a split with its precomputed key; beat_ref indexes the split.
struct EncodedBeat {
  StateKey state;
  ClassLabel label = ClassLabel::NSR;
  std::size_t beat_ref = 0;
};

inline std::vector<EncodedBeat> encode_split(const std::vector<BeatWindow>& beats,
                                             const EnvConfig& cfg) {
  validate_env(cfg);
  std::vector<EncodedBeat> out;
  out.reserve(beats.size());
  for (std::size_t i = 0; i < beats.size(); ++i)
    out.push_back({state_key_for(beats[i], cfg), beats[i].label, i});
  return out;
}

// One episode = one full pass over the split in an order shuffled by the
// seed. The successor of step i is step i+1; the successor of the last step
// is the terminal marker kTerminal, whose max-Q is zero by convention.
struct Episode {
  static constexpr std::size_t kTerminal = static_cast<std::size_t>(-1);
  std::vector<EncodedBeat> steps;
  std::size_t successor(std::size_t i) const {
    return i + 1 < steps.size() ? i + 1 : kTerminal;
  }
};

inline Episode episode_stream(const std::vector<EncodedBeat>& split, std::uint64_t seed) {
  if (split.empty()) throw EmptySplit("episode over an empty split");
  Episode ep;
  ep.steps = split;
  Rng rng(seed);
  shuffle_in_place(ep.steps, rng);
  return ep;
}

// Debug bitmap, PBM P1 text. Image rows go top-down, so the +1 voltage level
// prints first; occupied cells are 1.
inline std::string grid_to_pbm(const GridFrame& f) {
  std::string out = "P1\n" + std::to_string(f.width) + " " + std::to_string(kGridRows) + "\n";
  for (std::size_t r = kGridRows; r-- > 0;) {
    for (std::size_t c = 0; c < f.width; ++c) {
      out += f.at(r, c) ? '1' : '0';
      out += c + 1 < f.width ? ' ' : '\n';
    }
  }
  return out;
}

}  // namespace ecgq
