#pragma once
// Run configuration. One flat `key = value` file, ECGQ_* environment
// overrides, and command-line flags mirror the same key set one-to-one;
// later layers win: defaults < file < environment < flags.

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecgq/agent.hpp"
#include "ecgq/filters.hpp"
#include "ecgq/grid.hpp"
#include "ecgq/synth.hpp"
#include "ecgq/wfdb.hpp"

namespace ecgq {

inline constexpr std::string_view kVersion = "0.1.0";

using KeyValues = std::map<std::string, std::string>;

struct ConfigKey {
  const char* key;
  const char* def;
  const char* help;
};

inline const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> schema = {
      {"input_dir", "data", "directory holding header/signal record pairs"},
      {"output_dir", "out", "directory every artifact is written under"},
      {"label_map", "", "diagnosis-code map file; built-in table when empty"},
      {"seed", "1", "master seed for splits, shuffles, and policies"},
      {"jobs", "1", "worker bound for the per-record stages"},
      // denoising
      {"filter_order", "4", "pole pairs per bandpass edge"},
      {"band_low_hz", "0.1", "bandpass low cut, Hz"},
      {"band_high_hz", "100", "bandpass high cut, Hz"},
      {"notch_hz", "50,60", "powerline notch centers, Hz, comma-separated"},
      {"notch_q", "30", "notch quality factor"},
      // state encoding
      {"key_mode", "grid_hash", "state keying: grid_hash or beat_index"},
      {"hash_width", "50", "resampled grid width used by grid_hash keys"},
      {"clip", "1", "symmetric clip bound on standardized amplitude"},
      // agent
      {"alpha", "0.001", "learning rate, (0, 1]"},
      {"gamma", "0.9", "discount factor, [0, 1]"},
      {"tau", "0.1", "SoftMax temperature, > 0"},
      {"epsilon_start", "1", "exploration rate at the first episode"},
      {"epsilon_end", "0.05", "exploration floor after the decay window"},
      {"epsilon_decay_episodes", "50", "episodes over which epsilon decays"},
      {"episodes_train", "100", "training episodes"},
      {"episodes_test", "50", "greedy test episodes"},
      {"eval_period", "10", "episodes between held-out greedy evals"},
      {"reward_variant", "r3_softmax", "r1, r2, r3_greedy, or r3_softmax"},
      // cohort
      {"min_age", "18", "minimum patient age kept"},
      {"keep_unknown_age", "false", "keep records with no stated age"},
      {"required_leads", "II,V1", "leads every record must carry"},
      {"train_fraction", "0.6", "per-class train share of the split"},
      // generator
      {"synth_patients_per_class", "10", "fixture patients per class"},
      {"synth_beats_min", "20", "fewest beats per fixture record"},
      {"synth_beats_max", "20", "most beats per fixture record"},
      {"synth_fs", "500", "fixture sampling rate, Hz"},
      {"synth_snr_db", "", "additive noise SNR in dB; clean when empty"},
      {"synth_template_file", "", "morphology overrides in the config format"},
  };
  return schema;
}

inline KeyValues default_config_kv() {
  KeyValues kv;
  for (const ConfigKey& k : config_schema()) kv[k.key] = k.def;
  return kv;
}

// `key = value` lines; blank lines and # comments ignored; unknown keys are
// errors so typos surface instead of silently keeping a default.
inline KeyValues parse_config_text(std::string_view text) {
  const KeyValues known = default_config_kv();
  KeyValues kv;
  for (const std::string& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line missing '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline void merge_config(KeyValues& base, const KeyValues& overlay) {
  for (const auto& [k, v] : overlay) base[k] = v;
}

// ECGQ_ALPHA overrides alpha, and so on for every schema key.
inline KeyValues env_overrides(
    const std::function<const char*(const char*)>& getter) {
  KeyValues kv;
  for (const ConfigKey& k : config_schema()) {
    std::string name = "ECGQ_";
    for (const char* p = k.key; *p; ++p)
      name += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char* v = getter(name.c_str())) kv[k.key] = v;
  }
  return kv;
}

inline std::string canonical_config_text(const KeyValues& kv) {
  std::string out;
  for (const ConfigKey& k : config_schema()) {
    const auto it = kv.find(k.key);
    out += std::string(k.key) + " = " + (it == kv.end() ? k.def : it->second) + "\n";
  }
  return out;
}

inline std::uint64_t config_hash(const KeyValues& kv) { return fnv1a64(canonical_config_text(kv)); }

inline bool parse_bool(std::string_view s, const char* what) {
  const std::string t = to_lower(trim(s));
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(std::string("not a boolean for ") + what + ": '" + t + "'");
}

inline RewardVariant parse_reward_variant(std::string_view s) {
  const std::string t = to_lower(trim(s));
  if (t == "r1") return RewardVariant::R1;
  if (t == "r2") return RewardVariant::R2;
  if (t == "r3_greedy") return RewardVariant::R3Greedy;
  if (t == "r3_softmax") return RewardVariant::R3Softmax;
  throw ConfigError("unknown reward_variant: '" + t + "'");
}

inline KeyMode parse_key_mode(std::string_view s) {
  const std::string t = to_lower(trim(s));
  if (t == "grid_hash") return KeyMode::GridHash;
  if (t == "beat_index") return KeyMode::BeatIndex;
  throw ConfigError("unknown key_mode: '" + t + "'");
}

struct RunConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::filesystem::path label_map_path;  // empty means the built-in table
  std::uint64_t seed = 1;
  int jobs = 1;
  FilterSpec filter;
  EnvConfig env;
  Hyperparams hp;
  CohortCriteria cohort;
  SynthCohortSpec synth;
  std::filesystem::path synth_template_file;
  KeyValues echo;  // the merged key set this config was built from
};

inline std::vector<std::string> parse_csv_list(std::string_view s) {
  std::vector<std::string> out;
  for (const std::string& part : split(s, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

// Typed view of a merged key set. Numeric and enum parsing throws ConfigError
// naming the offending key; structural invariants of the embedded specs are
// checked here too so every command fails before touching the filesystem.
inline RunConfig build_run_config(const KeyValues& overlay) {
  KeyValues kv = default_config_kv();
  merge_config(kv, overlay);
  const auto get = [&](const char* key) -> const std::string& { return kv.at(key); };

  RunConfig cfg;
  cfg.echo = kv;
  cfg.input_dir = get("input_dir");
  cfg.output_dir = get("output_dir");
  cfg.label_map_path = get("label_map");
  cfg.seed = static_cast<std::uint64_t>(parse_long(get("seed"), "seed"));
  cfg.jobs = static_cast<int>(parse_long(get("jobs"), "jobs"));
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");

  cfg.filter.order = static_cast<int>(parse_long(get("filter_order"), "filter_order"));
  cfg.filter.low_cut_hz = parse_double(get("band_low_hz"), "band_low_hz");
  cfg.filter.high_cut_hz = parse_double(get("band_high_hz"), "band_high_hz");
  cfg.filter.notch_freqs_hz.clear();
  for (const std::string& f : parse_csv_list(get("notch_hz")))
    cfg.filter.notch_freqs_hz.push_back(parse_double(f, "notch_hz"));
  cfg.filter.q_factor = parse_double(get("notch_q"), "notch_q");
  if (cfg.filter.order < 1) throw ConfigError("filter_order must be at least 1");
  if (!(0.0 < cfg.filter.low_cut_hz && cfg.filter.low_cut_hz < cfg.filter.high_cut_hz))
    throw ConfigError("bandpass needs 0 < band_low_hz < band_high_hz");

  cfg.env.mode = parse_key_mode(get("key_mode"));
  cfg.env.hash_width = static_cast<std::size_t>(parse_long(get("hash_width"), "hash_width"));
  const double clip = parse_double(get("clip"), "clip");
  cfg.env.clip_lo = -clip;
  cfg.env.clip_hi = clip;
  validate_env(cfg.env);

  cfg.hp.alpha = parse_double(get("alpha"), "alpha");
  cfg.hp.gamma = parse_double(get("gamma"), "gamma");
  cfg.hp.tau = parse_double(get("tau"), "tau");
  cfg.hp.epsilon_start = parse_double(get("epsilon_start"), "epsilon_start");
  cfg.hp.epsilon_end = parse_double(get("epsilon_end"), "epsilon_end");
  cfg.hp.epsilon_decay_episodes = static_cast<std::size_t>(
      parse_long(get("epsilon_decay_episodes"), "epsilon_decay_episodes"));
  cfg.hp.episodes_train =
      static_cast<std::size_t>(parse_long(get("episodes_train"), "episodes_train"));
  cfg.hp.episodes_test =
      static_cast<std::size_t>(parse_long(get("episodes_test"), "episodes_test"));
  cfg.hp.eval_period = static_cast<std::size_t>(parse_long(get("eval_period"), "eval_period"));
  cfg.hp.reward_variant = parse_reward_variant(get("reward_variant"));
  cfg.hp.seed = cfg.seed;
  validate_hyperparams(cfg.hp);

  cfg.cohort.min_age = static_cast<int>(parse_long(get("min_age"), "min_age"));
  cfg.cohort.keep_unknown_age = parse_bool(get("keep_unknown_age"), "keep_unknown_age");
  cfg.cohort.required_leads = parse_csv_list(get("required_leads"));
  cfg.cohort.train_fraction = parse_double(get("train_fraction"), "train_fraction");
  if (!(0.0 < cfg.cohort.train_fraction && cfg.cohort.train_fraction < 1.0))
    throw ConfigError("train_fraction must lie in (0, 1)");

  const int per_class = static_cast<int>(
      parse_long(get("synth_patients_per_class"), "synth_patients_per_class"));
  cfg.synth.patients_per_class.fill(per_class);
  cfg.synth.beats_min = static_cast<int>(parse_long(get("synth_beats_min"), "synth_beats_min"));
  cfg.synth.beats_max = static_cast<int>(parse_long(get("synth_beats_max"), "synth_beats_max"));
  cfg.synth.fs = parse_double(get("synth_fs"), "synth_fs");
  const std::string snr = trim(get("synth_snr_db"));
  cfg.synth.noise_snr_db =
      snr.empty() ? std::nullopt : std::optional<double>(parse_double(snr, "synth_snr_db"));
  cfg.synth.seed = cfg.seed;
  cfg.synth_template_file = get("synth_template_file");
  if (per_class < 0) throw ConfigError("synth_patients_per_class cannot be negative");
  if (cfg.synth.beats_min < 1 || cfg.synth.beats_max < cfg.synth.beats_min)
    throw ConfigError("synth beat range needs 1 <= min <= max");
  return cfg;
}

// Morphology overrides, same `key = value` grammar. Keys address template
// fields as <class>.<field-path>, e.g. "avb1.pr_s", "nsr.ii.p.amp",
// "af.overlay.amp_ii", "afl.rr.mean_s". Class names: nsr af afl lae avb1.
inline std::array<ClassTemplate, 5> parse_template_file(
    std::string_view text, std::array<ClassTemplate, 5> base = default_templates()) {
  const auto class_index = [](const std::string& name) -> std::size_t {
    const std::array<const char*, 5> names = {"nsr", "af", "afl", "lae", "avb1"};
    for (std::size_t i = 0; i < names.size(); ++i)
      if (name == names[i]) return i;
    throw ConfigError("unknown template class: '" + name + "'");
  };
  const auto wave_of = [](LeadWaves& lw, const std::string& name) -> WaveParams& {
    if (name == "p") return lw.p;
    if (name == "q") return lw.q;
    if (name == "r") return lw.r;
    if (name == "s") return lw.s;
    if (name == "t") return lw.t;
    throw ConfigError("unknown wave: '" + name + "'");
  };

  for (const std::string& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("template line missing '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::vector<std::string> path = split(key, '.');
    if (path.size() < 2) throw ConfigError("template key too shallow: '" + key + "'");
    ClassTemplate& tpl = base[class_index(path[0])];

    if (path.size() == 2 && path[1] == "pr_s") {
      tpl.pr_s = parse_double(value, key.c_str());
    } else if (path.size() == 3 && path[1] == "rr") {
      if (path[2] == "mean_s") tpl.rr.mean_s = parse_double(value, key.c_str());
      else if (path[2] == "jitter_s") tpl.rr.jitter_s = parse_double(value, key.c_str());
      else if (path[2] == "regime") {
        const std::string t = to_lower(value);
        if (t == "regular") tpl.rr.regime = RrRegime::Regular;
        else if (t == "irregular") tpl.rr.regime = RrRegime::Irregular;
        else throw ConfigError("unknown rr regime: '" + value + "'");
      } else {
        throw ConfigError("unknown rr field: '" + key + "'");
      }
    } else if (path.size() == 3 && path[1] == "overlay") {
      if (path[2] == "amp_ii") tpl.overlay.amp_ii = parse_double(value, key.c_str());
      else if (path[2] == "amp_v1") tpl.overlay.amp_v1 = parse_double(value, key.c_str());
      else if (path[2] == "freq_hz") tpl.overlay.freq_hz = parse_double(value, key.c_str());
      else if (path[2] == "kind") {
        const std::string t = to_lower(value);
        if (t == "none") tpl.overlay.kind = Overlay::None;
        else if (t == "fibrillatory") tpl.overlay.kind = Overlay::Fibrillatory;
        else if (t == "sawtooth") tpl.overlay.kind = Overlay::Sawtooth;
        else throw ConfigError("unknown overlay kind: '" + value + "'");
      } else {
        throw ConfigError("unknown overlay field: '" + key + "'");
      }
    } else if (path.size() == 4 && (path[1] == "ii" || path[1] == "v1")) {
      WaveParams& w = wave_of(path[1] == "ii" ? tpl.lead_ii : tpl.lead_v1, path[2]);
      if (path[3] == "amp") w.amp = parse_double(value, key.c_str());
      else if (path[3] == "center") w.center = parse_double(value, key.c_str());
      else if (path[3] == "sigma") w.sigma = parse_double(value, key.c_str());
      else if (path[3] == "shape") {
        const std::string t = to_lower(value);
        if (t == "gaussian") w.shape = WaveShape::Gaussian;
        else if (t == "biphasic") w.shape = WaveShape::Biphasic;
        else throw ConfigError("unknown wave shape: '" + value + "'");
      } else {
        throw ConfigError("unknown wave field: '" + key + "'");
      }
    } else {
      throw ConfigError("unknown template key: '" + key + "'");
    }
  }
  for (const ClassTemplate& tpl : base) validate_template(tpl);
  return base;
}

// One manifest per command invocation: the config echo, its hash, the seed,
// and the library version. Identical manifests imply identical outputs.
inline std::string run_manifest_json(std::string_view command, const KeyValues& kv) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(kv)));
  KeyValues merged = default_config_kv();
  merge_config(merged, kv);
  std::string out = "{\n";
  out += "  \"schema\": \"ecgq-run-v1\",\n";
  out += "  \"command\": \"" + std::string(command) + "\",\n";
  out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  out += "  \"config_hash\": \"" + std::string(hash) + "\",\n";
  out += "  \"seed\": " + merged.at("seed") + ",\n";
  out += "  \"config\": {\n";
  const auto& schema = config_schema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out += "    \"" + std::string(schema[i].key) + "\": \"" + merged.at(schema[i].key) + "\"";
    out += (i + 1 < schema.size()) ? ",\n" : "\n";
  }
  out += "  }\n}\n";
  return out;
}

}  // namespace ecgq
