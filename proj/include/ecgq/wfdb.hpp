#pragma once

// Record ingestion: WFDB-style header text, 16-bit interleaved signal
// payloads (plain or inside a level-4 MAT container), demographics, the
// diagnosis-code mapping, and cohort assembly with exclusion bookkeeping.

#include <algorithm>
#include <cstring>
#include <map>
#include <optional>
#include <span>

#include "ecgq/common.hpp"

namespace ecgq {

// ---------------------------------------------------------------------------
// Labels. The five rhythm classes double as the agent's action ids.

enum class ClassLabel : int { NSR = 0, AF = 1, AFL = 2, LAE = 3, AVB1 = 4 };

inline constexpr std::size_t kNumClasses = 5;

inline const char* label_name(ClassLabel c) {
  switch (c) {
    case ClassLabel::NSR: return "NSR";
    case ClassLabel::AF: return "AF";
    case ClassLabel::AFL: return "AFL";
    case ClassLabel::LAE: return "LAE";
    case ClassLabel::AVB1: return "1AVB";
  }
  return "?";
}

inline std::optional<ClassLabel> parse_class_name(std::string_view name) {
  const std::string n = to_lower(trim(name));
  if (n == "nsr") return ClassLabel::NSR;
  if (n == "af") return ClassLabel::AF;
  if (n == "afl") return ClassLabel::AFL;
  if (n == "lae") return ClassLabel::LAE;
  if (n == "1avb" || n == "avb1") return ClassLabel::AVB1;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Header grammar.

struct SignalDesc {
  std::string file;
  int format_code = 16;
  long byte_offset = 0;  // the "+N" suffix on the format field
  double gain = 200.0;   // ADU per mV
  double baseline = 0.0;
  std::string units = "mV";
  std::optional<long> adc_res;
  std::optional<long> adc_zero;
  std::optional<long> init_value;
  std::optional<long> checksum;
  std::optional<long> block_size;
  std::string lead_name;
};

struct RecordHeader {
  std::string record_name;
  int n_signals = 0;
  double fs = 0.0;
  long n_samples = 0;
  std::vector<SignalDesc> signals;
};

enum class Sex { Male, Female, Unknown };

inline const char* sex_code(Sex s) {
  switch (s) {
    case Sex::Male: return "M";
    case Sex::Female: return "F";
    case Sex::Unknown: return "U";
  }
  return "U";
}

struct PatientMeta {
  std::optional<int> age;
  Sex sex = Sex::Unknown;
  std::vector<std::string> dx_codes;
  std::string source = "unknown";
};

struct ParsedRecord {
  RecordHeader header;
  PatientMeta meta;
};

// Dataset tag from the record naming convention used by the source archive.
inline std::string source_from_record_id(std::string_view id) {
  auto starts = [&](std::string_view p) { return id.substr(0, p.size()) == p; };
  if (starts("JS")) return "Chapman-Ningbo";
  if (starts("HR")) return "PTB-XL";
  if (starts("A")) return "CPSC";
  if (starts("Q")) return "CPSC-Extra";
  if (starts("E")) return "G12EC";
  if (starts("S")) return "PTB";
  if (starts("I")) return "INCART";
  return "unknown";
}

namespace detail {

// gain field: GAIN(BASELINE)/UNITS, every part optional.
inline void parse_gain_field(const std::string& tok, SignalDesc& d) {
  std::string left = tok;
  const auto slash = tok.find('/');
  if (slash != std::string::npos) {
    left = tok.substr(0, slash);
    d.units = tok.substr(slash + 1);
  }
  bool have_baseline = false;
  const auto open = left.find('(');
  if (open != std::string::npos) {
    const auto close = left.find(')', open);
    if (close == std::string::npos) throw MalformedHeader("unbalanced baseline parens: " + tok);
    d.baseline = parse_double(left.substr(open + 1, close - open - 1), "baseline");
    have_baseline = true;
    left = left.substr(0, open);
  }
  if (!left.empty()) d.gain = parse_double(left, "gain");
  if (d.gain == 0.0) throw MalformedHeader("zero gain in signal descriptor");
  if (!have_baseline) d.baseline = 0.0;  // may be overridden by adc_zero below
}

inline void parse_format_field(const std::string& tok, SignalDesc& d) {
  std::string code = tok;
  const auto plus = tok.find('+');
  if (plus != std::string::npos) {
    code = tok.substr(0, plus);
    d.byte_offset = parse_long(tok.substr(plus + 1), "format byte offset");
  }
  // The "x", ":", and other format modifiers are not used by this corpus.
  const long fmt = parse_long(code, "format code");
  if (fmt != 16) {
    throw UnsupportedFormatCode("signal format " + code + " not supported (only 16)");
  }
  d.format_code = static_cast<int>(fmt);
}

}  // namespace detail

inline ParsedRecord parse_header(std::string_view text) {
  if (trim(text).empty()) throw MalformedHeader("empty header");

  ParsedRecord rec;
  bool have_record_line = false;

  for (const std::string& raw_line : split(text, '\n')) {
    const std::string line = trim(raw_line);
    if (line.empty()) continue;

    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = to_lower(trim(line.substr(1, colon - 1)));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "age") {
        if (!value.empty() && to_lower(value) != "nan" && to_lower(value) != "unknown") {
          try {
            rec.meta.age = static_cast<int>(parse_long(value, "age"));
          } catch (const ConfigError&) {
            // Unparseable ages read as unknown rather than failing the record.
          }
        }
      } else if (key == "sex") {
        const std::string v = to_lower(value);
        if (v == "m" || v == "male") rec.meta.sex = Sex::Male;
        else if (v == "f" || v == "female") rec.meta.sex = Sex::Female;
      } else if (key == "dx") {
        for (const std::string& code : split(value, ',')) {
          const std::string c = trim(code);
          if (!c.empty()) rec.meta.dx_codes.push_back(c);
        }
      }
      continue;
    }

    const auto toks = split_ws(line);
    if (!have_record_line) {
      if (toks.size() < 4) throw MalformedHeader("record line needs name/signals/fs/samples");
      rec.header.record_name = toks[0].substr(0, toks[0].find('/'));
      rec.header.n_signals = static_cast<int>(parse_long(toks[1], "signal count"));
      // fs may carry a counter-frequency suffix; only the leading part matters.
      try {
        rec.header.fs = parse_double(toks[2].substr(0, toks[2].find('/')), "sampling rate");
        rec.header.n_samples = parse_long(toks[3], "sample count");
      } catch (const ConfigError& e) {
        throw MalformedHeader(e.what());
      }
      if (rec.header.n_signals < 1) throw MalformedHeader("record must declare at least one signal");
      if (rec.header.fs <= 0) throw MalformedHeader("sampling rate must be positive");
      if (rec.header.n_samples <= 0) throw MalformedHeader("sample count must be positive");
      have_record_line = true;
      continue;
    }

    // Signal descriptor line.
    if (toks.size() < 2) throw MalformedHeader("signal line needs file and format: " + line);
    SignalDesc d;
    d.file = toks[0];
    detail::parse_format_field(toks[1], d);
    const bool explicit_baseline = toks.size() > 2 && toks[2].find('(') != std::string::npos;
    if (toks.size() > 2) detail::parse_gain_field(toks[2], d);
    if (toks.size() > 3) d.adc_res = parse_long(toks[3], "adc resolution");
    if (toks.size() > 4) d.adc_zero = parse_long(toks[4], "adc zero");
    if (toks.size() > 5) d.init_value = parse_long(toks[5], "initial value");
    if (toks.size() > 6) d.checksum = parse_long(toks[6], "checksum");
    if (toks.size() > 7) d.block_size = parse_long(toks[7], "block size");
    if (toks.size() > 8) d.lead_name = toks[8];
    if (!explicit_baseline && d.adc_zero) d.baseline = static_cast<double>(*d.adc_zero);
    rec.header.signals.push_back(std::move(d));
  }

  if (!have_record_line) throw MalformedHeader("no record line found");
  if (static_cast<int>(rec.header.signals.size()) != rec.header.n_signals) {
    throw MalformedHeader("descriptor count does not match declared signal count");
  }
  rec.meta.source = source_from_record_id(rec.header.record_name);
  return rec;
}

inline std::string serialize_header(const RecordHeader& h, const PatientMeta* meta = nullptr) {
  std::string out = h.record_name + " " + std::to_string(h.n_signals) + " " + fmt_double(h.fs) +
                    " " + std::to_string(h.n_samples) + "\n";
  for (const SignalDesc& d : h.signals) {
    out += d.file + " " + std::to_string(d.format_code);
    if (d.byte_offset != 0) out += "+" + std::to_string(d.byte_offset);
    out += " " + fmt_double(d.gain) + "(" + fmt_double(d.baseline) + ")/" + d.units;
    const std::optional<long>* opts[] = {&d.adc_res, &d.adc_zero, &d.init_value, &d.checksum,
                                         &d.block_size};
    for (const auto* o : opts) {
      if (!o->has_value()) break;  // fields are positional; stop at the first gap
      out += " " + std::to_string(**o);
    }
    if (!d.lead_name.empty()) out += " " + d.lead_name;
    out += "\n";
  }
  if (meta) {
    out += "#Age: " + (meta->age ? std::to_string(*meta->age) : std::string("NaN")) + "\n";
    out += std::string("#Sex: ") +
           (meta->sex == Sex::Male ? "Male" : meta->sex == Sex::Female ? "Female" : "Unknown") +
           "\n";
    std::string dx;
    for (const std::string& c : meta->dx_codes) {
      if (!dx.empty()) dx += ",";
      dx += c;
    }
    out += "#Dx: " + dx + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Signal payloads.

using SignalMatrix = std::vector<std::vector<double>>;  // [signal][sample], mV

namespace detail {

inline std::int32_t read_i32le(const std::uint8_t* p) {
  std::uint32_t v = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                    (static_cast<std::uint32_t>(p[2]) << 16) |
                    (static_cast<std::uint32_t>(p[3]) << 24);
  std::int32_t out;
  std::memcpy(&out, &v, 4);
  return out;
}

inline std::int16_t read_i16le(const std::uint8_t* p) {
  const std::uint16_t v =
      static_cast<std::uint16_t>(p[0]) | static_cast<std::uint16_t>(static_cast<std::uint16_t>(p[1]) << 8);
  std::int16_t out;
  std::memcpy(&out, &v, 2);
  return out;
}

struct Mat4Info {
  std::size_t data_start = 0;
  long rows = 0;
  long cols = 0;
  int elem_size = 0;  // 2 for int16, 4 for int32
};

// Level-4 container header: five little-endian int32 words (type, mrows,
// ncols, imagf, namlen) followed by a NUL-terminated matrix name.
inline std::optional<Mat4Info> probe_mat4(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 20) return std::nullopt;
  const std::int32_t type = read_i32le(bytes.data());
  const std::int32_t mrows = read_i32le(bytes.data() + 4);
  const std::int32_t ncols = read_i32le(bytes.data() + 8);
  const std::int32_t imagf = read_i32le(bytes.data() + 12);
  const std::int32_t namlen = read_i32le(bytes.data() + 16);
  if (imagf != 0) return std::nullopt;
  if (mrows <= 0 || ncols <= 0 || namlen <= 0 || namlen > 64) return std::nullopt;
  int elem = 0;
  if (type == 30) elem = 2;       // int16, little-endian, numeric
  else if (type == 20) elem = 4;  // int32, little-endian, numeric
  else return std::nullopt;
  const std::size_t start = 20 + static_cast<std::size_t>(namlen);
  if (bytes.size() < start) return std::nullopt;
  Mat4Info info;
  info.data_start = start;
  info.rows = mrows;
  info.cols = ncols;
  info.elem_size = elem;
  return info;
}

inline long read_elem(const std::uint8_t* p, int elem_size) {
  return elem_size == 2 ? static_cast<long>(read_i16le(p)) : static_cast<long>(read_i32le(p));
}

}  // namespace detail

inline SignalMatrix read_signal(const RecordHeader& h, std::span<const std::uint8_t> payload) {
  const auto n_sig = static_cast<std::size_t>(h.n_signals);
  const auto n_samp = static_cast<std::size_t>(h.n_samples);
  if (h.signals.size() != n_sig) throw MalformedHeader("header missing signal descriptors");

  long offset = h.signals.front().byte_offset;
  for (const SignalDesc& d : h.signals) {
    if (d.format_code != 16) throw UnsupportedFormatCode("only format 16 payloads supported");
    if (d.byte_offset != offset) {
      throw UnsupportedContainer("per-signal byte offsets must agree");
    }
    if (d.file != h.signals.front().file) {
      throw UnsupportedContainer("multi-file records not supported");
    }
  }

  SignalMatrix out(n_sig, std::vector<double>(n_samp));
  auto store = [&](std::size_t sig, std::size_t samp, long adu) {
    const SignalDesc& d = h.signals[sig];
    out[sig][samp] = (static_cast<double>(adu) - d.baseline) / d.gain;
  };

  const std::size_t raw_need = 2 * n_sig * n_samp + static_cast<std::size_t>(offset);
  if (payload.size() == raw_need) {
    // Interleaved frames of int16, one value per signal per frame.
    const std::uint8_t* p = payload.data() + offset;
    for (std::size_t t = 0; t < n_samp; ++t) {
      for (std::size_t s = 0; s < n_sig; ++s, p += 2) {
        store(s, t, detail::read_i16le(p));
      }
    }
    return out;
  }

  const auto mat = detail::probe_mat4(payload);
  if (!mat) {
    throw LengthMismatch("payload is neither a " + std::to_string(raw_need) +
                         "-byte raw stream nor a level-4 container");
  }
  const auto rows = static_cast<std::size_t>(mat->rows);
  const auto cols = static_cast<std::size_t>(mat->cols);
  const std::size_t need = mat->data_start + rows * cols * static_cast<std::size_t>(mat->elem_size);
  if (payload.size() < need) throw LengthMismatch("container data shorter than its declared shape");

  const std::uint8_t* base = payload.data() + mat->data_start;
  const auto at = [&](std::size_t r, std::size_t c) {
    // Column-major storage.
    return detail::read_elem(base + (c * rows + r) * static_cast<std::size_t>(mat->elem_size),
                             mat->elem_size);
  };
  if (rows == n_sig && cols == n_samp) {
    for (std::size_t s = 0; s < n_sig; ++s) {
      for (std::size_t t = 0; t < n_samp; ++t) store(s, t, at(s, t));
    }
  } else if (rows == n_samp && cols == n_sig) {
    for (std::size_t s = 0; s < n_sig; ++s) {
      for (std::size_t t = 0; t < n_samp; ++t) store(s, t, at(t, s));
    }
  } else {
    throw LengthMismatch("container shape does not match the header dimensions");
  }
  return out;
}

// Serialize an integer matrix as a level-4 container (int16). Used by the
// generator and by round-trip fixtures.
inline std::vector<std::uint8_t> write_mat4_int16(const std::vector<std::vector<int>>& matrix,
                                                  std::string_view name = "val") {
  if (matrix.empty() || matrix.front().empty()) throw EmptyMatrix("cannot serialize empty matrix");
  const std::size_t rows = matrix.size();
  const std::size_t cols = matrix.front().size();
  for (const auto& r : matrix) {
    if (r.size() != cols) throw LengthMismatch("ragged matrix");
  }
  std::vector<std::uint8_t> out;
  out.reserve(20 + name.size() + 1 + rows * cols * 2);
  auto push_i32 = [&](std::int32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  };
  push_i32(30);  // little-endian int16 numeric matrix
  push_i32(static_cast<std::int32_t>(rows));
  push_i32(static_cast<std::int32_t>(cols));
  push_i32(0);
  push_i32(static_cast<std::int32_t>(name.size() + 1));
  for (char c : name) out.push_back(static_cast<std::uint8_t>(c));
  out.push_back(0);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      const int v = matrix[r][c];
      out.push_back(static_cast<std::uint8_t>(v & 0xff));
      out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lead selection.

inline std::vector<std::size_t> lead_indices(const RecordHeader& h,
                                             const std::vector<std::string>& wanted) {
  std::vector<std::size_t> idx;
  for (const std::string& w : wanted) {
    const std::string target = to_lower(trim(w));
    bool found = false;
    for (std::size_t i = 0; i < h.signals.size(); ++i) {
      if (to_lower(trim(h.signals[i].lead_name)) == target) {
        idx.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) throw MissingLead("record " + h.record_name + " lacks lead " + w);
  }
  return idx;
}

inline SignalMatrix select_leads(const SignalMatrix& matrix, const RecordHeader& h,
                                 const std::vector<std::string>& wanted = {"II", "V1"}) {
  SignalMatrix out;
  for (std::size_t i : lead_indices(h, wanted)) {
    if (i >= matrix.size()) throw LengthMismatch("matrix has fewer rows than descriptors");
    out.push_back(matrix[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Diagnosis-code mapping.

using LabelMap = std::map<std::string, ClassLabel>;

// Default table: the five study classes under their standard codes, as
// published in the source archive's code mapping.
inline LabelMap default_label_map() {
  return {
      {"426783006", ClassLabel::NSR}, {"164889003", ClassLabel::AF},
      {"164890007", ClassLabel::AFL}, {"67741000119109", ClassLabel::LAE},
      {"270492004", ClassLabel::AVB1},
  };
}

// Lines of `code = class_name`; blank lines and `#` comments ignored.
inline LabelMap parse_label_map(std::string_view text) {
  LabelMap map;
  for (const std::string& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("label map line missing '=': " + line);
    const std::string code = trim(line.substr(0, eq));
    const std::string name = trim(line.substr(eq + 1));
    const auto label = parse_class_name(name);
    if (code.empty() || !label) throw ConfigError("bad label map entry: " + line);
    map[code] = *label;
  }
  return map;
}

enum class LabelOutcome { Ok, MultiLabel, NoRelevantLabel };

struct LabelResult {
  LabelOutcome outcome = LabelOutcome::NoRelevantLabel;
  ClassLabel label = ClassLabel::NSR;  // valid only when outcome == Ok
};

// Mono-label rule: exactly one distinct diagnosis code may map into the five
// classes. Two mapped codes reject the record even if they name the same
// class; duplicated identical codes count once.
inline LabelResult map_labels(const std::vector<std::string>& dx_codes, const LabelMap& map) {
  std::vector<std::string> mapped_codes;
  LabelResult res;
  for (const std::string& code : dx_codes) {
    const std::string c = trim(code);
    const auto it = map.find(c);
    if (it == map.end()) continue;
    if (std::find(mapped_codes.begin(), mapped_codes.end(), c) != mapped_codes.end()) continue;
    mapped_codes.push_back(c);
    res.label = it->second;
  }
  if (mapped_codes.empty()) {
    res.outcome = LabelOutcome::NoRelevantLabel;
  } else if (mapped_codes.size() > 1) {
    res.outcome = LabelOutcome::MultiLabel;
  } else {
    res.outcome = LabelOutcome::Ok;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Cohort assembly.

enum class Split { Train, Test };

inline const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

struct CohortCandidate {
  std::string record_id;
  std::string source = "unknown";
  std::optional<int> age;
  Sex sex = Sex::Unknown;
  std::vector<std::string> dx_codes;
  std::vector<std::string> lead_names;
};

inline CohortCandidate candidate_from(const ParsedRecord& rec) {
  CohortCandidate c;
  c.record_id = rec.header.record_name;
  c.source = rec.meta.source;
  c.age = rec.meta.age;
  c.sex = rec.meta.sex;
  c.dx_codes = rec.meta.dx_codes;
  for (const SignalDesc& d : rec.header.signals) c.lead_names.push_back(d.lead_name);
  return c;
}

struct CohortCriteria {
  int min_age = 18;
  bool keep_unknown_age = false;
  std::vector<std::string> required_leads = {"II", "V1"};
  double train_fraction = 0.6;
};

struct CohortEntry {
  std::string record_id;
  std::string source;
  std::optional<int> age;
  Sex sex = Sex::Unknown;
  ClassLabel label = ClassLabel::NSR;
  Split split = Split::Train;
};

struct Rejection {
  std::string record_id;
  std::string reason;
};

struct Cohort {
  std::vector<CohortEntry> entries;
  std::vector<Rejection> rejections;

  std::map<std::string, std::size_t> rejection_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const Rejection& r : rejections) ++counts[r.reason];
    return counts;
  }
};

inline Cohort build_cohort(const std::vector<CohortCandidate>& candidates,
                           const CohortCriteria& criteria, const LabelMap& label_map,
                           std::uint64_t seed) {
  Cohort cohort;
  for (const CohortCandidate& c : candidates) {
    if (!c.age) {
      if (!criteria.keep_unknown_age) {
        cohort.rejections.push_back({c.record_id, "unknown_age"});
        continue;
      }
    } else if (*c.age < criteria.min_age) {
      cohort.rejections.push_back({c.record_id, "under_min_age"});
      continue;
    }
    const LabelResult lr = map_labels(c.dx_codes, label_map);
    if (lr.outcome == LabelOutcome::NoRelevantLabel) {
      cohort.rejections.push_back({c.record_id, "no_relevant_label"});
      continue;
    }
    if (lr.outcome == LabelOutcome::MultiLabel) {
      cohort.rejections.push_back({c.record_id, "multi_label"});
      continue;
    }
    bool has_leads = true;
    for (const std::string& w : criteria.required_leads) {
      const std::string target = to_lower(trim(w));
      const bool found = std::any_of(c.lead_names.begin(), c.lead_names.end(),
                                     [&](const std::string& n) { return to_lower(trim(n)) == target; });
      if (!found) {
        has_leads = false;
        break;
      }
    }
    if (!has_leads) {
      cohort.rejections.push_back({c.record_id, "missing_lead"});
      continue;
    }
    CohortEntry e;
    e.record_id = c.record_id;
    e.source = c.source;
    e.age = c.age;
    e.sex = c.sex;
    e.label = lr.label;
    cohort.entries.push_back(std::move(e));
  }
  if (cohort.entries.empty()) throw EmptyCohort("no record passed the cohort criteria");

  // Stratified patient-disjoint split: within each class, order by record id
  // (an id appears once per cohort), shuffle with the shared seeded stream,
  // cut at the train fraction.
  Rng rng(seed);
  for (std::size_t cls = 0; cls < kNumClasses; ++cls) {
    std::vector<CohortEntry*> members;
    for (CohortEntry& e : cohort.entries) {
      if (static_cast<std::size_t>(e.label) == cls) members.push_back(&e);
    }
    if (members.empty()) continue;
    std::sort(members.begin(), members.end(),
              [](const CohortEntry* a, const CohortEntry* b) { return a->record_id < b->record_id; });
    shuffle_in_place(members, rng);
    const auto n = members.size();
    std::size_t n_train;
    if (n == 1) {
      n_train = 1;  // a singleton class can only train
    } else {
      const auto want = static_cast<std::size_t>(
          std::lround(criteria.train_fraction * static_cast<double>(n)));
      n_train = std::clamp<std::size_t>(want, 1, n - 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      members[i]->split = (i < n_train) ? Split::Train : Split::Test;
    }
  }
  return cohort;
}

inline std::string cohort_manifest_csv(const Cohort& cohort) {
  std::string out = "record_id,source,age,sex,label_int,split\n";
  for (const CohortEntry& e : cohort.entries) {
    out += e.record_id + "," + e.source + "," + (e.age ? std::to_string(*e.age) : "NaN") + "," +
           sex_code(e.sex) + "," + std::to_string(static_cast<int>(e.label)) + "," +
           split_name(e.split) + "\n";
  }
  return out;
}

inline std::string cohort_rejections_csv(const Cohort& cohort) {
  std::string out = "record_id,reason\n";
  for (const Rejection& r : cohort.rejections) out += r.record_id + "," + r.reason + "\n";
  return out;
}

}  // namespace ecgq
