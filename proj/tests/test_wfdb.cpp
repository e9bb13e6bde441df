#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ecgq/wfdb.hpp"

namespace {

const char* kLeads[12] = {"I", "II", "III", "aVR", "aVL", "aVF",
                          "V1", "V2", "V3", "V4", "V5", "V6"};

std::string twelve_lead_header(const std::string& name, long n_samples,
                               const std::string& age = "74", const std::string& sex = "Male",
                               const std::string& dx = "164889003") {
  std::string h = name + " 12 500 " + std::to_string(n_samples) + " 15:12:05 18/01/2020\n";
  for (const char* lead : kLeads) {
    h += name + ".mat 16+24 1000.0(0)/mV 16 0 28 -1716 0 " + std::string(lead) + "\n";
  }
  h += "#Age: " + age + "\n#Sex: " + sex + "\n#Dx: " + dx + "\n";
  return h;
}

std::vector<std::uint8_t> raw16_payload(const std::vector<std::vector<int>>& frames_by_signal,
                                        long offset = 0) {
  // frames_by_signal[s][t]; emit interleaved little-endian frames.
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(offset), 0);
  const std::size_t n_samp = frames_by_signal.front().size();
  for (std::size_t t = 0; t < n_samp; ++t) {
    for (const auto& sig : frames_by_signal) {
      const int v = sig[t];
      bytes.push_back(static_cast<std::uint8_t>(v & 0xff));
      bytes.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    }
  }
  return bytes;
}

ecgq::CohortCandidate candidate(const std::string& id, std::optional<int> age,
                                std::vector<std::string> dx,
                                std::vector<std::string> leads = {"II", "V1"}) {
  ecgq::CohortCandidate c;
  c.record_id = id;
  c.source = ecgq::source_from_record_id(id);
  c.age = age;
  c.dx_codes = std::move(dx);
  c.lead_names = std::move(leads);
  return c;
}

}  // namespace

TEST_CASE("header parsing extracts dimensions, demographics, and codes") {
  const auto rec = ecgq::parse_header(twelve_lead_header("A0001", 7500, "74", "Male",
                                                         "164889003,59118001"));
  REQUIRE(rec.header.record_name == "A0001");
  REQUIRE(rec.header.n_signals == 12);
  REQUIRE(rec.header.fs == 500.0);
  REQUIRE(rec.header.n_samples == 7500);
  REQUIRE(rec.header.signals.size() == 12);
  REQUIRE(rec.header.signals[1].lead_name == "II");
  REQUIRE(rec.header.signals[0].gain == 1000.0);
  REQUIRE(rec.header.signals[0].baseline == 0.0);
  REQUIRE(rec.header.signals[0].byte_offset == 24);
  REQUIRE(rec.header.signals[0].units == "mV");
  REQUIRE(rec.meta.age.has_value());
  REQUIRE(*rec.meta.age == 74);
  REQUIRE(rec.meta.sex == ecgq::Sex::Male);
  REQUIRE(rec.meta.dx_codes == std::vector<std::string>{"164889003", "59118001"});
  REQUIRE(rec.meta.source == "CPSC");
}

TEST_CASE("absent or NaN age reads as unknown") {
  const auto no_age = ecgq::parse_header("X1 1 500 1000\nX1.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  REQUIRE_FALSE(no_age.meta.age.has_value());
  const auto nan_age = ecgq::parse_header(twelve_lead_header("A0002", 5000, "NaN"));
  REQUIRE_FALSE(nan_age.meta.age.has_value());
}

TEST_CASE("malformed headers are rejected") {
  REQUIRE_THROWS_AS(ecgq::parse_header(""), ecgq::MalformedHeader);
  REQUIRE_THROWS_AS(ecgq::parse_header("A0001 12 500\n"), ecgq::MalformedHeader);
  REQUIRE_THROWS_AS(ecgq::parse_header("A0001 12 fast 7500\n"), ecgq::MalformedHeader);
  REQUIRE_THROWS_AS(ecgq::parse_header("A0001 2 500 100\nA0001.dat 16 1000/mV 16 0 0 0 0 II\n"),
                    ecgq::MalformedHeader);  // descriptor count mismatch
  REQUIRE_THROWS_AS(
      ecgq::parse_header("A0001 1 500 100\nA0001.dat 212 1000/mV 16 0 0 0 0 II\n"),
      ecgq::UnsupportedFormatCode);
  REQUIRE_THROWS_AS(
      ecgq::parse_header("A0001 1 500 100\nA0001.dat 16 0(0)/mV 16 0 0 0 0 II\n"),
      ecgq::MalformedHeader);  // zero gain
}

TEST_CASE("serialize then reparse reproduces numeric fields") {
  const auto rec = ecgq::parse_header(twelve_lead_header("A0042", 6000, "31", "Female",
                                                         "426783006"));
  const std::string text = ecgq::serialize_header(rec.header, &rec.meta);
  const auto again = ecgq::parse_header(text);
  REQUIRE(again.header.record_name == rec.header.record_name);
  REQUIRE(again.header.n_signals == rec.header.n_signals);
  REQUIRE(again.header.fs == rec.header.fs);
  REQUIRE(again.header.n_samples == rec.header.n_samples);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto& a = rec.header.signals[i];
    const auto& b = again.header.signals[i];
    REQUIRE(b.format_code == a.format_code);
    REQUIRE(b.byte_offset == a.byte_offset);
    REQUIRE(b.gain == a.gain);
    REQUIRE(b.baseline == a.baseline);
    REQUIRE(b.adc_res == a.adc_res);
    REQUIRE(b.adc_zero == a.adc_zero);
    REQUIRE(b.init_value == a.init_value);
    REQUIRE(b.checksum == a.checksum);
    REQUIRE(b.block_size == a.block_size);
    REQUIRE(b.lead_name == a.lead_name);
  }
  REQUIRE(again.meta.age == rec.meta.age);
  REQUIRE(again.meta.sex == rec.meta.sex);
  REQUIRE(again.meta.dx_codes == rec.meta.dx_codes);
}

TEST_CASE("raw format-16 payloads convert ADU to mV") {
  const auto rec =
      ecgq::parse_header("T1 2 500 3\nT1.dat 16 1000(0)/mV 16 0 0 0 0 II\n"
                         "T1.dat 16 500(100)/mV 16 0 0 0 0 V1\n");
  const auto bytes = raw16_payload({{1000, 0, -2000}, {100, 600, -400}});
  const auto m = ecgq::read_signal(rec.header, bytes);
  REQUIRE(m.size() == 2);
  REQUIRE(m[0].size() == 3);
  REQUIRE(m[0][0] == 1.0);  // gain definition
  REQUIRE(m[0][1] == 0.0);
  REQUIRE(m[0][2] == -2.0);
  REQUIRE(m[1][0] == 0.0);  // baseline subtracted before scaling
  REQUIRE(m[1][1] == 1.0);
  REQUIRE(m[1][2] == -1.0);
}

TEST_CASE("all-zero payload reads as all-zero matrix") {
  const auto rec = ecgq::parse_header("T2 1 500 100\nT2.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  const std::vector<std::uint8_t> bytes(200, 0);
  const auto m = ecgq::read_signal(rec.header, bytes);
  for (double v : m[0]) REQUIRE(v == 0.0);
}

TEST_CASE("mV conversion is linear in the stored value") {
  const auto rec = ecgq::parse_header("T3 1 500 4\nT3.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  const std::vector<int> vals = {120, -45, 800, 3};
  std::vector<int> doubled;
  for (int v : vals) doubled.push_back(2 * v);
  const auto a = ecgq::read_signal(rec.header, raw16_payload({vals}));
  const auto b = ecgq::read_signal(rec.header, raw16_payload({doubled}));
  for (std::size_t i = 0; i < vals.size(); ++i) REQUIRE(b[0][i] == 2.0 * a[0][i]);
}

TEST_CASE("level-4 container payloads decode through both entry points") {
  std::vector<std::vector<int>> mat(12, std::vector<int>(50));
  for (std::size_t s = 0; s < 12; ++s) {
    for (std::size_t t = 0; t < 50; ++t) mat[s][t] = static_cast<int>(100 * s + t);
  }
  SECTION("name 'val' makes the container byte-compatible with 16+24") {
    const auto rec = ecgq::parse_header(twelve_lead_header("A0100", 50));
    const auto bytes = ecgq::write_mat4_int16(mat, "val");
    const auto m = ecgq::read_signal(rec.header, bytes);
    REQUIRE(m[3][7] == Catch::Approx((100.0 * 3 + 7) / 1000.0));
  }
  SECTION("longer names route through the container probe") {
    std::string h = "A0101 12 500 50\n";
    for (const char* lead : kLeads) h += "A0101.mat 16 1000(0)/mV 16 0 0 0 0 " + std::string(lead) + "\n";
    const auto rec = ecgq::parse_header(h);
    const auto bytes = ecgq::write_mat4_int16(mat, "values");
    const auto m = ecgq::read_signal(rec.header, bytes);
    REQUIRE(m[11][49] == Catch::Approx((100.0 * 11 + 49) / 1000.0));
    REQUIRE(m[0][0] == 0.0);
  }
}

TEST_CASE("inconsistent payload sizes are rejected") {
  const auto rec = ecgq::parse_header("T4 1 500 100\nT4.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  const std::vector<std::uint8_t> short_bytes(150, 0);
  REQUIRE_THROWS_AS(ecgq::read_signal(rec.header, short_bytes), ecgq::LengthMismatch);
}

TEST_CASE("digitize and read back within one quantization step") {
  const double gain = 1000.0;
  const std::size_t n = 2000;
  std::vector<double> truth(n);
  std::vector<int> adu(n);
  for (std::size_t i = 0; i < n; ++i) {
    truth[i] = 1.3 * std::sin(2.0 * M_PI * 7.0 * static_cast<double>(i) / 500.0);
    adu[i] = static_cast<int>(std::lround(truth[i] * gain));
  }
  const auto rec = ecgq::parse_header("T5 1 500 2000\nT5.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  const auto m = ecgq::read_signal(rec.header, raw16_payload({adu}));
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(std::abs(m[0][i] - truth[i]) <= 1.0 / gain + 1e-12);
  }
}

TEST_CASE("lead selection returns (II, V1) regardless of header order") {
  std::string h = "T6 3 500 4\n";
  h += "T6.dat 16 1000(0)/mV 16 0 0 0 0 v1\n";   // lower case on purpose
  h += "T6.dat 16 1000(0)/mV 16 0 0 0 0 III\n";
  h += "T6.dat 16 1000(0)/mV 16 0 0 0 0 II\n";
  const auto rec = ecgq::parse_header(h);
  const ecgq::SignalMatrix m = {{1, 1, 1, 1}, {3, 3, 3, 3}, {2, 2, 2, 2}};
  const auto two = ecgq::select_leads(m, rec.header);
  REQUIRE(two.size() == 2);
  REQUIRE(two[0][0] == 2.0);  // II first
  REQUIRE(two[1][0] == 1.0);  // V1 second
}

TEST_CASE("missing required lead raises") {
  const auto rec = ecgq::parse_header("T7 1 500 4\nT7.dat 16 1000(0)/mV 16 0 0 0 0 II\n");
  const ecgq::SignalMatrix m = {{0, 0, 0, 0}};
  REQUIRE_THROWS_AS(ecgq::select_leads(m, rec.header), ecgq::MissingLead);
}

TEST_CASE("twelve-lead fixture reduces to a 2xN matrix") {
  const auto rec = ecgq::parse_header(twelve_lead_header("A0200", 50));
  std::vector<std::vector<int>> mat(12, std::vector<int>(50, 7));
  const auto full = ecgq::read_signal(rec.header, ecgq::write_mat4_int16(mat));
  const auto two = ecgq::select_leads(full, rec.header);
  REQUIRE(two.size() == 2);
  REQUIRE(two[0].size() == 50);
}

TEST_CASE("label mapping follows the mono-label rule") {
  const auto map = ecgq::default_label_map();
  SECTION("singleton maps to its class") {
    const auto r = ecgq::map_labels({"426783006"}, map);
    REQUIRE(r.outcome == ecgq::LabelOutcome::Ok);
    REQUIRE(r.label == ecgq::ClassLabel::NSR);
  }
  SECTION("extra unmapped codes do not disturb the result") {
    const auto r = ecgq::map_labels({"59118001", "164889003", "12345"}, map);
    REQUIRE(r.outcome == ecgq::LabelOutcome::Ok);
    REQUIRE(r.label == ecgq::ClassLabel::AF);
  }
  SECTION("two mapped codes reject as multi-label") {
    const auto r = ecgq::map_labels({"164889003", "270492004"}, map);
    REQUIRE(r.outcome == ecgq::LabelOutcome::MultiLabel);
  }
  SECTION("no mapped code rejects as irrelevant") {
    REQUIRE(ecgq::map_labels({"59118001"}, map).outcome == ecgq::LabelOutcome::NoRelevantLabel);
    REQUIRE(ecgq::map_labels({}, map).outcome == ecgq::LabelOutcome::NoRelevantLabel);
  }
  SECTION("order does not matter") {
    const auto a = ecgq::map_labels({"59118001", "164890007"}, map);
    const auto b = ecgq::map_labels({"164890007", "59118001"}, map);
    REQUIRE(a.outcome == b.outcome);
    REQUIRE(a.label == b.label);
  }
  SECTION("a duplicated identical code counts once") {
    const auto r = ecgq::map_labels({"164889003", "164889003"}, map);
    REQUIRE(r.outcome == ecgq::LabelOutcome::Ok);
  }
}

TEST_CASE("label map config parses and validates") {
  const auto map = ecgq::parse_label_map(
      "# study classes\n426783006 = NSR\n164889003=AF\n164890007 = AFL\n"
      "67741000119109 = LAE\n270492004 = AVB1\n\n");
  REQUIRE(map.size() == 5);
  REQUIRE(map.at("270492004") == ecgq::ClassLabel::AVB1);
  REQUIRE_THROWS_AS(ecgq::parse_label_map("426783006 NSR\n"), ecgq::ConfigError);
  REQUIRE_THROWS_AS(ecgq::parse_label_map("426783006 = QRS\n"), ecgq::ConfigError);
}

TEST_CASE("cohort assembly applies every exclusion with counts") {
  const auto map = ecgq::default_label_map();
  std::vector<ecgq::CohortCandidate> cands;
  // Ten records: two minors, three multi-labeled, five admissible.
  cands.push_back(candidate("A0001", 15, {"426783006"}));
  cands.push_back(candidate("A0002", 8, {"164889003"}));
  cands.push_back(candidate("A0003", 40, {"426783006", "164889003"}));
  cands.push_back(candidate("A0004", 51, {"164890007", "270492004"}));
  cands.push_back(candidate("A0005", 33, {"164889003", "67741000119109"}));
  cands.push_back(candidate("A0006", 64, {"426783006"}));
  cands.push_back(candidate("A0007", 29, {"164889003"}));
  cands.push_back(candidate("A0008", 71, {"164890007"}));
  cands.push_back(candidate("A0009", 45, {"67741000119109"}));
  cands.push_back(candidate("A0010", 58, {"270492004"}));

  const auto cohort = ecgq::build_cohort(cands, {}, map, 7);
  REQUIRE(cohort.entries.size() == 5);
  const auto counts = cohort.rejection_counts();
  REQUIRE(counts.at("under_min_age") == 2);
  REQUIRE(counts.at("multi_label") == 3);
  for (const auto& e : cohort.entries) {
    REQUIRE(e.age.has_value());
    REQUIRE(*e.age >= 18);
  }
}

TEST_CASE("cohort rejects unknown age unless told otherwise") {
  const auto map = ecgq::default_label_map();
  std::vector<ecgq::CohortCandidate> cands;
  cands.push_back(candidate("A0001", std::nullopt, {"426783006"}));
  cands.push_back(candidate("A0002", 40, {"426783006"}));
  const auto strict = ecgq::build_cohort(cands, {}, map, 7);
  REQUIRE(strict.entries.size() == 1);
  REQUIRE(strict.rejection_counts().at("unknown_age") == 1);
  ecgq::CohortCriteria keep;
  keep.keep_unknown_age = true;
  const auto lax = ecgq::build_cohort(cands, keep, map, 7);
  REQUIRE(lax.entries.size() == 2);
}

TEST_CASE("records missing a required lead are excluded") {
  const auto map = ecgq::default_label_map();
  std::vector<ecgq::CohortCandidate> cands;
  cands.push_back(candidate("A0001", 40, {"426783006"}, {"II", "III"}));
  cands.push_back(candidate("A0002", 40, {"426783006"}));
  const auto cohort = ecgq::build_cohort(cands, {}, map, 7);
  REQUIRE(cohort.entries.size() == 1);
  REQUIRE(cohort.rejection_counts().at("missing_lead") == 1);
}

TEST_CASE("empty input cannot form a cohort") {
  REQUIRE_THROWS_AS(ecgq::build_cohort({}, {}, ecgq::default_label_map(), 7),
                    ecgq::EmptyCohort);
}

TEST_CASE("split is stratified, patient-disjoint, and seed-stable") {
  const auto map = ecgq::default_label_map();
  const std::vector<std::string> codes = {"426783006", "164889003", "164890007",
                                          "67741000119109", "270492004"};
  std::vector<ecgq::CohortCandidate> cands;
  for (int cls = 0; cls < 5; ++cls) {
    for (int i = 0; i < 10; ++i) {
      char id[16];
      std::snprintf(id, sizeof id, "R%d%02d", cls, i);
      cands.push_back(candidate(id, 30 + i, {codes[static_cast<std::size_t>(cls)]}));
    }
  }
  const auto a = ecgq::build_cohort(cands, {}, map, 1234);
  const auto b = ecgq::build_cohort(cands, {}, map, 1234);

  std::map<int, std::pair<int, int>> per_class;  // label -> (train, test)
  std::set<std::string> train_ids, test_ids;
  for (const auto& e : a.entries) {
    auto& [tr, te] = per_class[static_cast<int>(e.label)];
    if (e.split == ecgq::Split::Train) {
      ++tr;
      train_ids.insert(e.record_id);
    } else {
      ++te;
      test_ids.insert(e.record_id);
    }
  }
  for (const auto& [cls, tt] : per_class) {
    REQUIRE(tt.first == 6);  // 60% of 10
    REQUIRE(tt.second == 4);
  }
  for (const auto& id : train_ids) REQUIRE_FALSE(test_ids.contains(id));

  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    REQUIRE(a.entries[i].record_id == b.entries[i].record_id);
    REQUIRE(a.entries[i].split == b.entries[i].split);
  }
}

TEST_CASE("tiny classes always keep a training member") {
  const auto map = ecgq::default_label_map();
  std::vector<ecgq::CohortCandidate> cands;
  cands.push_back(candidate("A0001", 40, {"426783006"}));
  const auto cohort = ecgq::build_cohort(cands, {}, map, 7);
  REQUIRE(cohort.entries.size() == 1);
  REQUIRE(cohort.entries[0].split == ecgq::Split::Train);
}

TEST_CASE("manifest and rejection CSVs are exact") {
  const auto map = ecgq::default_label_map();
  std::vector<ecgq::CohortCandidate> cands;
  cands.push_back(candidate("A0001", 40, {"426783006"}));
  cands.push_back(candidate("HR999", 12, {"164889003"}));
  auto c2 = candidate("E0500", std::nullopt, {"164889003"});
  ecgq::CohortCriteria keep;
  keep.keep_unknown_age = true;
  cands.push_back(c2);
  const auto cohort = ecgq::build_cohort(cands, keep, map, 7);
  REQUIRE(ecgq::cohort_manifest_csv(cohort) ==
          "record_id,source,age,sex,label_int,split\n"
          "A0001,CPSC,40,U,0,train\n"
          "E0500,G12EC,NaN,U,1,train\n");
  REQUIRE(ecgq::cohort_rejections_csv(cohort) ==
          "record_id,reason\n"
          "HR999,under_min_age\n");
}

TEST_CASE("record prefixes map to source archives") {
  REQUIRE(ecgq::source_from_record_id("A0001") == "CPSC");
  REQUIRE(ecgq::source_from_record_id("Q0001") == "CPSC-Extra");
  REQUIRE(ecgq::source_from_record_id("E0001") == "G12EC");
  REQUIRE(ecgq::source_from_record_id("S0001") == "PTB");
  REQUIRE(ecgq::source_from_record_id("HR0001") == "PTB-XL");
  REQUIRE(ecgq::source_from_record_id("JS0001") == "Chapman-Ningbo");
  REQUIRE(ecgq::source_from_record_id("I0001") == "INCART");
  REQUIRE(ecgq::source_from_record_id("X0001") == "unknown");
}
