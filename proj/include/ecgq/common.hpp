#pragma once

// Shared plumbing: error types, deterministic RNG draws, a stable 64-bit
// hash, and small text/file helpers used across the library.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecgq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ingestion
struct MalformedHeader : Error { using Error::Error; };
struct UnsupportedFormatCode : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct UnsupportedContainer : Error { using Error::Error; };
struct MissingLead : Error { using Error::Error; };
struct EmptyCohort : Error { using Error::Error; };
// Signal pipeline
struct SignalTooShort : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct UnsupportedRate : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct TooShort : Error { using Error::Error; };
// Beat handling
struct NoBeats : Error { using Error::Error; };
struct TooFewPeaks : Error { using Error::Error; };
struct EmptyBeat : Error { using Error::Error; };
struct EmptySplit : Error { using Error::Error; };
// Metrics / reporting
struct EmptyMatrix : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
// Synthesis / configuration
struct InvalidTemplate : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic randomness. std::mt19937_64 is fully specified by the
// standard; the draw helpers below avoid std::*_distribution, whose output
// is implementation-defined, so seeded runs reproduce across platforms.

using Rng = std::mt19937_64;

inline std::uint64_t draw_u64(Rng& rng) { return rng(); }

// Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
inline std::size_t draw_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double draw_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * draw_unit(rng);
}

// Standard normal via Box-Muller; one value per call.
inline double draw_normal(Rng& rng) {
  double u1 = draw_unit(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = draw_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[draw_index(rng, i)]);
  }
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit. Used wherever a hash must be stable across runs, platforms,
// and standard-library versions (state keys, config fingerprints).

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  return fnv1a64(s.data(), s.size());
}

// ---------------------------------------------------------------------------
// Text helpers

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Shortest round-trip decimal form; stable across platforms.
inline std::string fmt_double(double v) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const char* what) {
  const std::string t = trim(s);
  double v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(std::string("not a number for ") + what + ": '" + t + "'");
  }
  return v;
}

inline long parse_long(std::string_view s, const char* what) {
  const std::string t = trim(s);
  long v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(std::string("not an integer for ") + what + ": '" + t + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// File helpers

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  return data;
}

// Write via temp file + rename so readers never observe partial output.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Statistics used in several modules; population convention throughout.
inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace ecgq
