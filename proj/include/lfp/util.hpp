#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lfp {

inline constexpr const char* kToolVersion = "0.1.0";

// Error taxonomy used across the toolkit. Everything user-facing derives from
// Error so the CLI can map failures onto exit codes in one place.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input values (out-of-range config, non-routable target, short engine id).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed bytes or text. Carries the offset (byte or line) where decoding stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  explicit ParseError(const std::string& msg) : Error(msg), offset_(0) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised when an operation needs a privilege the process does not have
// (e.g. raw sockets). The message names the missing capability.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// FNV-1a, used for manifests and for deriving per-entity seeds. Not a
// cryptographic digest; collisions are acceptable for provenance records.
constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

constexpr std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= kFnvPrime;
  }
  return h;
}

std::string to_hex(std::uint64_t v);

// splitmix64-based generator. We do not use <random> distributions anywhere:
// their output is implementation-defined and every artifact output must be
// byte-identical for a given seed regardless of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is < 2^-40 for every n used here.
  std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bool(double p) { return next_double() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary file in the same directory plus rename, so readers
// never observe a half-written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace lfp
