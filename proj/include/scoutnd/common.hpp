#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scoutnd {

using Vec = std::vector<double>;

// Base class for all library errors so callers can catch one type at the CLI
// boundary and map it to an exit code.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

class ValueError : public Error {
 public:
  explicit ValueError(const std::string& msg) : Error(msg) {}
};

// Evaluation failure with the fidelity level and design point attached.
class EvalError : public Error {
 public:
  EvalError(int level, Vec x, const std::string& msg)
      : Error(msg), level_(level), x_(std::move(x)) {}
  int level() const { return level_; }
  const Vec& x() const { return x_; }

 private:
  int level_;
  Vec x_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, bool* ok = nullptr) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  bool good = res.ec == std::errc() && res.ptr == s.data() + s.size();
  if (ok) {
    *ok = good;
    return good ? v : 0.0;
  }
  if (!good) throw ValueError("not a number: '" + s + "'");
  return v;
}

// SplitMix64 finalizer; the workhorse for counter-based streams and seed
// derivation. Stateless: output depends only on the input word.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ mix64(a));
  h = mix64(h ^ mix64(b ^ 0xbb67ae8584caa73bULL));
  h = mix64(h ^ mix64(c ^ 0x3c6ef372fe94f82bULL));
  return h;
}

inline double u64_to_unit(std::uint64_t z) {
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace scoutnd
