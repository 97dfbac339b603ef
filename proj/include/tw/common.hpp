#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ProviderError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

uint64_t fnv1a64(std::string_view text);
uint64_t splitmix64(uint64_t x);

// Mixes a base seed with two stream coordinates into an independent stream
// seed. Same inputs give the same stream on every platform.
uint64_t derive_seed(uint64_t base, uint64_t a, uint64_t b);

std::string hex64(uint64_t value);

// Single source of randomness. Every stochastic step takes one of these so a
// run seed pins the whole run.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_unit();

  // Uniform in [0, n); n must be positive. Rejection sampled so the
  // distribution is exact.
  std::size_t index(std::size_t n);

  bool chance(double p) { return next_unit() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& pool) {
    return pool[index(pool.size())];
  }

  // k distinct indices out of [0, n), in random order. Throws ConfigError
  // when k > n.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool contains(std::string_view text, std::string_view needle);
std::string lowercase(std::string_view text);

// Counts UTF-8 codepoints; continuation bytes do not count.
std::size_t utf8_length(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

// Runs fn(0..count-1) on up to `workers` threads. The first exception thrown
// by any item is rethrown after all threads join.
void bounded_parallel_for(std::size_t count, int workers,
                          const std::function<void(std::size_t)>& fn);

// Value of the line starting with "<label>:" (trimmed). Empty when the label
// is missing; `found` reports presence so an empty value is distinguishable.
std::string extract_labeled_line(std::string_view text, std::string_view label,
                                 bool* found = nullptr);

// Text between the line starting with `marker` and the next line starting
// with any of `next_markers` (or end of text). The marker's own remainder is
// included.
std::string extract_section(std::string_view text, std::string_view marker,
                            const std::vector<std::string_view>& next_markers);

}  // namespace tw
