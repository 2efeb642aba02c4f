#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pyfix {

/// Hex-encoded SHA-256 of `data`.
std::string sha256_hex(const std::string& data);

bool is_valid_utf8(const std::string& data);

/// Deterministic seeded RNG used for every randomized decision in the
/// pipeline (splits, random shot draws). Hand-rolled so results do not
/// depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), state_(seed) {}

  uint64_t next_u64();

  /// Uniform value in [0, bound). bound must be > 0.
  uint64_t below(uint64_t bound);

  /// Real in [0, 1).
  double next_double();

  /// Derive an independent stream for a named sub-task.
  Rng fork(uint64_t salt) const;

  template <typename T>
  void shuffle(std::vector<T>& items) {
    if (items.size() < 2) return;
    for (size_t i = items.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(below(i + 1));
      std::swap(items[i], items[j]);
    }
  }

 private:
  uint64_t seed_;
  uint64_t state_;
};

/// Write `content` to `path` atomically (temp file in the same directory,
/// then rename). Throws IoError on failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Run `fn(i)` for i in [0, count) with at most `parallelism` worker
/// threads. parallelism <= 1 runs inline. Exceptions from workers are
/// rethrown (first one wins) after all workers finish.
void parallel_for(size_t count, int parallelism, const std::function<void(size_t)>& fn);

/// Shortest decimal representation that round-trips the double.
std::string format_double(double value);

std::string trim(const std::string& s);

/// Mean and standard error (sample stddev / sqrt(n)) of `values`.
/// stderr is absent for fewer than two values.
struct MeanStderr {
  double mean = 0.0;
  std::optional<double> stderr_;
};
MeanStderr mean_stderr(const std::vector<double>& values);

}  // namespace pyfix
