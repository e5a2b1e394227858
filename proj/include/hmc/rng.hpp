#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hmc {

/// Explicitly seeded generator owned by a single chain.
///
/// Streams are derived from a master seed plus a list of indices through
/// std::seed_seq, so every (master, i, j, ...) tuple maps to its own
/// reproducible stream regardless of the order in which chains are run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng for_stream(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

  double normal() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Seed splitting rule: the first 64 bits produced by
/// std::seed_seq{lo32(master), hi32(master), lo32(i0), hi32(i0), ...}.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

}  // namespace hmc
