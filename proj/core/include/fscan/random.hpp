#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <vector>

namespace fscan {

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for a position in a tree of streams, e.g.
/// derive_seed(master, {replicate, site}). Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

// Variates are produced by explicit transforms of the 64-bit engine output so
// that a seed yields the same stream with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  double normal();
  /// Chi-square with 4 degrees of freedom.
  double chi_square4();
  /// Student t with 4 degrees of freedom.
  double student4();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

}  // namespace fscan
