#include "fscan/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace fscan {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) {
    h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  }
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = uniform_open();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

double Rng::chi_square4() {
  // Gamma(2, 2): sum of two Exp(mean 2) variates.
  return -2.0 * std::log(uniform_open() * uniform_open());
}

double Rng::student4() {
  const double z = normal();
  return z / std::sqrt(chi_square4() / 4.0);
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace fscan
