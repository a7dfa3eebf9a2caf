#include "fscan/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fscan/error.hpp"
#include "fscan/parallel.hpp"
#include "fscan/scan.hpp"

namespace fscan {

namespace {

constexpr int kBasisSize = 7;

// Seed-tree domains, so dataset and permutation streams never coincide.
constexpr std::uint64_t kDataDomain = 0;
constexpr std::uint64_t kLabellingDomain = 1;

}  // namespace

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::gaussian:
      return "gaussian";
    case Distribution::student4:
      return "student4";
    case Distribution::chisq4:
      return "chisq4";
  }
  return "unknown";
}

std::string_view to_string(ShiftFamily s) {
  switch (s) {
    case ShiftFamily::delta1:
      return "delta1";
    case ShiftFamily::delta2:
      return "delta2";
    case ShiftFamily::delta3:
      return "delta3";
  }
  return "unknown";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "gaussian") return Distribution::gaussian;
  if (name == "student4") return Distribution::student4;
  if (name == "chisq4") return Distribution::chisq4;
  throw ValidationError("unknown distribution '" + std::string(name) + "'");
}

ShiftFamily parse_shift(std::string_view name) {
  if (name == "delta1") return ShiftFamily::delta1;
  if (name == "delta2") return ShiftFamily::delta2;
  if (name == "delta3") return ShiftFamily::delta3;
  throw ValidationError("unknown shift family '" + std::string(name) + "'");
}

double basis_psi(int k, double t) {
  if (k < 1 || k > kBasisSize) {
    throw ValidationError("basis index " + std::to_string(k) +
                          " outside 1..7");
  }
  if (k == 1) return 1.0;
  if (k % 2 == 0) return std::numbers::sqrt2 * std::sin(k * std::numbers::pi * t);
  return std::numbers::sqrt2 * std::cos((k - 1) * std::numbers::pi * t);
}

double shift_value(ShiftFamily family, double alpha, double t) {
  switch (family) {
    case ShiftFamily::delta1:
      return alpha * t;
    case ShiftFamily::delta2:
      return alpha * t * (1.0 - t);
    case ShiftFamily::delta3:
      return alpha * std::exp(-100.0 * (t - 0.5) * (t - 0.5)) / 3.0;
  }
  throw ValidationError("unknown shift family");
}

double simulation_mean_curve(double t) {
  return std::pow(std::sin(2.0 * std::numbers::pi * t * t), 5);
}

double noise_variance(double t) {
  double v = 0.0;
  for (int k = 1; k <= kBasisSize; ++k) {
    const double psi = basis_psi(k, t);
    v += 2.0 * 1.5 * std::pow(0.2, k) * psi * psi;
  }
  return v;
}

double draw_coefficient(Rng& rng, Distribution dist) {
  switch (dist) {
    case Distribution::gaussian:
      return rng.normal();
    case Distribution::student4:
      return rng.student4() / std::numbers::sqrt2;
    case Distribution::chisq4:
      return (rng.chi_square4() - 4.0) / (2.0 * std::numbers::sqrt2);
  }
  return 0.0;
}

std::vector<double> default_alpha_grid(ShiftFamily family) {
  switch (family) {
    case ShiftFamily::delta1:
      return {0.0, 0.75, 1.5, 2.25, 3.0};
    case ShiftFamily::delta2:
      return {0.0, 2.0, 4.0, 6.0, 8.0};
    case ShiftFamily::delta3:
      return {0.0, 2.5, 5.0, 7.5, 10.0};
  }
  return {};
}

void validate(const SimulationConfig& cfg) {
  const std::size_t n = cfg.sites.size();
  if (n < 3) throw ValidationError("simulation needs at least 3 sites");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
    throw ValidationError("alpha must be finite and >= 0");
  }
  if (cfg.true_cluster.empty()) {
    throw ValidationError("true cluster must not be empty");
  }
  std::vector<std::size_t> sorted = cfg.true_cluster;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("true cluster lists a site twice");
  }
  if (sorted.back() >= n || sorted.size() >= n) {
    throw ValidationError("true cluster is out of the site range");
  }
  if (cfg.replicates < 1) throw ValidationError("replicates must be >= 1");
  if (cfg.permutations < 1) throw ValidationError("permutations must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw ValidationError("level must be in (0, 1)");
  }
  trapezoid_weights(cfg.time_grid);
  if (cfg.time_grid.front() < 0.0 || cfg.time_grid.back() > 1.0) {
    throw ValidationError("simulation time grid must lie in [0, 1]");
  }
}

FunctionalDataset generate_dataset(const SimulationConfig& cfg,
                                   std::size_t replicate_index) {
  const std::size_t n = cfg.sites.size();
  const auto& grid = cfg.time_grid;
  const std::size_t t = grid.size();

  // Per grid time: sqrt(1.5 * 0.2^k) Psi_k(t), the mean curve and the shift.
  std::vector<double> basis(kBasisSize * t);
  std::vector<double> base(t);
  std::vector<double> shift(t);
  for (std::size_t m = 0; m < t; ++m) {
    for (int k = 1; k <= kBasisSize; ++k) {
      basis[static_cast<std::size_t>(k - 1) * t + m] =
          std::sqrt(1.5 * std::pow(0.2, k)) * basis_psi(k, grid[m]);
    }
    base[m] = simulation_mean_curve(grid[m]);
    shift[m] = shift_value(cfg.shift, cfg.alpha, grid[m]);
  }

  std::vector<char> in_cluster(n, 0);
  for (std::size_t i : cfg.true_cluster) in_cluster.at(i) = 1;

  std::vector<std::string> ids;
  ids.reserve(n);
  std::vector<double> values(n * t);
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(cfg.sites.site(i).id);
    Rng rng(derive_seed(cfg.master_seed, {kDataDomain, replicate_index, i}));
    std::array<std::array<double, kBasisSize>, 2> v{};
    for (auto& draws : v) {
      for (double& x : draws) x = draw_coefficient(rng, cfg.distribution);
    }
    double* row = values.data() + i * t;
    for (std::size_t m = 0; m < t; ++m) {
      double eps = 0.0;
      for (std::size_t k = 0; k < kBasisSize; ++k) {
        eps += (v[0][k] - v[1][k]) * basis[k * t + m];
      }
      row[m] = base[m] + (in_cluster[i] ? shift[m] : 0.0) + eps;
    }
  }
  return {std::move(ids), grid, std::move(values)};
}

DetectionScores score_detection(std::span<const std::size_t> detected,
                                std::span<const std::size_t> truth,
                                std::size_t n) {
  std::vector<std::size_t> d(detected.begin(), detected.end());
  std::vector<std::size_t> w(truth.begin(), truth.end());
  std::sort(d.begin(), d.end());
  std::sort(w.begin(), w.end());
  if (w.empty() || w.size() >= n) {
    throw ValidationError("true cluster must hold between 1 and n-1 sites");
  }
  std::vector<std::size_t> hit;
  std::set_intersection(d.begin(), d.end(), w.begin(), w.end(),
                        std::back_inserter(hit));
  const double tp = static_cast<double>(hit.size());
  const double fp = static_cast<double>(d.size() - hit.size());

  DetectionScores s;
  s.tpr = tp / static_cast<double>(w.size());
  s.fpr = fp / static_cast<double>(n - w.size());
  s.ppv = d.empty() ? 0.0 : tp / static_cast<double>(d.size());
  s.f_measure = (s.ppv + s.tpr) == 0.0
                    ? 0.0
                    : 2.0 * s.ppv * s.tpr / (s.ppv + s.tpr);
  return s;
}

StudyMetrics run_power_study(const SimulationConfig& cfg) {
  validate(cfg);
  const auto candidates = enumerate_candidates(cfg.sites, cfg.max_fraction);
  const std::size_t reps = cfg.replicates;

  std::vector<std::uint8_t> rejected(reps, 0);
  std::vector<DetectionScores> scores(reps);
  parallel_for(reps, cfg.threads, [&](std::size_t r) {
    const FunctionalDataset ds = generate_dataset(cfg, r);
    ScanOptions options;
    options.permutations = cfg.permutations;
    options.master_seed = derive_seed(cfg.master_seed, {kLabellingDomain, r});
    options.threads = 1;
    options.secondary.level = cfg.level;
    const ScanResult res = monte_carlo(ds, candidates, cfg.method, options);
    if (res.p_value < cfg.level) {
      rejected[r] = 1;
      scores[r] = score_detection(res.mlc.members, cfg.true_cluster,
                                  cfg.sites.size());
    }
  });

  StudyMetrics out;
  out.replicates = reps;
  double tpr = 0.0;
  double fpr = 0.0;
  double f = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!rejected[r]) continue;
    ++out.rejected_count;
    tpr += scores[r].tpr;
    fpr += scores[r].fpr;
    f += scores[r].f_measure;
  }
  out.power = static_cast<double>(out.rejected_count) / static_cast<double>(reps);
  if (out.rejected_count == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.tpr = out.fpr = out.f_measure = nan;
  } else {
    const auto k = static_cast<double>(out.rejected_count);
    out.tpr = tpr / k;
    out.fpr = fpr / k;
    out.f_measure = f / k;
  }
  return out;
}

}  // namespace fscan
