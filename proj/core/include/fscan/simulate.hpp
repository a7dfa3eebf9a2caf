#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fscan/fdata.hpp"
#include "fscan/geometry.hpp"
#include "fscan/indices.hpp"
#include "fscan/random.hpp"

namespace fscan {

/// Law of the basis coefficients v_{i,j,k}, each scaled to unit variance.
enum class Distribution {
  gaussian,  // N(0, 1)
  student4,  // t(4) / sqrt(2)
  chisq4,    // (chi2(4) - 4) / (2 sqrt(2))
};

enum class ShiftFamily {
  delta1,  // alpha t
  delta2,  // alpha t (1 - t)
  delta3,  // alpha exp(-100 (t - 0.5)^2) / 3
};

std::string_view to_string(Distribution d);
std::string_view to_string(ShiftFamily s);
Distribution parse_distribution(std::string_view name);
ShiftFamily parse_shift(std::string_view name);

/// Psi_1 = 1, Psi_k = sqrt(2) sin(k pi t) for even k,
/// sqrt(2) cos((k - 1) pi t) for odd k > 1. k in 1..7.
double basis_psi(int k, double t);

double shift_value(ShiftFamily family, double alpha, double t);

/// sin(2 pi t^2)^5, the common mean curve of the generator.
double simulation_mean_curve(double t);

/// Analytic variance of the generator noise at t:
/// 2 sum_k 1.5 * 0.2^k Psi_k(t)^2.
double noise_variance(double t);

/// One unit-variance draw from `dist`.
double draw_coefficient(Rng& rng, Distribution dist);

/// Five intensities from 0 to the strongest shift studied for each family.
std::vector<double> default_alpha_grid(ShiftFamily family);

struct SimulationConfig {
  Distribution distribution = Distribution::gaussian;
  ShiftFamily shift = ShiftFamily::delta1;
  double alpha = 0.0;
  SiteGrid sites;
  std::vector<std::size_t> true_cluster;
  std::vector<double> time_grid = equally_spaced_grid(0.0, 1.0, 101);
  Method method = Method::dffss;
  std::size_t replicates = 100;
  std::size_t permutations = 199;
  std::uint64_t master_seed = 1;
  double level = 0.05;
  double max_fraction = 0.5;
  std::size_t threads = 1;
};

/// Checks the invariants (alpha >= 0, non-empty in-range cluster, at least
/// one replicate and permutation, level in (0, 1)). Throws ValidationError.
void validate(const SimulationConfig& cfg);

/// X_i(t) = sin(2 pi t^2)^5 + Delta(t) 1{i in cluster} + eps_i(t) with
/// eps_i(t) = sum_k sqrt(1.5 * 0.2^k) (v_{i,1,k} - v_{i,2,k}) Psi_k(t).
/// Coefficients of site i come from a stream seeded by
/// (master_seed, replicate, i), so the dataset does not depend on the order
/// in which sites or replicates are generated.
FunctionalDataset generate_dataset(const SimulationConfig& cfg,
                                   std::size_t replicate_index);

struct DetectionScores {
  double tpr = 0.0;
  double fpr = 0.0;
  double ppv = 0.0;
  double f_measure = 0.0;
};

/// Scores a detected site set against the true cluster among n sites.
DetectionScores score_detection(std::span<const std::size_t> detected,
                                std::span<const std::size_t> truth,
                                std::size_t n);

struct StudyMetrics {
  double power = 0.0;
  /// Averages over rejecting replicates; NaN when none rejected.
  double tpr = 0.0;
  double fpr = 0.0;
  double f_measure = 0.0;
  std::size_t rejected_count = 0;
  std::size_t replicates = 0;
};

/// Generates cfg.replicates datasets, scans each with cfg.permutations random
/// labellings and rejects when p < cfg.level.
StudyMetrics run_power_study(const SimulationConfig& cfg);

}  // namespace fscan
