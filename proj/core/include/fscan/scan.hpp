#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fscan/fdata.hpp"
#include "fscan/geometry.hpp"
#include "fscan/indices.hpp"

namespace fscan {

enum class OverlapPolicy {
  none,     // secondaries share no site with any reported cluster
  partial,  // no cluster centre lies inside another reported cluster
};

OverlapPolicy parse_overlap(std::string_view name);
std::string_view to_string(OverlapPolicy p);

/// Index values of every candidate under one labelling of the sites.
struct WindowValues {
  std::vector<double> values;
  /// DFFSS windows whose value is the perfect-separation sentinel.
  std::vector<std::uint8_t> perfect_separation;
  /// PFSS only: some window had zero within-group dispersion. Its value is
  /// reported as 0.
  bool degenerate = false;
  std::size_t argmax = 0;
};

/// Evaluates one index on a fixed candidate set for many labellings.
///
/// Windows sharing a centre are nested discs, so they are visited in order of
/// size and each one costs O(T) on top of a running sum of the rows it adds.
/// PFSS and DFFSS work on curves centred by the grand mean (both indices are
/// location invariant and the grand mean does not depend on labels); NPFSS
/// works on the sign matrix, which is built once because a labelling only
/// changes which rows a window selects.
class WindowScanner {
 public:
  WindowScanner(const FunctionalDataset& ds,
                std::span<const CandidateCluster> candidates, Method method);

  Method method() const { return method_; }
  std::size_t num_candidates() const { return num_candidates_; }

  /// labelling[s] is the dataset row observed at site s; an empty span means
  /// the identity.
  WindowValues evaluate(std::span<const std::size_t> labelling = {}) const;

 private:
  struct Step {
    std::size_t candidate;
    std::size_t added_begin;
    std::size_t added_end;
    bool restart;
  };

  double score(std::span<const double> acc, std::size_t inside,
               std::uint8_t& separated, bool& degenerate) const;

  Method method_;
  std::size_t n_;
  std::size_t t_;
  std::size_t num_candidates_;
  std::vector<Step> steps_;
  std::vector<std::size_t> added_;
  std::vector<std::size_t> rank_;  // tie-break order of each candidate
  std::vector<double> rows_;       // centred curves or sign-matrix rows
  std::vector<double> weights_;
  std::vector<double> column_ss_;  // DFFSS: sum_i Y_i(t)^2
  double total_ss_ = 0.0;          // PFSS: sum_i ||Y_i||^2
  double var_eps_ = 0.0;
};

struct MlcDetection {
  std::size_t candidate_index = 0;
  CandidateCluster window;
  double lambda = 0.0;
  bool perfect_separation = false;
};

/// Argmax of the index over candidates; ties go to the window that comes
/// first under window_precedes. Throws DegenerateDataError for PFSS on data
/// with zero within-group dispersion.
MlcDetection detect_mlc(const FunctionalDataset& ds,
                        std::span<const CandidateCluster> candidates,
                        Method method);

/// (1 + #{null >= observed}) / (M + 1).
double permutation_p_value(double observed, std::span<const double> null_maxima);

struct SecondaryCluster {
  std::size_t candidate_index = 0;
  CandidateCluster cluster;
  double value = 0.0;
  double p_value = 1.0;
};

struct SecondaryOptions {
  OverlapPolicy overlap = OverlapPolicy::none;
  double level = 0.05;
  bool include_nonsignificant = false;
};

/// Greedy ranking of windows compatible with the MLC and with each other,
/// by decreasing index value. p-values use the permutation distribution of
/// the maximum.
std::vector<SecondaryCluster> secondary_clusters(
    std::span<const CandidateCluster> candidates, std::span<const double> values,
    std::size_t mlc_index, std::span<const double> null_maxima,
    const SecondaryOptions& options = {});

struct ScanOptions {
  std::size_t permutations = 999;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;
  SecondaryOptions secondary;
};

struct ScanTimings {
  double prepare_seconds = 0.0;
  double observed_seconds = 0.0;
  double permutation_seconds = 0.0;
  double secondary_seconds = 0.0;
};

struct ScanResult {
  Method method = Method::pfss;
  std::size_t mlc_index = 0;
  CandidateCluster mlc;
  double lambda = 0.0;
  double p_value = 1.0;
  std::optional<double> argmax_time;  // DFFSS only
  bool perfect_separation = false;
  std::size_t perfect_separation_windows = 0;
  std::vector<SecondaryCluster> secondaries;
  std::size_t permutations = 0;
  std::uint64_t master_seed = 0;
  std::size_t degenerate_permutations = 0;
  std::vector<double> null_maxima;
  ScanTimings timings;
};

/// Seed of the m-th random labelling (m = 1..M).
std::uint64_t permutation_seed(std::uint64_t master_seed, std::size_t m);

/// Observed scan plus M random labellings. Permutation m depends only on
/// (master_seed, m), so results do not depend on options.threads.
ScanResult monte_carlo(const FunctionalDataset& ds,
                       std::span<const CandidateCluster> candidates,
                       Method method, const ScanOptions& options);

}  // namespace fscan
