#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fscan/fdata.hpp"
#include "fscan/geometry.hpp"

namespace fscan {

enum class Method { pfss, dffss, npfss };

std::string_view to_string(Method m);
/// Accepts "pfss", "dffss", "npfss" (case-sensitive).
Method parse_method(std::string_view name);

/// Pointwise DFFSS value used when the pooled variance vanishes but the group
/// means differ.
inline constexpr double kPerfectSeparation = std::numeric_limits<double>::max();

/// Relative threshold for "zero" variance or dispersion, scaled by the
/// squared magnitude of the centred data.
inline constexpr double kRelativeZero = 1e-12;

struct IndexValue {
  Method method = Method::pfss;
  double value = 0.0;
  CandidateCluster window;
  std::optional<double> argmax_time;  // DFFSS only
  bool perfect_separation = false;    // DFFSS only
};

/// Functional ANOVA F statistic comparing the mean curve inside w with the
/// mean curve outside. Throws DegenerateDataError when the within-group
/// dispersion is zero.
IndexValue pfss_index(const FunctionalDataset& ds, const CandidateCluster& w);

/// Supremum over grid times of the studentised two-sample mean difference.
IndexValue dffss_index(const FunctionalDataset& ds, const CandidateCluster& w);

/// Row i holds R_i = sum_j sign(X_j - X_i) where sign(h) = h / ||h||_2 and
/// sign(0) = 0. Rows are label-free: a relabelling of sites only changes which
/// rows a window selects.
class SignMatrix {
 public:
  std::size_t size() const { return n_; }
  std::size_t num_times() const { return weights_.size(); }
  std::span<const double> row(std::size_t i) const {
    return {rows_.data() + i * num_times(), num_times()};
  }
  std::span<const double> quadrature_weights() const { return weights_; }
  /// ||X_j - X_i||_2 as used during construction.
  double pair_norm(std::size_t i, std::size_t j) const {
    return norm_cache_[i * n_ + j];
  }

 private:
  friend SignMatrix build_sign_matrix(const FunctionalDataset& ds);

  std::size_t n_ = 0;
  std::vector<double> rows_;
  std::vector<double> weights_;
  std::vector<double> norm_cache_;
};

SignMatrix build_sign_matrix(const FunctionalDataset& ds);

/// U(w) = || sum_{i in w} R_i ||_2 / sqrt(|w| |w^c| n). Summing full rows is
/// equivalent to the double sum over (w, w^c) pairs because pairs inside w
/// cancel.
IndexValue npfss_index(const SignMatrix& sm, const CandidateCluster& w);

/// The same statistic by the direct double sum over i in w, j in w^c,
/// recomputing every sign. O(|w| |w^c| T); kept for benchmarking.
double npfss_index_naive(const FunctionalDataset& ds, const CandidateCluster& w);

}  // namespace fscan
