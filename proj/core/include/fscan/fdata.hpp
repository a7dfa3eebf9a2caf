#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fscan {

class SiteGrid;

/// n curves sampled on one strictly increasing time grid. Row i is the curve
/// observed at site ids()[i]. Immutable after construction.
class FunctionalDataset {
 public:
  /// `values` is row-major n x T. Throws ValidationError if the grid has fewer
  /// than two points or is not strictly increasing, if a value is not finite,
  /// or if the sizes disagree.
  FunctionalDataset(std::vector<std::string> ids, std::vector<double> time_grid,
                    std::vector<double> values);

  std::size_t size() const { return ids_.size(); }
  std::size_t num_times() const { return time_grid_.size(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * num_times(), num_times()};
  }
  std::span<const double> values() const { return values_; }
  std::span<const double> time_grid() const { return time_grid_; }
  /// Trapezoid weights on time_grid(): sum_k weights[k] f_k == integral of
  /// the piecewise-linear interpolant of f.
  std::span<const double> quadrature_weights() const { return weights_; }
  const std::vector<std::string>& ids() const { return ids_; }

  /// Dataset whose row s is row order[s] of this one, with ids kept in place.
  /// This is a random labelling when `order` is a permutation.
  FunctionalDataset relabelled(std::span<const std::size_t> order) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> time_grid_;
  std::vector<double> weights_;
  std::vector<double> values_;
};

/// Reorders rows to follow the grid's site order. Throws ValidationError when
/// the id sets differ.
FunctionalDataset align_to_sites(const FunctionalDataset& ds,
                                 const SiteGrid& grid);

std::vector<double> trapezoid_weights(std::span<const double> time_grid);

/// Trapezoid-rule approximation of the integral of f*g over the grid.
double l2_inner(std::span<const double> f, std::span<const double> g,
                std::span<const double> time_grid);
double l2_norm_sq(std::span<const double> f, std::span<const double> time_grid);

struct GroupSummary {
  std::vector<double> mean_curve;
  std::size_t member_count = 0;
};

GroupSummary group_mean(const FunctionalDataset& ds,
                        std::span<const std::size_t> members);

/// Sorted indices of 0..n-1 not in `members` (which must be sorted).
std::vector<std::size_t> complement(std::span<const std::size_t> members,
                                    std::size_t n);

/// Two-group pooled variance per grid time, w against its complement, with
/// divisor n - 2.
std::vector<double> pooled_variance_at_t(const FunctionalDataset& ds,
                                         std::span<const std::size_t> w);

std::vector<double> equally_spaced_grid(double start, double stop,
                                        std::size_t points);

}  // namespace fscan
