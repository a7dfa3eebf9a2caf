#include "fscan/fdata.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "fscan/error.hpp"
#include "fscan/geometry.hpp"

namespace fscan {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) {
    throw ValidationError("time grid needs at least 2 points");
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k])) {
      throw ValidationError("time grid value " + std::to_string(k + 1) +
                            " is not finite");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw ValidationError("time grid is not strictly increasing at point " +
                            std::to_string(k + 1));
    }
  }
}

void check_members(std::span<const std::size_t> members, std::size_t n) {
  if (members.empty()) throw ValidationError("empty member set");
  for (std::size_t i : members) {
    if (i >= n) {
      throw ValidationError("member index " + std::to_string(i) +
                            " out of range for " + std::to_string(n) + " sites");
    }
  }
}

}  // namespace

FunctionalDataset::FunctionalDataset(std::vector<std::string> ids,
                                     std::vector<double> time_grid,
                                     std::vector<double> values)
    : ids_(std::move(ids)),
      time_grid_(std::move(time_grid)),
      values_(std::move(values)) {
  check_grid(time_grid_);
  if (values_.size() != ids_.size() * time_grid_.size()) {
    throw ValidationError("dataset has " + std::to_string(values_.size()) +
                          " values, expected " +
                          std::to_string(ids_.size()) + " x " +
                          std::to_string(time_grid_.size()));
  }
  for (std::size_t v = 0; v < values_.size(); ++v) {
    if (!std::isfinite(values_[v])) {
      throw ValidationError("non-finite value for site '" +
                            ids_[v / time_grid_.size()] + "' at time index " +
                            std::to_string(v % time_grid_.size() + 1));
    }
  }
  weights_ = trapezoid_weights(time_grid_);
}

FunctionalDataset FunctionalDataset::relabelled(
    std::span<const std::size_t> order) const {
  if (order.size() != size()) {
    throw ValidationError("relabelling has wrong length");
  }
  const std::size_t t = num_times();
  std::vector<double> out(values_.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    auto src = row(order[s]);
    std::copy(src.begin(), src.end(), out.begin() + static_cast<long>(s * t));
  }
  return {ids_, time_grid_, std::move(out)};
}

FunctionalDataset align_to_sites(const FunctionalDataset& ds,
                                 const SiteGrid& grid) {
  if (ds.size() != grid.size()) {
    throw ValidationError("curves file has " + std::to_string(ds.size()) +
                          " sites, sites file has " +
                          std::to_string(grid.size()));
  }
  std::vector<std::size_t> row_of_site(grid.size(), grid.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    auto idx = grid.index_of(ds.ids()[r]);
    if (!idx) {
      throw ValidationError("curve id '" + ds.ids()[r] +
                            "' not present in sites file");
    }
    if (row_of_site[*idx] != grid.size()) {
      throw ValidationError("duplicate curve id '" + ds.ids()[r] + "'");
    }
    row_of_site[*idx] = r;
  }
  std::vector<std::string> ids;
  ids.reserve(grid.size());
  for (const Site& s : grid.sites()) ids.push_back(s.id);

  const std::size_t t = ds.num_times();
  std::vector<double> values(ds.values().size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    auto src = ds.row(row_of_site[s]);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<long>(s * t));
  }
  return {std::move(ids),
          std::vector<double>(ds.time_grid().begin(), ds.time_grid().end()),
          std::move(values)};
}

std::vector<double> trapezoid_weights(std::span<const double> time_grid) {
  check_grid(time_grid);
  const std::size_t t = time_grid.size();
  std::vector<double> w(t, 0.0);
  for (std::size_t k = 0; k + 1 < t; ++k) {
    const double half = 0.5 * (time_grid[k + 1] - time_grid[k]);
    w[k] += half;
    w[k + 1] += half;
  }
  return w;
}

double l2_inner(std::span<const double> f, std::span<const double> g,
                std::span<const double> time_grid) {
  if (f.size() != g.size() || f.size() != time_grid.size()) {
    throw ValidationError("l2_inner: length mismatch (" +
                          std::to_string(f.size()) + ", " +
                          std::to_string(g.size()) + ", grid " +
                          std::to_string(time_grid.size()) + ")");
  }
  long double acc = 0.0L;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const long double dt = time_grid[k + 1] - time_grid[k];
    acc += dt * (static_cast<long double>(f[k]) * g[k] +
                 static_cast<long double>(f[k + 1]) * g[k + 1]) /
           2.0L;
  }
  return static_cast<double>(acc);
}

double l2_norm_sq(std::span<const double> f, std::span<const double> time_grid) {
  return l2_inner(f, f, time_grid);
}

GroupSummary group_mean(const FunctionalDataset& ds,
                        std::span<const std::size_t> members) {
  check_members(members, ds.size());
  const std::size_t t = ds.num_times();
  std::vector<long double> acc(t, 0.0L);
  for (std::size_t i : members) {
    auto r = ds.row(i);
    for (std::size_t k = 0; k < t; ++k) acc[k] += r[k];
  }
  GroupSummary out;
  out.member_count = members.size();
  out.mean_curve.resize(t);
  const auto count = static_cast<long double>(members.size());
  for (std::size_t k = 0; k < t; ++k) {
    out.mean_curve[k] = static_cast<double>(acc[k] / count);
  }
  return out;
}

std::vector<std::size_t> complement(std::span<const std::size_t> members,
                                    std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n - std::min(n, members.size()));
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m < members.size() && members[m] == i) {
      ++m;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<double> pooled_variance_at_t(const FunctionalDataset& ds,
                                         std::span<const std::size_t> w) {
  const std::size_t n = ds.size();
  if (n < 3) throw ValidationError("pooled variance needs n >= 3");
  check_members(w, n);
  if (!std::is_sorted(w.begin(), w.end()) ||
      std::adjacent_find(w.begin(), w.end()) != w.end()) {
    throw ValidationError("member set must be sorted and unique");
  }
  const auto wc = complement(w, n);
  if (wc.empty()) throw ValidationError("degenerate split: empty complement");

  const auto mean_w = group_mean(ds, w);
  const auto mean_wc = group_mean(ds, wc);
  const std::size_t t = ds.num_times();
  std::vector<long double> ss(t, 0.0L);
  auto accumulate = [&](std::span<const std::size_t> group,
                        const std::vector<double>& mean) {
    for (std::size_t i : group) {
      auto r = ds.row(i);
      for (std::size_t k = 0; k < t; ++k) {
        const long double d = static_cast<long double>(r[k]) - mean[k];
        ss[k] += d * d;
      }
    }
  };
  accumulate(w, mean_w.mean_curve);
  accumulate(wc, mean_wc.mean_curve);

  std::vector<double> out(t);
  const auto dof = static_cast<long double>(n - 2);
  for (std::size_t k = 0; k < t; ++k) out[k] = static_cast<double>(ss[k] / dof);
  return out;
}

std::vector<double> equally_spaced_grid(double start, double stop,
                                        std::size_t points) {
  if (points < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> g(points);
  const double span = stop - start;
  const double steps = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    g[k] = start + span * (static_cast<double>(k) / steps);
  }
  g.back() = stop;
  return g;
}

}  // namespace fscan
