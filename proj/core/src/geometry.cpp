#include "fscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "fscan/error.hpp"

namespace fscan {

std::optional<std::size_t> SiteGrid::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SiteGrid build_site_grid(std::vector<Site> records) {
  if (records.size() < 2) {
    throw ValidationError("site grid needs at least 2 sites, got " +
                          std::to_string(records.size()));
  }

  SiteGrid grid;
  std::set<std::pair<double, double>> seen_xy;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Site& s = records[i];
    if (!std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw ValidationError("non-finite coordinate for site '" + s.id +
                            "' (record " + std::to_string(i + 1) + ")");
    }
    if (!grid.index_.emplace(s.id, i).second) {
      throw ValidationError("duplicate id '" + s.id + "' (record " +
                            std::to_string(i + 1) + ")");
    }
    if (!seen_xy.emplace(s.x, s.y).second) {
      throw ValidationError("duplicate coordinate pair for site '" + s.id +
                            "' (record " + std::to_string(i + 1) + ")");
    }
  }

  const std::size_t n = records.size();
  grid.distances_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::hypot(records[i].x - records[j].x,
                                  records[i].y - records[j].y);
      grid.distances_[i * n + j] = d;
      grid.distances_[j * n + i] = d;
    }
  }
  grid.sites_ = std::move(records);
  return grid;
}

bool CandidateCluster::contains(std::size_t site) const {
  return std::binary_search(members.begin(), members.end(), site);
}

bool CandidateCluster::intersects(const CandidateCluster& other) const {
  auto a = members.begin();
  auto b = other.members.begin();
  while (a != members.end() && b != other.members.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

bool window_precedes(const CandidateCluster& a, const CandidateCluster& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.center != b.center) return a.center < b.center;
  return a.radius < b.radius;
}

std::vector<CandidateCluster> enumerate_candidates(const SiteGrid& grid,
                                                   double max_fraction) {
  if (!(max_fraction > 0.0 && max_fraction <= 0.5)) {
    throw ValidationError("max_fraction must be in (0, 0.5], got " +
                          std::to_string(max_fraction));
  }
  const std::size_t n = grid.size();
  const auto max_size = static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * max_fraction + 1e-9));

  // Member set -> position in `windows`; the first insertion wins, which is
  // the smallest centre and, within a centre, the smallest radius.
  std::map<std::vector<std::size_t>, std::size_t> seen;
  std::vector<CandidateCluster> windows;

  std::vector<std::size_t> order(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return grid.distance(c, a) < grid.distance(c, b);
                     });
    std::size_t k = 0;
    while (k < n) {
      // Grow to the next radius, taking every site tied at that distance.
      const double radius = grid.distance(c, order[k]);
      std::size_t end = k;
      while (end < n && grid.distance(c, order[end]) <= radius) ++end;
      if (end > max_size) break;

      std::vector<std::size_t> members(order.begin(),
                                       order.begin() + static_cast<long>(end));
      std::sort(members.begin(), members.end());
      if (seen.emplace(members, windows.size()).second) {
        windows.push_back({std::move(members), c, radius});
      }
      k = end;
    }
  }

  std::sort(windows.begin(), windows.end(), window_precedes);
  return windows;
}

}  // namespace fscan
