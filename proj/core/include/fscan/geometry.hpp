#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fscan {

struct Site {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

/// Planar sites with a precomputed Euclidean distance matrix. Immutable once
/// built; use build_site_grid() to construct.
class SiteGrid {
 public:
  std::size_t size() const { return sites_.size(); }
  const Site& site(std::size_t i) const { return sites_[i]; }
  std::span<const Site> sites() const { return sites_; }
  double distance(std::size_t i, std::size_t j) const {
    return distances_[i * sites_.size() + j];
  }
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  friend SiteGrid build_site_grid(std::vector<Site> records);

  std::vector<Site> sites_;
  std::vector<double> distances_;  // row-major n x n
  std::unordered_map<std::string, std::size_t> index_;
};

/// Validates the records (at least two, unique ids, unique finite
/// coordinates) and precomputes distances. Throws ValidationError naming the
/// offending record.
SiteGrid build_site_grid(std::vector<Site> records);

/// A circular window: every site within `radius` of the centre site, closed
/// disc. Members are sorted ascending.
struct CandidateCluster {
  std::vector<std::size_t> members;
  std::size_t center = 0;
  double radius = 0.0;

  std::size_t size() const { return members.size(); }
  bool contains(std::size_t site) const;
  bool intersects(const CandidateCluster& other) const;
};

/// Orders windows smallest first, then by centre, then by radius. Used both
/// for enumeration order and for argmax tie-breaking.
bool window_precedes(const CandidateCluster& a, const CandidateCluster& b);

/// All distinct circular windows w_{i,j} (disc centred on site i through site
/// j) holding between 1 and floor(n * max_fraction) sites, sorted by
/// window_precedes. Identical member sets are kept once, with the smallest
/// centre then smallest radius.
std::vector<CandidateCluster> enumerate_candidates(const SiteGrid& grid,
                                                   double max_fraction = 0.5);

}  // namespace fscan
