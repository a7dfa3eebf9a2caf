#pragma once

#include <cstddef>
#include <vector>

#include "fscan/geometry.hpp"

namespace fscan {

/// 94 mainland French departements (codes 01-95 without Corsica) placed at
/// approximate prefecture coordinates, projected to kilometres. A surrogate
/// layout for simulation studies.
SiteGrid france94_sites();

/// The eight Ile-de-France departements (75, 77, 78, 91-95) as site indices
/// of `grid`. Throws ValidationError if an id is missing.
std::vector<std::size_t> paris_region_cluster(const SiteGrid& grid);

}  // namespace fscan
