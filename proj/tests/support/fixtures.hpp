#pragma once

#include <random>
#include <string>
#include <vector>

#include "fscan/fdata.hpp"
#include "fscan/geometry.hpp"
#include "oracles.hpp"

namespace fscan::testing {

inline FunctionalDataset to_dataset(const oracle::Curves& x,
                                    const oracle::Curve& grid) {
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ids.push_back("s" + std::to_string(i));
    values.insert(values.end(), x[i].begin(), x[i].end());
  }
  return {std::move(ids), grid, std::move(values)};
}

inline oracle::Curves to_curves(const FunctionalDataset& ds) {
  oracle::Curves x;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto r = ds.row(i);
    x.emplace_back(r.begin(), r.end());
  }
  return x;
}

inline CandidateCluster window_of(std::vector<std::size_t> members,
                                  std::size_t center = 0) {
  return {std::move(members), center, 0.0};
}

/// n sites scattered uniformly on [0, 10]^2.
inline SiteGrid random_grid(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Site> sites;
  for (std::size_t i = 0; i < n; ++i) {
    sites.push_back({"s" + std::to_string(i), u(gen), u(gen)});
  }
  return build_site_grid(std::move(sites));
}

/// Constant curves with the given levels on [0, 1].
inline FunctionalDataset constant_curves(const std::vector<double>& levels,
                                         std::size_t t = 11) {
  oracle::Curves x;
  for (double v : levels) x.emplace_back(t, v);
  return to_dataset(x, oracle::uniform_grid(t));
}

}  // namespace fscan::testing
