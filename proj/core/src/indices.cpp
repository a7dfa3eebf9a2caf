#include "fscan/indices.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fscan/error.hpp"

namespace fscan {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::pfss:
      return "pfss";
    case Method::dffss:
      return "dffss";
    case Method::npfss:
      return "npfss";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "pfss") return Method::pfss;
  if (name == "dffss") return Method::dffss;
  if (name == "npfss") return Method::npfss;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

namespace {

void check_split(std::size_t n, const CandidateCluster& w) {
  if (n < 3) {
    throw ValidationError("index needs at least 3 sites, got " +
                          std::to_string(n));
  }
  if (w.members.empty() || w.size() >= n) {
    throw ValidationError("window size " + std::to_string(w.size()) +
                          " outside [1, n-1] for n = " + std::to_string(n));
  }
  if (w.members.back() >= n) {
    throw ValidationError("window member out of range");
  }
}

std::vector<double> difference(std::span<const double> a,
                               std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
  return d;
}

double weighted_norm_sq(std::span<const double> f,
                        std::span<const double> weights) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += weights[k] * f[k] * f[k];
  return acc;
}

}  // namespace

IndexValue pfss_index(const FunctionalDataset& ds, const CandidateCluster& w) {
  const std::size_t n = ds.size();
  check_split(n, w);
  const auto grid = ds.time_grid();
  const auto wc = complement(w.members, n);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto grand = group_mean(ds, all).mean_curve;
  const auto mean_w = group_mean(ds, w.members).mean_curve;
  const auto mean_wc = group_mean(ds, wc).mean_curve;

  const double between =
      static_cast<double>(w.size()) *
          l2_norm_sq(difference(mean_w, grand), grid) +
      static_cast<double>(wc.size()) *
          l2_norm_sq(difference(mean_wc, grand), grid);

  long double within = 0.0L;
  long double total = 0.0L;
  for (std::size_t i : w.members) {
    within += l2_norm_sq(difference(ds.row(i), mean_w), grid);
  }
  for (std::size_t i : wc) {
    within += l2_norm_sq(difference(ds.row(i), mean_wc), grid);
  }
  for (std::size_t i = 0; i < n; ++i) {
    total += l2_norm_sq(difference(ds.row(i), grand), grid);
  }
  if (total == 0.0L || within <= kRelativeZero * total) {
    throw DegenerateDataError(
        "PFSS denominator is zero: curves are identical within both groups");
  }

  IndexValue out;
  out.method = Method::pfss;
  out.window = w;
  out.value = between / static_cast<double>(within / static_cast<long double>(n - 2));
  return out;
}

IndexValue dffss_index(const FunctionalDataset& ds, const CandidateCluster& w) {
  const std::size_t n = ds.size();
  check_split(n, w);
  const auto wc = complement(w.members, n);
  const auto mean_w = group_mean(ds, w.members).mean_curve;
  const auto mean_wc = group_mean(ds, wc).mean_curve;
  const auto pooled = pooled_variance_at_t(ds, w.members);

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto grand = group_mean(ds, all).mean_curve;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = ds.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      scale = std::max(scale, std::abs(r[k] - grand[k]));
    }
  }
  const double var_eps = kRelativeZero * scale * scale;
  const double size_factor = 1.0 / static_cast<double>(w.size()) +
                             1.0 / static_cast<double>(wc.size());

  IndexValue out;
  out.method = Method::dffss;
  out.window = w;
  out.value = -1.0;
  const auto grid = ds.time_grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double diff = std::abs(mean_w[k] - mean_wc[k]);
    double pointwise = 0.0;
    bool separated = false;
    if (pooled[k] <= var_eps) {
      if (diff > std::sqrt(var_eps)) {
        pointwise = kPerfectSeparation;
        separated = true;
      }
    } else {
      pointwise = diff / std::sqrt(pooled[k] * size_factor);
    }
    out.perfect_separation = out.perfect_separation || separated;
    if (pointwise > out.value) {
      out.value = pointwise;
      out.argmax_time = grid[k];
    }
  }
  return out;
}

SignMatrix build_sign_matrix(const FunctionalDataset& ds) {
  const std::size_t n = ds.size();
  const std::size_t t = ds.num_times();
  SignMatrix sm;
  sm.n_ = n;
  sm.weights_.assign(ds.quadrature_weights().begin(),
                     ds.quadrature_weights().end());
  sm.rows_.assign(n * t, 0.0);
  sm.norm_cache_.assign(n * n, 0.0);

  std::vector<double> diff(t);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = ds.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      auto xj = ds.row(j);
      for (std::size_t k = 0; k < t; ++k) diff[k] = xj[k] - xi[k];
      const double norm = std::sqrt(weighted_norm_sq(diff, sm.weights_));
      sm.norm_cache_[i * n + j] = norm;
      sm.norm_cache_[j * n + i] = norm;
      if (norm == 0.0) continue;
      const double inv = 1.0 / norm;
      double* ri = sm.rows_.data() + i * t;
      double* rj = sm.rows_.data() + j * t;
      for (std::size_t k = 0; k < t; ++k) {
        const double s = diff[k] * inv;
        ri[k] += s;
        rj[k] -= s;
      }
    }
  }
  return sm;
}

IndexValue npfss_index(const SignMatrix& sm, const CandidateCluster& w) {
  const std::size_t n = sm.size();
  if (w.members.empty() || w.size() >= n || w.members.back() >= n) {
    throw ValidationError("window size " + std::to_string(w.size()) +
                          " outside [1, n-1] for n = " + std::to_string(n));
  }
  const std::size_t t = sm.num_times();
  std::vector<double> acc(t, 0.0);
  for (std::size_t i : w.members) {
    auto r = sm.row(i);
    for (std::size_t k = 0; k < t; ++k) acc[k] += r[k];
  }
  const double a = static_cast<double>(w.size());
  const double b = static_cast<double>(n - w.size());
  IndexValue out;
  out.method = Method::npfss;
  out.window = w;
  out.value = std::sqrt(weighted_norm_sq(acc, sm.quadrature_weights()) /
                        (a * b * static_cast<double>(n)));
  return out;
}

double npfss_index_naive(const FunctionalDataset& ds, const CandidateCluster& w) {
  const std::size_t n = ds.size();
  if (w.members.empty() || w.size() >= n || w.members.back() >= n) {
    throw ValidationError("window size " + std::to_string(w.size()) +
                          " outside [1, n-1] for n = " + std::to_string(n));
  }
  const std::size_t t = ds.num_times();
  const auto weights = ds.quadrature_weights();
  const auto wc = complement(w.members, n);
  std::vector<double> acc(t, 0.0);
  std::vector<double> diff(t);
  for (std::size_t i : w.members) {
    auto xi = ds.row(i);
    for (std::size_t j : wc) {
      auto xj = ds.row(j);
      for (std::size_t k = 0; k < t; ++k) diff[k] = xj[k] - xi[k];
      const double norm = std::sqrt(weighted_norm_sq(diff, weights));
      if (norm == 0.0) continue;
      for (std::size_t k = 0; k < t; ++k) acc[k] += diff[k] / norm;
    }
  }
  const double a = static_cast<double>(w.size());
  const double b = static_cast<double>(wc.size());
  return std::sqrt(weighted_norm_sq(acc, weights) /
                   (a * b * static_cast<double>(n)));
}

}  // namespace fscan
