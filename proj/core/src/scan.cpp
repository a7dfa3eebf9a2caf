#include "fscan/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "fscan/error.hpp"
#include "fscan/parallel.hpp"
#include "fscan/random.hpp"

namespace fscan {

OverlapPolicy parse_overlap(std::string_view name) {
  if (name == "none") return OverlapPolicy::none;
  if (name == "partial") return OverlapPolicy::partial;
  throw ValidationError("unknown overlap policy '" + std::string(name) + "'");
}

std::string_view to_string(OverlapPolicy p) {
  return p == OverlapPolicy::none ? "none" : "partial";
}

WindowScanner::WindowScanner(const FunctionalDataset& ds,
                             std::span<const CandidateCluster> candidates,
                             Method method)
    : method_(method),
      n_(ds.size()),
      t_(ds.num_times()),
      num_candidates_(candidates.size()) {
  if (n_ < 3) {
    throw ValidationError("scan needs at least 3 sites, got " +
                          std::to_string(n_));
  }
  if (candidates.empty()) throw ValidationError("no candidate windows");
  for (const auto& c : candidates) {
    if (c.members.empty() || c.size() >= n_ || c.members.back() >= n_ ||
        !std::is_sorted(c.members.begin(), c.members.end())) {
      throw ValidationError("candidate window centred on site " +
                            std::to_string(c.center) + " is malformed");
    }
  }

  std::vector<std::size_t> by_rank(candidates.size());
  std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
  std::stable_sort(by_rank.begin(), by_rank.end(),
                   [&](std::size_t a, std::size_t b) {
                     return window_precedes(candidates[a], candidates[b]);
                   });
  rank_.resize(candidates.size());
  for (std::size_t r = 0; r < by_rank.size(); ++r) rank_[by_rank[r]] = r;

  // Chain windows by centre in order of size; a window that is a superset of
  // the previous one only adds the difference.
  std::map<std::size_t, std::vector<std::size_t>> by_center;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    by_center[candidates[c].center].push_back(c);
  }
  for (auto& [center, group] : by_center) {
    std::stable_sort(group.begin(), group.end(),
                     [&](std::size_t a, std::size_t b) {
                       return window_precedes(candidates[a], candidates[b]);
                     });
    std::vector<std::size_t> current;
    for (std::size_t c : group) {
      const auto& members = candidates[c].members;
      Step step{c, added_.size(), 0, false};
      if (!current.empty() && std::includes(members.begin(), members.end(),
                                            current.begin(), current.end())) {
        std::set_difference(members.begin(), members.end(), current.begin(),
                            current.end(), std::back_inserter(added_));
      } else {
        step.restart = true;
        added_.insert(added_.end(), members.begin(), members.end());
      }
      step.added_end = added_.size();
      steps_.push_back(step);
      current = members;
    }
  }

  weights_.assign(ds.quadrature_weights().begin(),
                  ds.quadrature_weights().end());

  if (method_ == Method::npfss) {
    const SignMatrix sm = build_sign_matrix(ds);
    rows_.resize(n_ * t_);
    for (std::size_t i = 0; i < n_; ++i) {
      auto r = sm.row(i);
      std::copy(r.begin(), r.end(), rows_.begin() + static_cast<long>(i * t_));
    }
    return;
  }

  std::vector<long double> grand(t_, 0.0L);
  for (std::size_t i = 0; i < n_; ++i) {
    auto r = ds.row(i);
    for (std::size_t k = 0; k < t_; ++k) grand[k] += r[k];
  }
  for (auto& g : grand) g /= static_cast<long double>(n_);

  rows_.resize(n_ * t_);
  column_ss_.assign(t_, 0.0);
  long double total = 0.0L;
  std::vector<long double> column(t_, 0.0L);
  double scale = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    auto r = ds.row(i);
    for (std::size_t k = 0; k < t_; ++k) {
      const double y = static_cast<double>(r[k] - grand[k]);
      rows_[i * t_ + k] = y;
      column[k] += static_cast<long double>(y) * y;
      total += static_cast<long double>(weights_[k]) * y * y;
      scale = std::max(scale, std::abs(y));
    }
  }
  for (std::size_t k = 0; k < t_; ++k) {
    column_ss_[k] = static_cast<double>(column[k]);
  }
  total_ss_ = static_cast<double>(total);
  var_eps_ = kRelativeZero * scale * scale;
}

double WindowScanner::score(std::span<const double> acc, std::size_t inside,
                            std::uint8_t& separated, bool& degenerate) const {
  const double a = static_cast<double>(inside);
  const double b = static_cast<double>(n_ - inside);
  const double n = static_cast<double>(n_);
  const double c = n / (a * b);

  switch (method_) {
    case Method::pfss: {
      double s = 0.0;
      for (std::size_t k = 0; k < t_; ++k) s += weights_[k] * acc[k] * acc[k];
      const double between = s * c;
      const double within = total_ss_ - between;
      if (total_ss_ == 0.0 || within <= kRelativeZero * total_ss_) {
        degenerate = true;
        return 0.0;
      }
      return between * (n - 2.0) / within;
    }
    case Method::dffss: {
      // I(t)^2 = (n - 2) B / (q - B) with B = c * S_w(t)^2, S_w the sum of
      // the centred curves in w and q the column sum of squares.
      const double resid_floor = (n - 2.0) * var_eps_;
      double best = 0.0;
      for (std::size_t k = 0; k < t_; ++k) {
        const double between = c * acc[k] * acc[k];
        const double resid = column_ss_[k] - between;
        if (resid <= resid_floor) {
          if (c * between > var_eps_) {
            separated = 1;
            return kPerfectSeparation;
          }
          continue;
        }
        best = std::max(best, between / resid);
      }
      return std::sqrt((n - 2.0) * best);
    }
    case Method::npfss: {
      double s = 0.0;
      for (std::size_t k = 0; k < t_; ++k) s += weights_[k] * acc[k] * acc[k];
      return std::sqrt(s / (a * b * n));
    }
  }
  return 0.0;
}

WindowValues WindowScanner::evaluate(
    std::span<const std::size_t> labelling) const {
  if (!labelling.empty() && labelling.size() != n_) {
    throw ValidationError("labelling has wrong length");
  }
  WindowValues out;
  out.values.assign(num_candidates_, 0.0);
  out.perfect_separation.assign(num_candidates_, 0);

  std::vector<double> acc(t_, 0.0);
  std::size_t inside = 0;
  for (const Step& step : steps_) {
    if (step.restart) {
      std::fill(acc.begin(), acc.end(), 0.0);
      inside = 0;
    }
    for (std::size_t p = step.added_begin; p < step.added_end; ++p) {
      const std::size_t site = added_[p];
      const std::size_t row = labelling.empty() ? site : labelling[site];
      const double* r = rows_.data() + row * t_;
      for (std::size_t k = 0; k < t_; ++k) acc[k] += r[k];
    }
    inside += step.added_end - step.added_begin;
    out.values[step.candidate] =
        score(acc, inside, out.perfect_separation[step.candidate],
              out.degenerate);
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < num_candidates_; ++c) {
    const double v = out.values[c];
    if (v > out.values[best] || (v == out.values[best] && rank_[c] < rank_[best])) {
      best = c;
    }
  }
  out.argmax = best;
  return out;
}

MlcDetection detect_mlc(const FunctionalDataset& ds,
                        std::span<const CandidateCluster> candidates,
                        Method method) {
  const WindowScanner scanner(ds, candidates, method);
  const WindowValues values = scanner.evaluate();
  if (values.degenerate) {
    throw DegenerateDataError(
        "PFSS denominator is zero for at least one candidate window");
  }
  MlcDetection out;
  out.candidate_index = values.argmax;
  out.window = candidates[values.argmax];
  out.lambda = values.values[values.argmax];
  out.perfect_separation = values.perfect_separation[values.argmax] != 0;
  return out;
}

double permutation_p_value(double observed,
                           std::span<const double> null_maxima) {
  const auto exceed = std::count_if(null_maxima.begin(), null_maxima.end(),
                                    [&](double v) { return v >= observed; });
  return static_cast<double>(1 + exceed) /
         static_cast<double>(null_maxima.size() + 1);
}

namespace {

bool compatible(const CandidateCluster& candidate,
                const CandidateCluster& accepted, OverlapPolicy policy) {
  if (policy == OverlapPolicy::none) return !candidate.intersects(accepted);
  return !accepted.contains(candidate.center) &&
         !candidate.contains(accepted.center);
}

}  // namespace

std::vector<SecondaryCluster> secondary_clusters(
    std::span<const CandidateCluster> candidates, std::span<const double> values,
    std::size_t mlc_index, std::span<const double> null_maxima,
    const SecondaryOptions& options) {
  if (values.size() != candidates.size()) {
    throw ValidationError("one index value per candidate is required");
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return window_precedes(candidates[a], candidates[b]);
  });

  std::vector<const CandidateCluster*> accepted{&candidates[mlc_index]};
  std::vector<SecondaryCluster> out;
  for (std::size_t c : order) {
    if (c == mlc_index) continue;
    const bool ok = std::all_of(
        accepted.begin(), accepted.end(), [&](const CandidateCluster* a) {
          return compatible(candidates[c], *a, options.overlap);
        });
    if (!ok) continue;
    const double p = permutation_p_value(values[c], null_maxima);
    // Values are decreasing, so p-values are non-decreasing from here on.
    if (!options.include_nonsignificant && !(p < options.level)) break;
    accepted.push_back(&candidates[c]);
    out.push_back({c, candidates[c], values[c], p});
  }
  return out;
}

std::uint64_t permutation_seed(std::uint64_t master_seed, std::size_t m) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(m)});
}

ScanResult monte_carlo(const FunctionalDataset& ds,
                       std::span<const CandidateCluster> candidates,
                       Method method, const ScanOptions& options) {
  if (options.permutations < 1) {
    throw ValidationError("number of permutations must be at least 1");
  }
  if (!(options.secondary.level > 0.0 && options.secondary.level < 1.0)) {
    throw ValidationError("significance level must be in (0, 1)");
  }
  using clock = std::chrono::steady_clock;
  auto seconds_since = [](clock::time_point start) {
    return std::chrono::duration<double>(clock::now() - start).count();
  };

  ScanResult result;
  result.method = method;
  result.permutations = options.permutations;
  result.master_seed = options.master_seed;

  auto start = clock::now();
  const WindowScanner scanner(ds, candidates, method);
  result.timings.prepare_seconds = seconds_since(start);

  start = clock::now();
  const WindowValues observed = scanner.evaluate();
  if (observed.degenerate) {
    throw DegenerateDataError(
        "PFSS denominator is zero for at least one candidate window");
  }
  result.mlc_index = observed.argmax;
  result.mlc = candidates[observed.argmax];
  result.lambda = observed.values[observed.argmax];
  result.perfect_separation = observed.perfect_separation[observed.argmax] != 0;
  result.perfect_separation_windows = static_cast<std::size_t>(
      std::count(observed.perfect_separation.begin(),
                 observed.perfect_separation.end(), std::uint8_t{1}));
  if (method == Method::dffss) {
    result.argmax_time = dffss_index(ds, result.mlc).argmax_time;
  }
  result.timings.observed_seconds = seconds_since(start);

  start = clock::now();
  const std::size_t m_total = options.permutations;
  result.null_maxima.assign(m_total, 0.0);
  std::vector<std::uint8_t> degenerate(m_total, 0);
  parallel_for(m_total, options.threads, [&](std::size_t m) {
    const auto labelling =
        random_permutation(ds.size(), permutation_seed(options.master_seed, m + 1));
    const WindowValues v = scanner.evaluate(labelling);
    if (v.degenerate) {
      degenerate[m] = 1;
      return;
    }
    result.null_maxima[m] = v.values[v.argmax];
  });
  result.degenerate_permutations = static_cast<std::size_t>(
      std::count(degenerate.begin(), degenerate.end(), std::uint8_t{1}));
  result.p_value = permutation_p_value(result.lambda, result.null_maxima);
  result.timings.permutation_seconds = seconds_since(start);

  start = clock::now();
  result.secondaries =
      secondary_clusters(candidates, observed.values, result.mlc_index,
                         result.null_maxima, options.secondary);
  result.timings.secondary_seconds = seconds_since(start);
  return result;
}

}  // namespace fscan
