#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "fscan/error.hpp"
#include "fscan/random.hpp"
#include "fscan/scan.hpp"
#include "oracles.hpp"

namespace fscan {
namespace {

using testing::random_grid;
using testing::to_dataset;

constexpr Method kMethods[] = {Method::pfss, Method::dffss, Method::npfss};

double direct_index(Method m, const FunctionalDataset& ds,
                    const CandidateCluster& w) {
  switch (m) {
    case Method::pfss:
      return pfss_index(ds, w).value;
    case Method::dffss:
      return dffss_index(ds, w).value;
    case Method::npfss:
      return npfss_index_naive(ds, w);
  }
  return 0.0;
}

/// Curves with +shift added to the members of `cluster`.
FunctionalDataset planted(std::mt19937_64& gen, std::size_t n, std::size_t t,
                          const std::vector<std::vector<std::size_t>>& clusters,
                          double shift) {
  auto x = oracle::random_curves(gen, n, t);
  for (const auto& c : clusters) {
    for (std::size_t i : c) {
      for (double& v : x[i]) v += shift;
    }
  }
  return to_dataset(x, oracle::uniform_grid(t));
}

TEST(WindowScanner, MatchesDirectIndicesUnderRandomLabellings) {
  std::mt19937_64 gen(31);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 8 + static_cast<std::size_t>(rep) * 2;
    const auto grid = random_grid(gen, n);
    const auto candidates = enumerate_candidates(grid);
    const auto ds = to_dataset(oracle::random_curves(gen, n, 9 + rep),
                               oracle::uniform_grid(9 + rep));
    for (Method m : kMethods) {
      const WindowScanner scanner(ds, candidates, m);
      for (std::uint64_t s = 0; s < 3; ++s) {
        const auto labelling = random_permutation(n, 100 * rep + s);
        const auto permuted = ds.relabelled(labelling);
        const auto values = scanner.evaluate(labelling);
        ASSERT_EQ(values.values.size(), candidates.size());
        EXPECT_FALSE(values.degenerate);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const double expected = direct_index(m, permuted, candidates[c]);
          EXPECT_NEAR(values.values[c], expected, 1e-10 * std::max(1.0, expected))
              << to_string(m) << " candidate " << c;
        }
      }
    }
  }
}

TEST(WindowScanner, HandlesNonNestedCandidateLists) {
  std::mt19937_64 gen(32);
  const auto ds = to_dataset(oracle::random_curves(gen, 7, 6), oracle::uniform_grid(6));
  // Same centre, not nested: forces a restart of the running sum.
  const std::vector<CandidateCluster> candidates{
      {{0, 1}, 0, 1.0}, {{0, 2, 3}, 0, 2.0}, {{3}, 3, 0.0}, {{0, 1, 4}, 0, 3.0}};
  for (Method m : kMethods) {
    const auto values = WindowScanner(ds, candidates, m).evaluate();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      EXPECT_NEAR(values.values[c], direct_index(m, ds, candidates[c]), 1e-10);
    }
  }
}

TEST(DetectMlc, PlantedClusterIsFoundByAllMethods) {
  std::mt19937_64 gen(33);
  const auto grid = random_grid(gen, 30);
  const auto candidates = enumerate_candidates(grid);
  const auto it = std::find_if(candidates.begin(), candidates.end(),
                               [](const auto& c) { return c.size() == 5; });
  ASSERT_NE(it, candidates.end());
  const auto ds = planted(gen, 30, 21, {it->members}, 10.0);
  const auto x = testing::to_curves(ds);
  const auto t = oracle::uniform_grid(21);

  for (Method m : kMethods) {
    const auto mlc = detect_mlc(ds, candidates, m);
    EXPECT_EQ(mlc.window.members, it->members) << to_string(m);

    // Brute force with the oracles.
    double best = -1.0;
    std::vector<std::size_t> best_members;
    for (const auto& c : candidates) {
      const double v = m == Method::pfss    ? oracle::pfss(x, c.members, t)
                       : m == Method::dffss ? oracle::dffss(x, c.members)
                                            : oracle::npfss(x, c.members, t);
      if (v > best) {
        best = v;
        best_members = c.members;
      }
    }
    EXPECT_EQ(best_members, it->members);
    EXPECT_NEAR(mlc.lambda, best, 1e-9 * best);
  }
}

TEST(DetectMlc, NullDataTieBreaksToFirstCandidate) {
  std::mt19937_64 gen(34);
  const auto grid = random_grid(gen, 12);
  const auto candidates = enumerate_candidates(grid);
  const auto ds = testing::constant_curves(std::vector<double>(12, 4.2));
  for (Method m : {Method::dffss, Method::npfss}) {
    const auto mlc = detect_mlc(ds, candidates, m);
    EXPECT_EQ(mlc.lambda, 0.0);
    EXPECT_EQ(mlc.candidate_index, 0u);
    EXPECT_EQ(mlc.window.members, candidates.front().members);
  }
  EXPECT_THROW(detect_mlc(ds, candidates, Method::pfss), DegenerateDataError);
}

TEST(DetectMlc, TieBreakPrefersSmallerWindow) {
  // Two windows with equal values: evaluation order must not matter.
  const auto ds = testing::constant_curves({0.0, 1.0, 0.0, 1.0, 5.0, 6.0});
  const std::vector<CandidateCluster> candidates{
      {{0, 1, 2}, 2, 2.0}, {{4, 5}, 5, 1.0}, {{4, 5}, 4, 1.0}};
  const auto mlc = detect_mlc(ds, candidates, Method::npfss);
  EXPECT_EQ(mlc.window.center, 4u);
}

TEST(PValue, Bounds) {
  const std::vector<double> null{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(permutation_p_value(10.0, null), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(permutation_p_value(0.5, null), 1.0);
  EXPECT_DOUBLE_EQ(permutation_p_value(3.0, null), 3.0 / 5.0);
}

TEST(MonteCarlo, PlantedClusterGetsMinimalPValue) {
  std::mt19937_64 gen(35);
  const auto grid = random_grid(gen, 25);
  const auto candidates = enumerate_candidates(grid);
  const auto& target = candidates[candidates.size() / 2];
  const auto ds = planted(gen, 25, 15, {target.members}, 10.0);
  ScanOptions opt;
  opt.permutations = 99;
  opt.master_seed = 7;
  for (Method m : kMethods) {
    const auto res = monte_carlo(ds, candidates, m, opt);
    EXPECT_EQ(res.mlc.members, target.members);
    EXPECT_DOUBLE_EQ(res.p_value, 1.0 / 100.0);
    EXPECT_EQ(res.null_maxima.size(), 99u);
    EXPECT_EQ(res.permutations, 99u);
    EXPECT_EQ(res.master_seed, 7u);
    EXPECT_EQ(res.method, m);
  }
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  std::mt19937_64 gen(36);
  const auto grid = random_grid(gen, 20);
  const auto candidates = enumerate_candidates(grid);
  const auto ds = to_dataset(oracle::random_curves(gen, 20, 11), oracle::uniform_grid(11));
  for (Method m : kMethods) {
    ScanOptions opt;
    opt.permutations = 60;
    opt.master_seed = 2024;
    opt.threads = 1;
    const auto a = monte_carlo(ds, candidates, m, opt);
    opt.threads = 4;
    const auto b = monte_carlo(ds, candidates, m, opt);
    const auto c = monte_carlo(ds, candidates, m, opt);
    EXPECT_EQ(a.null_maxima, b.null_maxima);
    EXPECT_EQ(b.null_maxima, c.null_maxima);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.p_value, b.p_value);
    opt.master_seed = 2025;
    EXPECT_NE(monte_carlo(ds, candidates, m, opt).null_maxima, a.null_maxima);
  }
}

TEST(MonteCarlo, InvariantsOnRandomData) {
  std::mt19937_64 gen(37);
  for (int rep = 0; rep < 5; ++rep) {
    const auto grid = random_grid(gen, 18);
    const auto candidates = enumerate_candidates(grid);
    const auto ds = to_dataset(oracle::random_curves(gen, 18, 10), oracle::uniform_grid(10));
    ScanOptions opt;
    opt.permutations = 39;
    opt.master_seed = static_cast<std::uint64_t>(rep);
    opt.secondary.include_nonsignificant = true;
    for (Method m : kMethods) {
      const auto res = monte_carlo(ds, candidates, m, opt);
      EXPECT_GE(res.p_value, 1.0 / 40.0);
      EXPECT_LE(res.p_value, 1.0);
      EXPECT_NEAR(res.lambda, direct_index(m, ds, res.mlc), 1e-10 * res.lambda);
      EXPECT_EQ(res.p_value, permutation_p_value(res.lambda, res.null_maxima));
      std::vector<const CandidateCluster*> reported{&res.mlc};
      double previous = res.lambda;
      for (const auto& s : res.secondaries) {
        for (const auto* r : reported) EXPECT_FALSE(s.cluster.intersects(*r));
        reported.push_back(&s.cluster);
        EXPECT_LE(s.value, previous);
        previous = s.value;
        EXPECT_GE(s.p_value, res.p_value);
        EXPECT_LE(s.p_value, 1.0);
      }
    }
  }
}

TEST(MonteCarlo, RelabellingSitesLeavesLambdaUnchanged) {
  std::mt19937_64 gen(38);
  const auto grid = random_grid(gen, 16);
  const auto ds = to_dataset(oracle::random_curves(gen, 16, 8), oracle::uniform_grid(8));
  const auto perm = random_permutation(16, 99);
  std::vector<Site> sites;
  for (std::size_t s : perm) sites.push_back(grid.site(s));
  const auto moved_grid = build_site_grid(sites);
  const auto moved_ds = ds.relabelled(perm);
  for (Method m : kMethods) {
    const auto a = detect_mlc(ds, enumerate_candidates(grid), m);
    const auto b = detect_mlc(moved_ds, enumerate_candidates(moved_grid), m);
    EXPECT_NEAR(a.lambda, b.lambda, 1e-10 * a.lambda);
  }
}

TEST(MonteCarlo, RejectsBadOptions) {
  const auto ds = testing::constant_curves({0.0, 1.0, 2.0, 3.0});
  const std::vector<CandidateCluster> candidates{{{0}, 0, 0.0}};
  ScanOptions opt;
  opt.permutations = 0;
  EXPECT_THROW(monte_carlo(ds, candidates, Method::dffss, opt), ValidationError);
  opt.permutations = 10;
  opt.secondary.level = 1.0;
  EXPECT_THROW(monte_carlo(ds, candidates, Method::dffss, opt), ValidationError);
  opt.secondary.level = 0.05;
  EXPECT_THROW(monte_carlo(ds, {}, Method::dffss, opt), ValidationError);
}

TEST(Secondary, TwoPlantedClusters) {
  // Two rows of sites far apart; clusters at each end.
  std::vector<Site> sites;
  for (int i = 0; i < 30; ++i) {
    sites.push_back({"s" + std::to_string(i), static_cast<double>(i % 10) * 1.0,
                     static_cast<double>(i / 10) * 1.3});
  }
  const auto grid = build_site_grid(sites);
  const auto candidates = enumerate_candidates(grid);
  const std::vector<std::size_t> left{0, 1, 10};
  const std::vector<std::size_t> right{8, 9, 19};
  auto in_candidates = [&](const std::vector<std::size_t>& m) {
    return std::any_of(candidates.begin(), candidates.end(),
                       [&](const auto& c) { return c.members == m; });
  };
  ASSERT_TRUE(in_candidates(left));
  ASSERT_TRUE(in_candidates(right));

  std::mt19937_64 gen(39);
  const auto ds = planted(gen, 30, 12, {left, right}, 10.0);
  ScanOptions opt;
  opt.permutations = 99;
  opt.master_seed = 3;
  opt.secondary.include_nonsignificant = true;
  for (Method m : {Method::pfss, Method::dffss}) {
    const auto res = monte_carlo(ds, candidates, m, opt);
    ASSERT_FALSE(res.secondaries.empty()) << to_string(m);
    const auto& first = res.secondaries.front();
    EXPECT_TRUE((res.mlc.members == left && first.cluster.members == right) ||
                (res.mlc.members == right && first.cluster.members == left))
        << to_string(m);
    // Shared null of the maximum: never more significant than the MLC.
    EXPECT_LE(first.value, res.lambda);
    EXPECT_GE(first.p_value, res.p_value);
  }
}

TEST(Secondary, OverlapPolicies) {
  const std::vector<CandidateCluster> candidates{
      {{0, 1}, 0, 1.0}, {{1, 2}, 2, 1.0}, {{3, 4}, 3, 1.0}, {{0, 5}, 5, 2.0}};
  const std::vector<double> values{5.0, 4.0, 3.0, 2.0};
  const std::vector<double> null{1.0};
  SecondaryOptions opt;
  opt.include_nonsignificant = true;
  auto none = secondary_clusters(candidates, values, 0, null, opt);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_EQ(none[0].candidate_index, 2u);

  opt.overlap = OverlapPolicy::partial;
  auto partial = secondary_clusters(candidates, values, 0, null, opt);
  // {1,2} overlaps the MLC but neither centre lies in the other window;
  // {0,5} contains the MLC centre.
  ASSERT_EQ(partial.size(), 2u);
  EXPECT_EQ(partial[0].candidate_index, 1u);
  EXPECT_EQ(partial[1].candidate_index, 2u);

  EXPECT_EQ(parse_overlap("partial"), OverlapPolicy::partial);
  EXPECT_THROW(parse_overlap("some"), ValidationError);
}

TEST(Secondary, OnlySignificantByDefault) {
  const std::vector<CandidateCluster> candidates{
      {{0}, 0, 0.0}, {{1}, 1, 0.0}, {{2}, 2, 0.0}};
  const std::vector<double> values{9.0, 8.0, 1.0};
  std::vector<double> null(99, 2.0);
  const auto out = secondary_clusters(candidates, values, 0, null);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].candidate_index, 1u);
  EXPECT_DOUBLE_EQ(out[0].p_value, 0.01);
}

// Random labelling of exchangeable data: rejection at 5% should stay near 5%.
class NullCalibration : public ::testing::TestWithParam<Method> {};

TEST_P(NullCalibration, RejectionRateWithinBinomialBand) {
  std::mt19937_64 gen(40);
  const auto grid = random_grid(gen, 24);
  const auto candidates = enumerate_candidates(grid);
  ScanOptions opt;
  opt.permutations = 999;
  int rejections = 0;
  const int replicates = 200;
  for (int r = 0; r < replicates; ++r) {
    const auto ds = to_dataset(oracle::random_curves(gen, 24, 11), oracle::uniform_grid(11));
    opt.master_seed = static_cast<std::uint64_t>(r);
    if (monte_carlo(ds, candidates, GetParam(), opt).p_value < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / replicates;
  EXPECT_GE(rate, 0.020);
  EXPECT_LE(rate, 0.080);
}

INSTANTIATE_TEST_SUITE_P(Methods, NullCalibration,
                         ::testing::Values(Method::pfss, Method::dffss, Method::npfss),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace fscan
