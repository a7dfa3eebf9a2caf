#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "fscan/error.hpp"
#include "fscan/indices.hpp"
#include "oracles.hpp"

namespace fscan {
namespace {

using testing::constant_curves;
using testing::to_dataset;
using testing::window_of;

std::vector<std::size_t> random_window(std::mt19937_64& gen, std::size_t n) {
  std::uniform_int_distribution<std::size_t> size(1, n - 1);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(size(gen));
  std::sort(all.begin(), all.end());
  return all;
}

TEST(Method, ParseAndPrint) {
  for (Method m : {Method::pfss, Method::dffss, Method::npfss}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_method("PFSS"), ValidationError);
  EXPECT_THROW(parse_method("all"), ValidationError);
}

TEST(Pfss, HandComputedConstants) {
  const auto ds = constant_curves({0.0, 1.0, 2.0, 3.0});
  const auto v = pfss_index(ds, window_of({1, 3}));
  EXPECT_EQ(v.method, Method::pfss);
  EXPECT_NEAR(v.value, 0.5, 1e-14);
  EXPECT_NEAR(oracle::anova_f({1.0, 3.0}, {0.0, 2.0}), 0.5, 1e-15);
}

TEST(Pfss, EqualMeansGiveZero) {
  const auto ds = constant_curves({0.0, 2.0, 0.0, 2.0});
  EXPECT_NEAR(pfss_index(ds, window_of({0, 1})).value, 0.0, 1e-15);
}

TEST(Pfss, MatchesNaiveOracle) {
  std::mt19937_64 gen(21);
  const auto grid = oracle::uniform_grid(21);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::random_curves(gen, 10, 21);
    const auto ds = to_dataset(x, grid);
    const auto w = random_window(gen, 10);
    EXPECT_NEAR(pfss_index(ds, window_of(w)).value, oracle::pfss(x, w, grid),
                1e-12);
  }
}

TEST(Pfss, DegenerateDenominator) {
  EXPECT_THROW(pfss_index(constant_curves({2.0, 2.0, 2.0}), window_of({0})),
               DegenerateDataError);
  EXPECT_THROW(pfss_index(constant_curves({1.0, 1.0, 5.0, 5.0}), window_of({0, 1})),
               DegenerateDataError);
}

TEST(Pfss, ValidatesWindow) {
  const auto ds = constant_curves({0.0, 1.0, 2.0});
  EXPECT_THROW(pfss_index(ds, window_of({})), ValidationError);
  EXPECT_THROW(pfss_index(ds, window_of({0, 1, 2})), ValidationError);
  EXPECT_THROW(pfss_index(constant_curves({0.0, 1.0}), window_of({0})),
               ValidationError);
}

TEST(Pfss, ConstantCurvesEqualScalarAnova) {
  std::mt19937_64 gen(22);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> levels(12);
    for (double& v : levels) v = z(gen);
    const auto w = random_window(gen, 12);
    std::vector<double> in, out;
    for (std::size_t i = 0; i < 12; ++i) {
      (std::find(w.begin(), w.end(), i) != w.end() ? in : out).push_back(levels[i]);
    }
    EXPECT_NEAR(pfss_index(constant_curves(levels), window_of(w)).value,
                oracle::anova_f(in, out), 1e-12);
  }
}

TEST(Pfss, LocationAndScaleInvariance) {
  std::mt19937_64 gen(23);
  const auto grid = oracle::uniform_grid(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto x = oracle::random_curves(gen, 11, 17);
    const auto w = random_window(gen, 11);
    const double base = pfss_index(to_dataset(x, grid), window_of(w)).value;
    const double lambda = rep % 2 ? -3.7 : 0.25;
    for (auto& row : x) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        row[k] = lambda * row[k] + 4.0 * std::cos(3.0 * grid[k]) + 10.0;
      }
    }
    EXPECT_NEAR(pfss_index(to_dataset(x, grid), window_of(w)).value, base,
                1e-10 * std::max(1.0, base));
  }
}

TEST(Dffss, HandComputedConstants) {
  const auto ds = constant_curves({0.0, 1.0, 2.0, 3.0});
  const auto v = dffss_index(ds, window_of({1, 3}));
  EXPECT_NEAR(v.value, 1.0 / std::sqrt(2.0), 1e-14);
  ASSERT_TRUE(v.argmax_time.has_value());
  EXPECT_EQ(*v.argmax_time, 0.0);
  EXPECT_FALSE(v.perfect_separation);
}

TEST(Dffss, IdenticalCurvesGiveZero) {
  const auto v = dffss_index(constant_curves({3.0, 3.0, 3.0, 3.0}), window_of({2}));
  EXPECT_EQ(v.value, 0.0);
  EXPECT_FALSE(v.perfect_separation);
}

TEST(Dffss, PerfectSeparationIsFlagged) {
  const auto v = dffss_index(constant_curves({1.0, 1.0, 5.0, 5.0}), window_of({0, 1}));
  EXPECT_TRUE(v.perfect_separation);
  EXPECT_EQ(v.value, kPerfectSeparation);
  EXPECT_TRUE(std::isfinite(v.value));
}

TEST(Dffss, MatchesStudentizedOracle) {
  std::mt19937_64 gen(24);
  for (int rep = 0; rep < 20; ++rep) {
    const auto x = oracle::random_curves(gen, 9, 13);
    const auto ds = to_dataset(x, oracle::uniform_grid(13));
    const auto w = random_window(gen, 9);
    EXPECT_NEAR(dffss_index(ds, window_of(w)).value, oracle::dffss(x, w), 1e-12);
  }
}

TEST(Dffss, ArgmaxIsGridTimeOfLargestPointwiseValue) {
  // Only the third grid time separates the groups.
  oracle::Curves x{{0, 0, 1, 0}, {0, 1, 1.2, 0}, {1, 0, -1, 1}, {0, 0, -1.3, 0},
                   {1, 1, -0.9, 1}};
  const oracle::Curve grid{0.0, 0.25, 0.5, 1.0};
  const auto v = dffss_index(to_dataset(x, grid), window_of({0, 1}));
  ASSERT_TRUE(v.argmax_time.has_value());
  EXPECT_EQ(*v.argmax_time, 0.5);
}

TEST(Dffss, PointwiseAffineInvariance) {
  std::mt19937_64 gen(25);
  const auto grid = oracle::uniform_grid(19);
  for (int rep = 0; rep < 10; ++rep) {
    auto x = oracle::random_curves(gen, 10, 19);
    const auto w = random_window(gen, 10);
    const double base = dffss_index(to_dataset(x, grid), window_of(w)).value;
    for (auto& row : x) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        const double a = 0.1 + 5.0 * grid[k] * grid[k];
        const double b = std::sin(9.0 * grid[k]) - 2.0;
        row[k] = a * row[k] + b;
      }
    }
    EXPECT_NEAR(dffss_index(to_dataset(x, grid), window_of(w)).value, base, 1e-10);
  }
}

TEST(SignMatrix, TwoCurvesHandComputed) {
  const auto ds = constant_curves({0.0, 1.0}, 11);
  const auto sm = build_sign_matrix(ds);
  ASSERT_EQ(sm.size(), 2u);
  for (std::size_t k = 0; k < 11; ++k) {
    EXPECT_NEAR(sm.row(0)[k], 1.0, 1e-15);
    EXPECT_NEAR(sm.row(1)[k], -1.0, 1e-15);
  }
  EXPECT_NEAR(sm.pair_norm(0, 1), 1.0, 1e-15);
  EXPECT_EQ(sm.pair_norm(1, 0), sm.pair_norm(0, 1));
}

TEST(SignMatrix, IdenticalCurvesGiveZeroRows) {
  const auto sm = build_sign_matrix(constant_curves({0.5, 0.5, 0.5}));
  for (std::size_t i = 0; i < 3; ++i) {
    for (double v : sm.row(i)) EXPECT_EQ(v, 0.0);
  }
}

TEST(SignMatrix, RowsSumToZero) {
  std::mt19937_64 gen(26);
  for (int rep = 0; rep < 10; ++rep) {
    const auto x = oracle::random_curves(gen, 15, 30);
    const auto sm = build_sign_matrix(to_dataset(x, oracle::uniform_grid(30)));
    for (std::size_t k = 0; k < 30; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < 15; ++i) s += sm.row(i)[k];
      EXPECT_NEAR(s, 0.0, 1e-10);
    }
  }
}

TEST(Npfss, TwoCurvesHandComputed) {
  const auto sm = build_sign_matrix(constant_curves({0.0, 1.0}, 11));
  EXPECT_NEAR(npfss_index(sm, window_of({0})).value, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Npfss, IdenticalCurvesGiveZero) {
  const auto sm = build_sign_matrix(constant_curves({1.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(npfss_index(sm, window_of({0})).value, 0.0);
  EXPECT_EQ(npfss_index(sm, window_of({1, 3})).value, 0.0);
}

TEST(Npfss, SignMatrixMatchesDoubleSum) {
  std::mt19937_64 gen(27);
  std::uniform_int_distribution<std::size_t> n_dist(3, 20), t_dist(5, 40);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = n_dist(gen), t = t_dist(gen);
    const auto grid = oracle::uniform_grid(t);
    auto x = oracle::random_curves(gen, n, t);
    x[n - 1] = x[0];  // an identical pair contributes nothing
    const auto ds = to_dataset(x, grid);
    const auto sm = build_sign_matrix(ds);
    for (int k = 0; k < 5; ++k) {
      const auto w = random_window(gen, n);
      const double fast = npfss_index(sm, window_of(w)).value;
      EXPECT_NEAR(fast, oracle::npfss(x, w, grid), 1e-10);
      EXPECT_NEAR(fast, npfss_index_naive(ds, window_of(w)), 1e-10);
    }
  }
}

TEST(Npfss, PositiveScaleInvariance) {
  std::mt19937_64 gen(28);
  const auto grid = oracle::uniform_grid(12);
  auto x = oracle::random_curves(gen, 10, 12);
  const auto w = random_window(gen, 10);
  const double base = npfss_index(build_sign_matrix(to_dataset(x, grid)), window_of(w)).value;
  for (auto& row : x) {
    for (double& v : row) v *= 123.4;
  }
  EXPECT_NEAR(npfss_index(build_sign_matrix(to_dataset(x, grid)), window_of(w)).value,
              base, 1e-10);
}

TEST(Npfss, ValidatesWindow) {
  const auto sm = build_sign_matrix(constant_curves({0.0, 1.0, 2.0}));
  EXPECT_THROW(npfss_index(sm, window_of({})), ValidationError);
  EXPECT_THROW(npfss_index(sm, window_of({0, 1, 2})), ValidationError);
}

}  // namespace
}  // namespace fscan
