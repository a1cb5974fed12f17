#include <cmath>
#include <vector>

#include "doctest.h"
#include "percolab/errors.hpp"
#include "percolab/labels.hpp"

using namespace percolab;

namespace {

EnvironmentSample env_from_points(std::vector<std::int64_t> pts) {
  EnvironmentSample env;
  env.points = std::move(pts);
  env.delay_offset = env.points.front();
  for (std::size_t i = 1; i < env.points.size(); ++i)
    env.gaps.push_back(env.points[i] - env.points[i - 1]);
  return env;
}

// Independently written recursive labeler: base scale by linear point scan,
// higher scales by scanning every child pair.
std::vector<std::vector<bool>> oracle_labels(const EnvironmentSample& env,
                                             const ScaleTable& scales, int k_top,
                                             std::int64_t window) {
  std::vector<std::vector<bool>> bad(static_cast<std::size_t>(k_top) + 1);
  const std::int64_t L0 = scales.L_int(0);
  for (std::int64_t i = 0; (i + 1) * L0 <= window; ++i) {
    bool found = false;
    for (auto p : env.points)
      if (p >= i * L0 && p < (i + 1) * L0) found = true;
    bad[0].push_back(!found);
  }
  for (int k = 1; k <= k_top; ++k) {
    const std::int64_t ratio = scales.ratio[static_cast<std::size_t>(k)].get_si();
    const std::int64_t n = window / scales.L_int(k);
    for (std::int64_t i = 0; i < n; ++i) {
      bool is_bad = false;
      for (std::int64_t a = 0; a < ratio; ++a)
        for (std::int64_t b = a + 2; b < ratio; ++b)
          if (bad[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i * ratio + a)] &&
              bad[static_cast<std::size_t>(k) - 1][static_cast<std::size_t>(i * ratio + b)])
            is_bad = true;
      bad[static_cast<std::size_t>(k)].push_back(is_bad);
    }
  }
  return bad;
}

}  // namespace

TEST_CASE("unit gaps make every interval good") {
  const ScaleTable scales = scale_table(3.0, 2);
  EnvironmentSample env;
  env.points.resize(800);
  for (std::int64_t i = 0; i < 800; ++i) env.points[static_cast<std::size_t>(i)] = i;
  for (std::int64_t i = 1; i < 800; ++i) env.gaps.push_back(1);
  const LabelGrid g = label_intervals(env, scales, 0, 2, 729);
  for (int k = 0; k <= 2; ++k)
    for (std::int64_t i = 0; i < g.count(k); ++i) CHECK_FALSE(g.is_bad(k, i));
}

TEST_CASE("adjacent bad children keep the parent good, a gap does not") {
  const ScaleTable scales = scale_table(2.0, 1);  // L0 = 2, ratio 4, L1 = 8
  REQUIRE(scales.L_int(1) == 8);

  // children (B,B,G,G): no points in [0,4), points in [4,6) and [6,8)
  const EnvironmentSample bbgg = env_from_points({4, 6, 9});
  const LabelGrid g1 = label_intervals(bbgg, scales, 0, 1, 8);
  CHECK(g1.is_bad(0, 0));
  CHECK(g1.is_bad(0, 1));
  CHECK_FALSE(g1.is_bad(0, 2));
  CHECK_FALSE(g1.is_bad(0, 3));
  CHECK_FALSE(g1.is_bad(1, 0));

  // children (B,G,B,G): bads at indices 0 and 2 are non-consecutive
  const EnvironmentSample bgbg = env_from_points({3, 6, 9});
  const LabelGrid g2 = label_intervals(bgbg, scales, 0, 1, 8);
  CHECK(g2.is_bad(0, 0));
  CHECK_FALSE(g2.is_bad(0, 1));
  CHECK(g2.is_bad(0, 2));
  CHECK_FALSE(g2.is_bad(0, 3));
  CHECK(g2.is_bad(1, 0));
}

TEST_CASE("window validation") {
  const ScaleTable scales = scale_table(3.0, 1);
  const EnvironmentSample env = env_from_points({0, 5, 12});
  CHECK_THROWS_AS(label_intervals(env, scales, 0, 1, 8), WindowTooSmall);   // < L_1
  CHECK_THROWS_AS(label_intervals(env, scales, 0, 1, 54), WindowTooSmall);  // env too short
}

TEST_CASE("labeler equals the independent oracle on random environments") {
  const ScaleTable scales = scale_table(3.0, 2);
  const std::int64_t window = 2 * scales.L_int(2);
  Stream s = derive_stream(7, "labels.fuzz", 0);
  for (int rep = 0; rep < 300; ++rep) {
    EnvironmentSample env;
    env.delay_offset = static_cast<std::int64_t>(s.next_u64() % 5);
    env.points.push_back(env.delay_offset);
    while (env.points.back() < window) {
      const std::int64_t gap = 1 + static_cast<std::int64_t>(s.next_u64() % 6);
      env.gaps.push_back(gap);
      env.points.push_back(env.points.back() + gap);
    }
    const LabelGrid mine = label_intervals(env, scales, 0, 2, window);
    const auto oracle = oracle_labels(env, scales, 2, window);
    for (int k = 0; k <= 2; ++k) {
      REQUIRE(mine.count(k) == static_cast<std::int64_t>(oracle[static_cast<std::size_t>(k)].size()));
      for (std::int64_t i = 0; i < mine.count(k); ++i)
        CHECK(mine.is_bad(k, i) == oracle[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("good parents never hide split bad children") {
  // randomized property over the grid itself
  const ScaleTable scales = scale_table(3.0, 2);
  const std::int64_t window = scales.L_int(2);
  Stream s = derive_stream(8, "labels.prop", 0);
  for (int rep = 0; rep < 100; ++rep) {
    EnvironmentSample env;
    env.points.push_back(static_cast<std::int64_t>(s.next_u64() % 4));
    while (env.points.back() < window)
      env.points.push_back(env.points.back() + 1 +
                           static_cast<std::int64_t>(s.next_u64() % 7));
    const LabelGrid g = label_intervals(env, scales, 0, 2, window);
    for (int k = 1; k <= 2; ++k) {
      const std::int64_t ratio = scales.ratio[static_cast<std::size_t>(k)].get_si();
      for (std::int64_t i = 0; i < g.count(k); ++i) {
        if (g.is_bad(k, i)) continue;
        std::int64_t first = -1, last = -1;
        for (std::int64_t j = 0; j < ratio; ++j) {
          if (g.is_bad(k - 1, i * ratio + j)) {
            if (first < 0) first = j;
            last = j;
          }
        }
        if (first >= 0) CHECK(last - first <= 1);
      }
    }
  }
}

TEST_CASE("pk estimate") {
  const ScaleTable scales = scale_table(3.0, 2);

  const PkEstimate zero =
      estimate_pk(build_pmf(Deterministic{1}), scales, 1, 0, 3000, derive_stream(9, "pk", 0));
  CHECK(zero.p_hat == 0.0);

  // base scale: p_hat estimates P(rho >= L_0) exactly computable from the
  // stationary delay tails
  const IntegerPmf u25 = build_pmf(UniformRange{2, 5});
  const IntegerPmf lambda = stationary_delay(u25);
  double exact = 1.0;
  for (std::int64_t k = 0; k < scales.L_int(0); ++k) exact -= lambda.prob(k);
  const PkEstimate base =
      estimate_pk(u25, scales, 0, 0, 40000, derive_stream(9, "pk", 1));
  const double sigma = std::sqrt(exact * (1 - exact) / 40000.0);
  CHECK(std::fabs(base.p_hat - exact) <= 3.0 * sigma);
  CHECK(base.wilson.lo <= exact);
  CHECK(base.wilson.hi >= exact);
}
