#pragma once

#include <cstdint>
#include <vector>

#include "percolab/environment.hpp"
#include "percolab/scales.hpp"
#include "percolab/stats.hpp"

namespace percolab {

// Per-scale good/bad bits over the k-intervals I_i^k = [i L_k, (i+1) L_k).
// Base scale: bad iff the interval holds no renewal point. Higher scales:
// bad iff two bad children exist with non-adjacent indices.
struct LabelGrid {
  int k_base = 0;
  int k_top = 0;
  std::vector<std::vector<std::uint8_t>> bad;  // bad[k - k_base][i]

  bool is_bad(int k, std::int64_t i) const {
    return bad[static_cast<std::size_t>(k - k_base)][static_cast<std::size_t>(i)] != 0;
  }
  std::int64_t count(int k) const {
    return static_cast<std::int64_t>(bad[static_cast<std::size_t>(k - k_base)].size());
  }
};

LabelGrid label_intervals(const EnvironmentSample& env, const ScaleTable& scales, int k_base,
                          int k_top, std::int64_t window);

struct PkEstimate {
  int k = 0;
  double p_hat = 0.0;
  Interval wilson;
  std::uint64_t trials = 0;
};

// Monte Carlo estimate of P(I_0^k is bad) under the stationary start.
PkEstimate estimate_pk(const IntegerPmf& xi, const ScaleTable& scales, int k, int k_base,
                       std::uint64_t trials, Stream s, unsigned workers = 1);

}  // namespace percolab
