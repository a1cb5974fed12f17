#pragma once

#include <cstdint>
#include <vector>

#include "percolab/pmf.hpp"
#include "percolab/renewal.hpp"
#include "percolab/rng.hpp"

namespace percolab {

// Event DSL: conjunctions of coordinate threshold tests on a Z path. Rich
// enough to separate sigma-algebras, simple enough to brute-force.
struct CoordTest {
  std::int64_t index;
  enum class Op { LE, EQ } op;
  std::int64_t value;
};

struct CoordEvent {
  std::vector<CoordTest> tests;

  bool eval(const std::vector<std::int64_t>& path) const {
    for (const auto& t : tests) {
      const std::int64_t z = path[static_cast<std::size_t>(t.index)];
      if (t.op == CoordTest::Op::LE ? z > t.value : z != t.value) return false;
    }
    return true;
  }
  std::int64_t max_index() const {
    std::int64_t m = 0;
    for (const auto& t : tests) m = std::max(m, t.index);
    return m;
  }
  std::int64_t min_index() const {
    std::int64_t m = tests.empty() ? 0 : tests.front().index;
    for (const auto& t : tests) m = std::min(m, t.index);
    return m;
  }
};

struct GapReport {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_ab = 0.0;
  double gap = 0.0;     // estimate of mu(A and B) - mu(A) mu(B)
  double se = 0.0;      // influence-function standard error of the gap
  double bound = 0.0;   // c1 / F_c(n)
  std::uint64_t trials = 0;
};

// Estimates the decoupling gap for events A on Z_0..Z_m and B on
// coordinates >= m+2n, under the stationary start.
GapReport decoupling_gap(const IntegerPmf& xi, const WeightFunction& w, double c1,
                         std::int64_t m, std::int64_t n, const CoordEvent& a,
                         const CoordEvent& b, std::uint64_t trials, Stream s,
                         unsigned workers = 1);

// Exact joint law of (Z_0..Z_h) event probabilities by kernel iteration;
// usable while the reachable state space stays small.
struct ExactEventProbs {
  double p_a, p_b, p_ab;
};
ExactEventProbs exact_event_probs(const IntegerPmf& xi, const CoordEvent& a, const CoordEvent& b,
                                  std::int64_t horizon);

}  // namespace percolab
