#pragma once

#include <cstdint>
#include <vector>

#include "percolab/pmf.hpp"
#include "percolab/renewal.hpp"
#include "percolab/rng.hpp"

namespace percolab {

// A realized renewal environment: column positions points[i] with
// points[0] = delay_offset and points[i] - points[i-1] = gaps[i-1].
struct EnvironmentSample {
  std::vector<std::int64_t> gaps;
  std::vector<std::int64_t> points;
  std::int64_t delay_offset = 0;

  std::int64_t span() const { return points.empty() ? 0 : points.back(); }
  // renewal in [a, b)?
  bool has_point_in(std::int64_t a, std::int64_t b) const;
  bool contains(std::int64_t x) const;
};

EnvironmentSample sample_environment(const IntegerPmf& xi, std::int64_t n_gaps,
                                     const DelaySpec& delay, Stream& s);

// Draws gaps until the last renewal point passes `span`.
EnvironmentSample sample_environment_covering(const IntegerPmf& xi, std::int64_t span,
                                              const DelaySpec& delay, Stream& s);

// Same, reusing an already-built delay sampler (hot loops).
EnvironmentSample sample_environment_covering(const IntegerPmf& xi, std::int64_t span,
                                              const DelayDraw& delay, Stream& s);

// One gap per line.
std::string environment_to_text(const EnvironmentSample& env);
EnvironmentSample environment_from_text(const std::string& text);

}  // namespace percolab
