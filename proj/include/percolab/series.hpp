#pragma once

#include <cstdint>

namespace percolab {

// Two-sided enclosure of a nonnegative series value. lo/hi are evaluated in
// double arithmetic from mathematically valid bounds.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }

  Bracket operator+(const Bracket& o) const { return {lo + o.lo, hi + o.hi}; }
  Bracket operator*(double c) const { return c >= 0 ? Bracket{lo * c, hi * c} : Bracket{hi * c, lo * c}; }
  Bracket& operator+=(const Bracket& o) {
    lo += o.lo;
    hi += o.hi;
    return *this;
  }
};

inline Bracket exact_bracket(double v) { return {v, v}; }

// Sum_{k>=n} k^(-s) for s > 1, via 64 explicit terms plus an
// Euler-Maclaurin tail whose error is below the first omitted term.
Bracket power_tail_sum(double s, std::uint64_t n);

// Sum_{k>=n} k^(-s) * exp(c*sqrt(log k)) for s > 1, c >= 0. Uses the
// closed-form integral (erfc after completing the square in u = log x)
// bracketed by the unimodality of the summand.
Bracket weighted_power_tail(double s, double c, std::uint64_t n);

// Sum_{k>=n} k^(1-s) * exp(c*sqrt(log k)), finite iff s > 2.
Bracket weighted_power_tail_mean(double s, double c, std::uint64_t n);

}  // namespace percolab
