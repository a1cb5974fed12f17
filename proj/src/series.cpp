#include "percolab/series.hpp"

#include <algorithm>
#include <cmath>

#include "percolab/errors.hpp"

namespace percolab {
namespace {

// Euler-Maclaurin tail for f(x) = x^(-s) from integer point m:
//   sum_{k>=m} k^(-s) = m^(1-s)/(s-1) + m^(-s)/2 + s m^(-s-1)/12
//                       - s(s+1)(s+2) m^(-s-3)/720 + R,
//   |R| <= s(s+1)(s+2)(s+3)(s+4) m^(-s-5)/30240.
Bracket em_power_tail(double s, double m) {
  const double a = std::pow(m, 1.0 - s) / (s - 1.0);
  const double b = 0.5 * std::pow(m, -s);
  const double c1 = s * std::pow(m, -s - 1.0) / 12.0;
  const double c3 = s * (s + 1.0) * (s + 2.0) * std::pow(m, -s - 3.0) / 720.0;
  const double err =
      s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(m, -s - 5.0) / 30240.0;
  const double v = a + b + c1 - c3;
  return {v - err, v + err};
}

// exp(x^2)*erfc(x) for x >= 0, bracketed. Small x: direct product; large x:
// the alternating asymptotic series, truncation bounded by the next term.
Bracket erfcx_bracket(double x) {
  if (x < 6.0) {
    const double v = std::exp(x * x) * std::erfc(x);
    return {v * (1.0 - 1e-13), v * (1.0 + 1e-13)};
  }
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double even = 1.0, odd = 1.0;  // partial sums with even/odd term counts
  double sum = 1.0;
  for (int j = 1; j <= 8; ++j) {
    term *= -(2.0 * j - 1.0) * inv2x2;
    sum += term;
    if (j % 2 == 0)
      even = sum;
    else
      odd = sum;
  }
  const double base = 1.0 / (x * 1.7724538509055160273);  // 1/(x*sqrt(pi))
  return {base * std::min(even, odd), base * std::max(even, odd)};
}

double log_weighted_power(double s, double c, double x) {
  const double u = std::log(x);
  return -s * u + c * std::sqrt(u);
}

// Integral_n^inf x^(-s) exp(c sqrt(log x)) dx, for s > 1, n >= 2.
// With u = log x, t = sqrt(u), b = s-1, g = c/(2b):
//   I = e^(c^2/(4b)) * [ e^(-b(T-g)^2)/b + g sqrt(pi/b) erfc(sqrt(b)(T-g)) ],
// where T = sqrt(log n).
Bracket weighted_power_integral(double s, double c, double n) {
  const double b = s - 1.0;
  const double g = c / (2.0 * b);
  const double T = std::sqrt(std::log(n));
  const double z = std::sqrt(b) * (T - g);
  const double peak = c * c / (4.0 * b);
  const double sqrt_pi_over_b = std::sqrt(3.141592653589793 / b);

  if (z <= 0.0) {
    // erfc(z) in [1,2]; evaluate directly, scale is moderate here.
    const double v = std::exp(peak) * (std::exp(-b * (T - g) * (T - g)) / b +
                                       g * sqrt_pi_over_b * std::erfc(z));
    return {v * (1.0 - 1e-12), v * (1.0 + 1e-12)};
  }
  // exp(peak)*erfc(z) = exp(peak - z^2)*erfcx(z); peak - z^2 = -bT^2 + cT.
  const double expo = -b * T * T + c * T;
  const Bracket ex = erfcx_bracket(z);
  const double head = std::exp(expo) / b;  // e^(peak) e^(-b(T-g)^2) / b
  const double tail_lo = g * sqrt_pi_over_b * std::exp(expo) * ex.lo;
  const double tail_hi = g * sqrt_pi_over_b * std::exp(expo) * ex.hi;
  return {(head + tail_lo) * (1.0 - 1e-12), (head + tail_hi) * (1.0 + 1e-12)};
}

Bracket weighted_tail_impl(double s, double c, std::uint64_t n) {
  if (s <= 1.0) throw Diverges("weighted power tail needs exponent > 1");
  if (c == 0.0) {
    if (n < 2) {
      Bracket t = em_power_tail(s, 66.0);
      double head = 0.0;
      for (std::uint64_t k = std::max<std::uint64_t>(n, 1); k < 66; ++k)
        head += std::pow(static_cast<double>(k), -s);
      return {t.lo + head, t.hi + head};
    }
    double head = 0.0;
    std::uint64_t m = n;
    for (int i = 0; i < 64; ++i, ++m) head += std::pow(static_cast<double>(m), -s);
    Bracket t = em_power_tail(s, static_cast<double>(m));
    return {t.lo + head, t.hi + head};
  }

  const std::uint64_t start = std::max<std::uint64_t>(n, 2);
  double head = 0.0;
  if (n < start) head += 1.0;  // k = 1 contributes exp(0) * 1 = 1

  // The summand peaks at x_dec = exp((c/(2s))^2); past it the summand
  // decreases and the sum/integral bracket costs one column of height f.
  // Summing an explicit block first keeps that column below ~0.1% of the
  // remainder; when the peak lies further out, sum up to it (capped).
  const double x_dec_log = (c / (2.0 * s)) * (c / (2.0 * s));
  const double x_dec = std::exp(std::min(x_dec_log, 700.0));
  std::uint64_t explicit_to = start + 4096;
  if (x_dec > static_cast<double>(explicit_to)) {
    explicit_to = static_cast<std::uint64_t>(
        std::min(x_dec + 2.0, static_cast<double>(start) + 2097152.0));
  }
  for (std::uint64_t k = start; k < explicit_to; ++k)
    head += std::exp(log_weighted_power(s, c, static_cast<double>(k)));

  const double m = static_cast<double>(explicit_to);
  Bracket integ = weighted_power_integral(s, c, m);
  const double f_m = std::exp(log_weighted_power(s, c, m));
  double slack = f_m;
  if (x_dec > m) slack += 2.0 * std::exp(log_weighted_power(s, c, x_dec));
  return {head + std::max(0.0, integ.lo - slack), head + integ.hi + slack};
}

}  // namespace

Bracket power_tail_sum(double s, std::uint64_t n) {
  if (s <= 1.0) throw Diverges("power tail sum needs exponent > 1");
  return weighted_tail_impl(s, 0.0, n);
}

Bracket weighted_power_tail(double s, double c, std::uint64_t n) {
  return weighted_tail_impl(s, c, n);
}

Bracket weighted_power_tail_mean(double s, double c, std::uint64_t n) {
  if (s <= 2.0) throw Diverges("mean-weighted power tail needs exponent > 2");
  return weighted_tail_impl(s - 1.0, c, n);
}

}  // namespace percolab
