#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "percolab/rng.hpp"
#include "percolab/series.hpp"

namespace percolab {

// F_c(x) = exp(c sqrt(log x)) for x >= 1, extended by 1 on [0,1) so that
// indicator algebra like E[F_c(rho) 1{rho>=1}] stays exact.
struct WeightFunction {
  double c;

  double operator()(double x) const;
  double log_value(double x) const;  // log F_c(x), 0 for x < 1
  // ctilde = max{ exp((log 2 / c)^2), exp(1/2) }
  double ctilde() const;
};

double weight_fc(const WeightFunction& w, double x);

// Closed-form parametric tails. Head atoms are explicit; everything from
// `start` on is given by the stated formula.
struct GeometricTail {
  std::int64_t start;
  double ratio;  // in (0,1)
  double scale;  // P(k) = scale * ratio^(k-start)
};
struct PowerTail {
  std::int64_t start;
  double exponent;  // P(k) = scale * k^(-exponent)
  double scale;
};
using Tail = std::variant<std::monostate, GeometricTail, PowerTail>;

// A probability law on integers >= min_support with explicit head and
// parametric tail.
class IntegerPmf {
 public:
  IntegerPmf() = default;
  IntegerPmf(std::vector<std::int64_t> values, std::vector<double> probs, Tail tail,
             std::int64_t min_support = 1);

  const std::vector<std::int64_t>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  const Tail& tail() const { return tail_; }
  bool has_tail() const { return !std::holds_alternative<std::monostate>(tail_); }
  bool approx_tail() const { return approx_tail_; }
  void mark_approx_tail() { approx_tail_ = true; }

  double prob(std::int64_t k) const;
  // P(X >= n), closed form on the tail.
  Bracket tail_sum(std::int64_t n) const;
  double head_mass() const { return head_mass_; }
  Bracket tail_mass() const;

  std::int64_t min_value() const;
  // Largest head atom (tail, when present, extends beyond it).
  std::int64_t max_head_value() const { return values_.empty() ? 0 : values_.back(); }
  bool aperiodic() const;

  // Inverse-transform sample: the unique k with CDF(k-1) <= u < CDF(k).
  // Monotone in u, which is what every pathwise coupling here relies on.
  std::int64_t sample(double u) const;
  std::int64_t sample(Stream& s) const { return sample(s.next_unit()); }

 private:
  std::vector<std::int64_t> values_;
  std::vector<double> probs_;
  std::vector<double> cum_;
  std::vector<std::uint32_t> guide_;  // bucketed index into cum_ for O(1) search
  Tail tail_;
  double head_mass_ = 0.0;
  bool approx_tail_ = false;

  void build_guide();
};

// Admissible interarrival laws.
struct Deterministic {
  std::int64_t d;
};
struct UniformRange {
  std::int64_t a, b;
};
struct Zeta {
  double s;             // P(k) proportional to k^(-s), k >= 1, s > 2
  std::int64_t cutoff;  // head is explicit up to here; tail is parametric
};
struct BorderlineLog {
  double c;
  double eps;
  std::int64_t cutoff;  // support starts here, >= 3
  // unnormalized mass k^(-2) F_c(k)^(-1) (log k)^(-(1+eps)) for k >= cutoff
};
using DistributionSpec = std::variant<Deterministic, UniformRange, Zeta, BorderlineLog>;

std::string spec_family(const DistributionSpec& spec);

IntegerPmf build_pmf(const DistributionSpec& spec);

// E(xi) with certified truncation error; throws InfiniteMean if the
// tail-sum test diverges.
double mean_xi(const IntegerPmf& pmf);
Bracket mean_xi_bracket(const IntegerPmf& pmf);

struct MomentResult {
  double value;
  double error_bound;  // certified half-width of the enclosure
};

// E(xi F_c(xi) 1{xi>=1}); throws Diverges when the tail comparison test
// fails, i.e. the law is outside the admissible moment class.
MomentResult moment_xi_fc(const IntegerPmf& pmf, const WeightFunction& w);

// Law of the stationary delay rho: lambda_k = (1/E xi) sum_{i>k} P(xi=i).
IntegerPmf stationary_delay(const IntegerPmf& pmf);

// E(F_c(rho) 1{rho>=1}).
MomentResult moment_rho_fc(const IntegerPmf& pmf, const WeightFunction& w);

// Aperiodic integer lift: with a1 < a2 the two smallest support atoms and
// a0 = max{a2, ceil(ctilde)} + 1,
//   lifted = k        for atoms k > a0,
//          = a0       for xi in (a1, a0],
//          = a0 - 1   for xi <= a1.
// The lift dominates xi pathwise under inverse-transform coupling and its
// support {a0-1, a0} makes it aperiodic with all values > ctilde.
struct LiftReport {
  std::int64_t a1 = 0;
  std::int64_t a2 = 0;
  std::int64_t a0 = 0;
  bool ctilde_binds = false;  // ceil(ctilde) >= a2 decided a0
  IntegerPmf lifted;
};

LiftReport aperiodic_lift(const IntegerPmf& pmf, const WeightFunction& w);

// Serialization.
std::string spec_to_json(const DistributionSpec& spec);
DistributionSpec spec_from_json(const std::string& json_text);
std::string pmf_to_csv(const IntegerPmf& pmf, std::size_t max_rows = 10000);

}  // namespace percolab
