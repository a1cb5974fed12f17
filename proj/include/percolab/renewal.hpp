#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "percolab/pmf.hpp"
#include "percolab/rng.hpp"

namespace percolab {

struct FixedDelay {
  std::int64_t m;
};
struct StationaryDelay {};
using DelaySpec = std::variant<FixedDelay, StationaryDelay>;

// Resolves a DelaySpec to draws, building the stationary law once.
class DelayDraw {
 public:
  DelayDraw(const IntegerPmf& xi, const DelaySpec& d);
  std::int64_t operator()(Stream& s) const;

 private:
  std::int64_t fixed_ = -1;
  std::optional<IntegerPmf> lambda_;
};

// Residual-time chain: Z decrements to 0, then refreshes to xi - 1.
struct ZPath {
  std::vector<std::int64_t> states;
};

// Checks the Markov kernel support constraint for every transition.
bool zpath_valid(const ZPath& path, const IntegerPmf& xi);

std::int64_t step_z(const IntegerPmf& xi, std::int64_t state, double u);

ZPath sample_z_path(const IntegerPmf& xi, const DelaySpec& delay, std::int64_t n, Stream& s);

struct CouplingOutcome {
  bool coupled = false;
  std::int64_t value = 0;  // T when coupled, the cap otherwise

  static CouplingOutcome Coupled(std::int64_t t) { return {true, t}; }
  static CouplingOutcome Censored(std::int64_t cap) { return {false, cap}; }
};

// First index k >= 1 with both independent chains at 0, censored at cap.
CouplingOutcome coupling_time(const IntegerPmf& xi, const DelaySpec& d1, const DelaySpec& d2,
                              Stream& s, std::int64_t cap);

struct C1Estimate {
  double moment_rho = 0.0;      // exact series value of E F_c(rho) 1{rho>=1}
  double moment_rho_err = 0.0;  // certified enclosure half-width
  double moment_T = 0.0;        // Monte Carlo E F_c(T) 1{T>=1}; censored trials
                                // contribute F_c(cap), a pessimistic lower bound
  double moment_T_se = 0.0;
  double c1 = 0.0;  // moment_rho + moment_T
  double censor_fraction = 0.0;
  std::uint64_t trials = 0;
  std::int64_t cap = 0;

  double upper_ci(double z = 3.0) const {
    return moment_rho + moment_rho_err + moment_T + z * moment_T_se;
  }
};

// c1 = E F_c(rho) + E F_c(T) for the delay pair (Fixed(0), Stationary).
C1Estimate estimate_c1(const IntegerPmf& xi, const WeightFunction& w, std::uint64_t trials,
                       std::int64_t cap, Stream s, unsigned workers = 1);

// TV distance between the empirical law of Z_n under a stationary start and
// the stationary delay law, restricted to [0, support_cap] with the leftover
// mass lumped into one cell.
double stationarity_tv(const IntegerPmf& xi, std::int64_t n, std::uint64_t trials,
                       std::int64_t support_cap, Stream s, unsigned workers = 1);

}  // namespace percolab
