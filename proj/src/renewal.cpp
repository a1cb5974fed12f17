#include "percolab/renewal.hpp"

#include <cmath>

#include "percolab/errors.hpp"
#include "percolab/parallel.hpp"
#include "percolab/stats.hpp"

namespace percolab {

DelayDraw::DelayDraw(const IntegerPmf& xi, const DelaySpec& d) {
  if (std::holds_alternative<FixedDelay>(d)) {
    fixed_ = std::get<FixedDelay>(d).m;
    if (fixed_ < 0) throw InvalidSpec("fixed delay must be nonnegative");
  } else {
    lambda_ = stationary_delay(xi);
  }
}

std::int64_t DelayDraw::operator()(Stream& s) const {
  if (fixed_ >= 0) return fixed_;
  return lambda_->sample(s);
}

bool zpath_valid(const ZPath& path, const IntegerPmf& xi) {
  for (std::size_t t = 1; t < path.states.size(); ++t) {
    const std::int64_t prev = path.states[t - 1];
    const std::int64_t cur = path.states[t];
    if (prev > 0) {
      if (cur != prev - 1) return false;
    } else {
      if (cur < 0 || xi.prob(cur + 1) <= 0.0) return false;
    }
  }
  return true;
}

std::int64_t step_z(const IntegerPmf& xi, std::int64_t state, double u) {
  if (state > 0) return state - 1;
  return xi.sample(u) - 1;
}

ZPath sample_z_path(const IntegerPmf& xi, const DelaySpec& delay, std::int64_t n, Stream& s) {
  if (n < 0) throw InvalidSpec("path length must be nonnegative");
  DelayDraw draw(xi, delay);
  ZPath path;
  path.states.reserve(static_cast<std::size_t>(n) + 1);
  std::int64_t z = draw(s);
  path.states.push_back(z);
  for (std::int64_t t = 0; t < n; ++t) {
    z = z > 0 ? z - 1 : xi.sample(s) - 1;
    path.states.push_back(z);
  }
  return path;
}

CouplingOutcome coupling_time(const IntegerPmf& xi, const DelaySpec& d1, const DelaySpec& d2,
                              Stream& s, std::int64_t cap) {
  if (cap < 1) throw InvalidSpec("cap must be >= 1");
  DelayDraw draw1(xi, d1), draw2(xi, d2);
  std::int64_t z1 = draw1(s);
  std::int64_t z2 = draw2(s);
  for (std::int64_t k = 1; k <= cap; ++k) {
    z1 = z1 > 0 ? z1 - 1 : xi.sample(s) - 1;
    z2 = z2 > 0 ? z2 - 1 : xi.sample(s) - 1;
    if (z1 == 0 && z2 == 0) return CouplingOutcome::Coupled(k);
  }
  return CouplingOutcome::Censored(cap);
}

C1Estimate estimate_c1(const IntegerPmf& xi, const WeightFunction& w, std::uint64_t trials,
                       std::int64_t cap, Stream s, unsigned workers) {
  if (!xi.aperiodic()) throw InvalidSpec("c1 estimation needs an aperiodic law");
  moment_xi_fc(xi, w);  // throws Diverges when the moment hypothesis fails

  C1Estimate est;
  est.trials = trials;
  est.cap = cap;
  const MomentResult rho = moment_rho_fc(xi, w);
  est.moment_rho = rho.value;
  est.moment_rho_err = rho.error_bound;

  const IntegerPmf lambda = stationary_delay(xi);
  struct TrialOut {
    double fct;
    std::uint8_t censored;
  };
  auto run = [&](std::uint64_t i) -> TrialOut {
    Stream t = s.substream(i);
    std::int64_t z1 = 0;  // Fixed(0) delay per the decoupling argument
    std::int64_t z2 = lambda.sample(t);
    for (std::int64_t k = 1; k <= cap; ++k) {
      z1 = z1 > 0 ? z1 - 1 : xi.sample(t) - 1;
      z2 = z2 > 0 ? z2 - 1 : xi.sample(t) - 1;
      if (z1 == 0 && z2 == 0) return {w(static_cast<double>(k)), 0};
    }
    return {w(static_cast<double>(cap)), 1};
  };
  const std::vector<TrialOut> out = map_trials<TrialOut>(trials, workers, run);

  OnlineStats acc;
  std::uint64_t censored = 0;
  for (const auto& o : out) {
    acc.add(o.fct);
    censored += o.censored;
  }
  est.moment_T = acc.mean;
  est.moment_T_se = acc.stderr_mean();
  est.censor_fraction =
      trials ? static_cast<double>(censored) / static_cast<double>(trials) : 0.0;
  est.c1 = est.moment_rho + est.moment_T;
  return est;
}

double stationarity_tv(const IntegerPmf& xi, std::int64_t n, std::uint64_t trials,
                       std::int64_t support_cap, Stream s, unsigned workers) {
  const IntegerPmf lambda = stationary_delay(xi);
  const std::size_t cells = static_cast<std::size_t>(support_cap) + 2;  // last cell lumps the rest

  auto run = [&](std::uint64_t i) -> std::uint32_t {
    Stream t = s.substream(i);
    std::int64_t z = lambda.sample(t);
    for (std::int64_t k = 0; k < n; ++k) z = z > 0 ? z - 1 : xi.sample(t) - 1;
    return static_cast<std::uint32_t>(std::min<std::int64_t>(z, support_cap + 1));
  };
  const std::vector<std::uint32_t> out = map_trials<std::uint32_t>(trials, workers, run);

  std::vector<double> emp(cells, 0.0);
  for (auto c : out) emp[c] += 1.0;
  for (auto& e : emp) e /= static_cast<double>(trials);

  std::vector<double> exact(cells, 0.0);
  double used = 0.0;
  for (std::int64_t k = 0; k <= support_cap; ++k) {
    exact[static_cast<std::size_t>(k)] = lambda.prob(k);
    used += lambda.prob(k);
  }
  exact[cells - 1] = std::max(0.0, 1.0 - used);
  return tv_distance(emp, exact);
}

}  // namespace percolab
