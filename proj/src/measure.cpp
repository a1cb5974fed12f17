#include "percolab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "percolab/errors.hpp"
#include "percolab/parallel.hpp"

namespace percolab {

namespace {

// Rejection-samples a stationary environment whose label grid makes the
// first `need_good` k-intervals good. Counts attempts into `attempts`.
EnvironmentSample conditioned_environment(const IntegerPmf& xi, const DelayDraw& delay,
                                          const ScaleTable& scales, int k, int need_good,
                                          std::int64_t window, Stream& t,
                                          std::uint64_t* attempts) {
  for (;;) {
    ++*attempts;
    EnvironmentSample env = sample_environment_covering(xi, window, delay, t);
    const LabelGrid g = label_intervals(env, scales, 0, k, window);
    bool ok = true;
    for (int i = 0; i < need_good && ok; ++i) ok = !g.is_bad(k, i);
    if (ok) return env;
    if (*attempts > 20000) throw ConditioningFailed("good-interval acceptance below 1e-4");
  }
}

}  // namespace

QkEstimate estimate_qk(const IntegerPmf& xi, double p, int k, std::uint64_t trials, Stream s,
                       const ScaleTable& scales, const HeightTable& heights, unsigned workers) {
  const std::int64_t L = scales.L_int(k);
  const std::int64_t H = heights.H_int(k);
  const DelayDraw delay(xi, StationaryDelay{});

  struct Out {
    std::uint8_t h_fail, v_fail;
    std::uint32_t attempts_h, attempts_v;
  };
  auto run = [&](std::uint64_t i) -> Out {
    Stream t = s.substream(i);
    Out o{0, 0, 0, 0};
    {
      std::uint64_t att = 0;
      const EnvironmentSample env =
          conditioned_environment(xi, delay, scales, k, 2, 2 * L, t, &att);
      o.attempts_h = static_cast<std::uint32_t>(att);
      const WindowConfig win{2 * L, H, Formulation::UnitColumns};
      const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
      o.h_fail = static_cast<std::uint8_t>(!event_H(cfg, 0, 0, k, scales, heights));
    }
    {
      std::uint64_t att = 0;
      const EnvironmentSample env =
          conditioned_environment(xi, delay, scales, k, 1, L, t, &att);
      o.attempts_v = static_cast<std::uint32_t>(att);
      const WindowConfig win{L, 2 * H, Formulation::UnitColumns};
      const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
      o.v_fail = static_cast<std::uint8_t>(!event_V(cfg, 0, 0, k, scales, heights));
    }
    return o;
  };
  const std::vector<Out> out = map_trials<Out>(trials, workers, run);

  QkEstimate est;
  est.k = k;
  std::uint64_t hf = 0, vf = 0;
  for (const auto& o : out) {
    hf += o.h_fail;
    vf += o.v_fail;
    est.environments_sampled += o.attempts_h + o.attempts_v;
  }
  est.h_hat = trials ? static_cast<double>(hf) / static_cast<double>(trials) : 0.0;
  est.v_hat = trials ? static_cast<double>(vf) / static_cast<double>(trials) : 0.0;
  est.q_hat = std::max(est.h_hat, est.v_hat);
  est.h_ci = wilson_interval(hf, trials);
  est.v_ci = wilson_interval(vf, trials);
  est.conditioning =
      "average over stationary environments conditioned on good base intervals (rejection)";
  return est;
}

namespace {

// Box surrogate for percolation from the origin's side: an open crossing
// from the column of the origin to the far side of [0,n]^2. Anchoring at
// the corner vertex alone caps the probability at 1 - (1-p)^2 and never
// reaches the supercritical plateau; the side-to-side event does, and for
// unit gaps its p at probability 1/2 sits at the self-dual point.
bool box_connection(const EdgeConfig& cfg, std::int64_t n) {
  return crossing_h(cfg, Rect{0, n, 0, n});
}

}  // namespace

ThetaEstimate theta_hat(const IntegerPmf& xi, double p, std::int64_t n, std::uint64_t trials,
                        Stream s, unsigned workers) {
  if (n < 1) throw InvalidSpec("box size must be >= 1");
  auto run = [&](std::uint64_t i) -> std::uint8_t {
    Stream t = s.substream(i);
    const EnvironmentSample env = sample_environment_covering(xi, n, FixedDelay{0}, t);
    const WindowConfig win{n, n, Formulation::UnitColumns};
    const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
    return static_cast<std::uint8_t>(box_connection(cfg, n));
  };
  const std::vector<std::uint8_t> out = map_trials<std::uint8_t>(trials, workers, run);
  std::uint64_t hits = 0;
  for (auto o : out) hits += o;
  ThetaEstimate est;
  est.p = p;
  est.n = n;
  est.trials = trials;
  est.theta = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  est.ci = wilson_interval(hits, trials);
  return est;
}

std::vector<SweepRow> pc_sweep(const IntegerPmf& xi, const std::vector<double>& p_grid,
                               const std::vector<std::int64_t>& sizes, std::uint64_t trials,
                               Stream s, std::uint64_t seed_label, unsigned workers) {
  if (p_grid.empty() || p_grid.size() > 32) throw InvalidSpec("p grid must have 1..32 points");
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (p_grid[i] <= p_grid[i - 1]) throw InvalidSpec("p grid must be increasing");

  std::vector<SweepRow> rows;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const std::int64_t n = sizes[si];
    auto run = [&, n, si](std::uint64_t i) -> std::uint32_t {
      Stream t = s.substream(si * (1ull << 40) + i);
      const EnvironmentSample env = sample_environment_covering(xi, n, FixedDelay{0}, t);
      const WindowConfig win{n, n, Formulation::UnitColumns};
      EdgeConfig cfg = EdgeConfig::uniform_field(env, win, 0.0, t.next_u64());
      std::uint32_t mask = 0;
      for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        cfg.set_p(p_grid[pi]);
        if (box_connection(cfg, n)) mask |= 1u << pi;
      }
      return mask;
    };
    const std::vector<std::uint32_t> out = map_trials<std::uint32_t>(trials, workers, run);
    for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
      std::uint64_t hits = 0;
      for (auto m : out) hits += (m >> pi) & 1u;
      const Interval ci = wilson_interval(hits, trials);
      rows.push_back({p_grid[pi], n,
                      trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0,
                      ci.lo, ci.hi, trials, seed_label});
    }
  }
  return rows;
}

double sweep_crossing_point(const std::vector<SweepRow>& rows, std::int64_t n) {
  std::vector<const SweepRow*> sel;
  for (const auto& r : rows)
    if (r.n == n) sel.push_back(&r);
  if (sel.empty()) throw NoResults("no sweep rows for that size");
  for (std::size_t i = 1; i < sel.size(); ++i) {
    if (sel[i - 1]->theta < 0.5 && sel[i]->theta >= 0.5) {
      const double t0 = sel[i - 1]->theta, t1 = sel[i]->theta;
      return sel[i - 1]->p + (0.5 - t0) * (sel[i]->p - sel[i - 1]->p) / (t1 - t0);
    }
  }
  return sel.front()->theta >= 0.5 ? sel.front()->p : sel.back()->p;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "p,n,theta_hat,ci_lo,ci_hi,trials,seed\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g,%.17g,%.17g,%llu,%llu\n", r.p,
                  static_cast<long long>(r.n), r.theta, r.ci_lo, r.ci_hi,
                  static_cast<unsigned long long>(r.trials),
                  static_cast<unsigned long long>(r.seed));
    os << buf;
  }
  return os.str();
}

std::string audit_to_json(const AuditRecord& rec) {
  nlohmann::json j{{"name", rec.name},
                   {"antecedent_count", rec.antecedent_count},
                   {"violation_count", rec.violation_count},
                   {"trials", rec.trials},
                   {"params", nlohmann::json::parse(rec.params_json.empty() ? "{}" : rec.params_json)}};
  return j.dump(2);
}

namespace {

AuditRecord aggregate_audit(std::string name, std::string params,
                            const std::vector<ContainmentSample>& samples) {
  AuditRecord rec;
  rec.name = std::move(name);
  rec.params_json = std::move(params);
  rec.trials = samples.size();
  for (const auto& s : samples) {
    rec.antecedent_count += s.antecedent ? 1 : 0;
    rec.violation_count += s.violation ? 1 : 0;
  }
  return rec;
}

}  // namespace

AuditRecord run_horizontal_audit(const IntegerPmf& xi, double p, int level,
                                 const ScaleTable& scales, const HeightTable& heights,
                                 std::uint64_t trials, Stream s, unsigned workers) {
  const int k = level - 1;
  const std::int64_t L1 = scales.L_int(level);
  const std::int64_t H = heights.H_int(k);
  const DelayDraw delay(xi, StationaryDelay{});
  auto run = [&](std::uint64_t i) -> ContainmentSample {
    Stream t = s.substream(i);
    std::uint64_t att = 0;
    // parents I_0^{level}, I_1^{level} good, per the strip construction
    const EnvironmentSample env =
        conditioned_environment(xi, delay, scales, level, 2, 2 * L1, t, &att);
    const LabelGrid labels = label_intervals(env, scales, 0, level, 2 * L1);
    const WindowConfig win{2 * L1, 2 * H, Formulation::UnitColumns};
    const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
    return containment_check_horizontal(cfg, level, labels, scales, heights);
  };
  const auto samples = map_trials<ContainmentSample>(trials, workers, run);
  nlohmann::json params{{"p", p}, {"level", level}, {"A", scales.A}};
  return aggregate_audit("strip_implies_H", params.dump(), samples);
}

AuditRecord run_vertical_audit(const IntegerPmf& xi, double p, int level,
                               const ScaleTable& scales, const HeightTable& heights,
                               std::uint64_t trials, Stream s, unsigned workers) {
  const int k = level - 1;
  const std::int64_t L1 = scales.L_int(level);
  const std::int64_t Hk = heights.H_int(k);
  const std::int64_t jmax = 2 * heights.H_int(level) / Hk;
  auto run = [&](std::uint64_t i) -> ContainmentSample {
    Stream t = s.substream(i);
    const EnvironmentSample env =
        sample_environment_covering(xi, L1, StationaryDelay{}, t);
    const WindowConfig win{L1, (jmax + 1) * Hk, Formulation::UnitColumns};
    const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
    return containment_check_vertical(cfg, level, scales, heights);
  };
  const auto samples = map_trials<ContainmentSample>(trials, workers, run);
  nlohmann::json params{{"p", p}, {"level", level}, {"A", scales.A}};
  return aggregate_audit("rescaled_implies_V", params.dump(), samples);
}

AuditRecord run_ladder_audit(const IntegerPmf& xi, double p, int k_lo, int k_hi,
                             const ScaleTable& scales, const HeightTable& heights,
                             std::uint64_t trials, Stream s, unsigned workers) {
  const std::int64_t W = 3 * scales.L_int(k_hi);
  const std::int64_t T = 2 * heights.H_int(k_hi);
  auto run = [&](std::uint64_t i) -> ContainmentSample {
    Stream t = s.substream(i);
    const EnvironmentSample env = sample_environment_covering(xi, W, StationaryDelay{}, t);
    const WindowConfig win{W, T, Formulation::UnitColumns};
    const EdgeConfig cfg = EdgeConfig::sample_direct(env, win, p, t);
    return ladder_certificate(cfg, k_lo, k_hi, scales, heights);
  };
  const auto samples = map_trials<ContainmentSample>(trials, workers, run);
  nlohmann::json params{{"p", p}, {"k_lo", k_lo}, {"k_hi", k_hi}, {"A", scales.A}};
  return aggregate_audit("ladder_certificate", params.dump(), samples);
}

}  // namespace percolab
