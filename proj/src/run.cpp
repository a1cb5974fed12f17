#include "percolab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "percolab/decouple.hpp"
#include "percolab/errors.hpp"
#include "percolab/measure.hpp"
#include "percolab/renewal.hpp"

namespace percolab {

namespace fs = std::filesystem;

namespace {

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

DelaySpec delay_from_json(const nlohmann::json& j) {
  if (j.at("kind").get<std::string>() == "Stationary") return StationaryDelay{};
  return FixedDelay{j.value("m", std::int64_t{0})};
}

struct RunContext {
  const ExperimentConfig& cfg;
  nlohmann::json params;
  fs::path dir;
  ResultRecord rec;
  IntegerPmf xi;
  WeightFunction w;

  Stream stream(const std::string& tag) const {
    return derive_stream(cfg.master_seed, tag, 0);
  }
  void artifact(const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
    rec.artifacts.push_back(name);
  }
};

void run_stationarity(RunContext& ctx) {
  const std::int64_t n = ctx.params.value("n", std::int64_t{50});
  const std::int64_t cap = ctx.params.value("support_cap", std::int64_t{64});
  const double tv_n = stationarity_tv(ctx.xi, n, ctx.cfg.trials, cap, ctx.stream("stationarity.n"),
                                      ctx.cfg.workers);
  const double tv_0 = stationarity_tv(ctx.xi, 0, ctx.cfg.trials, cap, ctx.stream("stationarity.0"),
                                      ctx.cfg.workers);
  ctx.rec.put("tv_at_n", tv_n);
  ctx.rec.put("tv_at_0", tv_0);
  ctx.rec.put("n", static_cast<double>(n));
}

void run_coupling(RunContext& ctx) {
  const std::int64_t cap = ctx.params.value("cap", std::int64_t{4096});
  const DelaySpec d1 =
      ctx.params.contains("d1") ? delay_from_json(ctx.params["d1"]) : DelaySpec(FixedDelay{0});
  const DelaySpec d2 =
      ctx.params.contains("d2") ? delay_from_json(ctx.params["d2"]) : DelaySpec(StationaryDelay{});
  Stream base = ctx.stream("coupling");
  std::map<std::int64_t, std::uint64_t> hist;
  std::uint64_t censored = 0;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < ctx.cfg.trials; ++i) {
    Stream t = base.substream(i);
    const CouplingOutcome o = coupling_time(ctx.xi, d1, d2, t, cap);
    if (o.coupled) {
      ++hist[o.value];
      sum += static_cast<double>(o.value);
    } else {
      ++censored;
    }
  }
  const std::uint64_t coupled = ctx.cfg.trials - censored;
  ctx.rec.put("coupled_fraction",
              static_cast<double>(coupled) / static_cast<double>(ctx.cfg.trials));
  ctx.rec.put("censor_fraction",
              static_cast<double>(censored) / static_cast<double>(ctx.cfg.trials));
  ctx.rec.put("mean_T", coupled ? sum / static_cast<double>(coupled) : 0.0);
  std::ostringstream os;
  os << "t,count\n";
  for (const auto& [t, c] : hist) os << t << "," << c << "\n";
  ctx.artifact("coupling_hist.csv", os.str());
}

void run_c1(RunContext& ctx) {
  const std::int64_t cap = ctx.params.value("cap", std::int64_t{65536});
  const C1Estimate est =
      estimate_c1(ctx.xi, ctx.w, ctx.cfg.trials, cap, ctx.stream("c1"), ctx.cfg.workers);
  ctx.rec.put("moment_rho", est.moment_rho);
  ctx.rec.put("moment_T", est.moment_T, est.moment_T - est.moment_T_se,
              est.moment_T + est.moment_T_se);
  ctx.rec.put("c1", est.c1);
  ctx.rec.put("c1_upper", est.upper_ci());
  ctx.rec.put("censor_fraction", est.censor_fraction);
}

void run_scales(RunContext& ctx) {
  const int kmax = ctx.params.value("kmax", 8);
  const double A = ctx.cfg.multiscale.A();
  const ScaleTable t = scale_table(A, kmax);
  const InequalityReport rep = verify_scale_inequalities(A, kmax);
  std::uint64_t failed = 0;
  for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
  ctx.rec.put("checks_total", static_cast<double>(rep.checks.size()));
  ctx.rec.put("checks_failed", static_cast<double>(failed));
  ctx.artifact("inequalities.csv", rep.to_csv());

  nlohmann::json js{{"A", A}, {"L", nlohmann::json::array()}, {"r", t.r}, {"logL", t.logL}};
  for (const auto& L : t.L) js["L"].push_back(L.get_str());
  ctx.artifact("scales.json", js.dump(2));
}

void run_labels(RunContext& ctx) {
  const int k_top = ctx.params.value("k_top", 2);
  const ScaleTable scales = scale_table(ctx.cfg.multiscale.A(), k_top + 1);
  const std::int64_t window = ctx.params.value("window", 2 * scales.L_int(k_top));
  Stream base = ctx.stream("labels");
  std::vector<std::uint64_t> bad_count(static_cast<std::size_t>(k_top) + 1, 0);
  std::vector<std::uint64_t> total(static_cast<std::size_t>(k_top) + 1, 0);
  for (std::uint64_t i = 0; i < ctx.cfg.trials; ++i) {
    Stream t = base.substream(i);
    const EnvironmentSample env =
        sample_environment_covering(ctx.xi, window, StationaryDelay{}, t);
    const LabelGrid g = label_intervals(env, scales, 0, k_top, window);
    for (int k = 0; k <= k_top; ++k) {
      for (std::int64_t j = 0; j < g.count(k); ++j) {
        bad_count[static_cast<std::size_t>(k)] += g.is_bad(k, j) ? 1 : 0;
        ++total[static_cast<std::size_t>(k)];
      }
    }
  }
  for (int k = 0; k <= k_top; ++k) {
    ctx.rec.put("bad_frac_k" + std::to_string(k),
                total[static_cast<std::size_t>(k)]
                    ? static_cast<double>(bad_count[static_cast<std::size_t>(k)]) /
                          static_cast<double>(total[static_cast<std::size_t>(k)])
                    : 0.0);
  }
}

void run_pk(RunContext& ctx) {
  const int k = ctx.params.value("k", 1);
  const int k_base = ctx.params.value("k_base", 0);
  const ScaleTable scales = scale_table(ctx.cfg.multiscale.A(), k + 1);
  const PkEstimate est =
      estimate_pk(ctx.xi, scales, k, k_base, ctx.cfg.trials, ctx.stream("pk"), ctx.cfg.workers);
  ctx.rec.put("p_hat", est.p_hat, est.wilson.lo, est.wilson.hi);
  ctx.rec.put("k", static_cast<double>(k));
}

void run_decouple(RunContext& ctx) {
  const std::int64_t m = ctx.params.value("m", std::int64_t{0});
  const std::int64_t n = ctx.params.value("n", std::int64_t{2});
  const std::int64_t cap = ctx.params.value("cap", std::int64_t{65536});
  const std::uint64_t c1_trials = ctx.params.value("c1_trials", std::uint64_t{20000});
  const C1Estimate c1 =
      estimate_c1(ctx.xi, ctx.w, c1_trials, cap, ctx.stream("decouple.c1"), ctx.cfg.workers);
  CoordEvent a{{{0, CoordTest::Op::EQ, 0}}};
  CoordEvent b{{{m + 2 * n, CoordTest::Op::EQ, 0}}};
  const GapReport rep = decoupling_gap(ctx.xi, ctx.w, c1.upper_ci(), m, n, a, b, ctx.cfg.trials,
                                       ctx.stream("decouple.gap"), ctx.cfg.workers);
  ctx.rec.put("gap", rep.gap, rep.gap - rep.se, rep.gap + rep.se);
  ctx.rec.put("bound", rep.bound);
  ctx.rec.put("p_a", rep.p_a);
  ctx.rec.put("p_b", rep.p_b);
  ctx.rec.put("p_ab", rep.p_ab);
  ctx.rec.put("c1_upper", c1.upper_ci());
}

void run_qk(RunContext& ctx) {
  const double p = ctx.params.value("p", 0.9);
  const int k = ctx.params.value("k", 0);
  const ScaleTable scales = scale_table(ctx.cfg.multiscale.A(), k + 1);
  const HeightTable heights = height_table(ctx.cfg.multiscale, scales, k);
  const QkEstimate est = estimate_qk(ctx.xi, p, k, ctx.cfg.trials, ctx.stream("qk"), scales,
                                     heights, ctx.cfg.workers);
  ctx.rec.put("h_hat", est.h_hat, est.h_ci.lo, est.h_ci.hi);
  ctx.rec.put("v_hat", est.v_hat, est.v_ci.lo, est.v_ci.hi);
  ctx.rec.put("q_hat", est.q_hat);
  ctx.rec.put("environments_sampled", static_cast<double>(est.environments_sampled));
}

void run_theta(RunContext& ctx) {
  const double p = ctx.params.value("p", 0.55);
  const std::int64_t n = ctx.params.value("n", std::int64_t{64});
  const ThetaEstimate est =
      theta_hat(ctx.xi, p, n, ctx.cfg.trials, ctx.stream("theta"), ctx.cfg.workers);
  ctx.rec.put("theta_hat", est.theta, est.ci.lo, est.ci.hi);
}

void run_sweep(RunContext& ctx) {
  std::vector<double> p_grid = ctx.params.value("p_grid", std::vector<double>{});
  if (p_grid.empty())
    for (double p = 0.40; p < 0.615; p += 0.02) p_grid.push_back(p);
  std::vector<std::int64_t> sizes =
      ctx.params.value("sizes", std::vector<std::int64_t>{32, 64, 128});
  const auto rows = pc_sweep(ctx.xi, p_grid, sizes, ctx.cfg.trials, ctx.stream("sweep"),
                             ctx.cfg.master_seed, ctx.cfg.workers);
  ctx.artifact("sweep.csv", sweep_to_csv(rows));
  std::vector<SvgSeries> series;
  for (auto n : sizes) {
    SvgSeries s;
    s.label = "n=" + std::to_string(n);
    for (const auto& r : rows)
      if (r.n == n) {
        s.x.push_back(r.p);
        s.y.push_back(r.theta);
      }
    series.push_back(std::move(s));
    ctx.rec.put("crossing_n" + std::to_string(n), sweep_crossing_point(rows, n));
  }
  ctx.artifact("sweep.svg", svg_line_plot("theta_hat vs p", series));
}

void run_proof_constants(RunContext& ctx) {
  const int kmax = ctx.params.value("kmax", 20000);
  const int horizon = ctx.params.value("horizon", 64);
  const std::int64_t cap = ctx.params.value("cap", std::int64_t{65536});
  const std::uint64_t c1_trials = ctx.params.value("c1_trials", std::uint64_t{20000});

  const double c = ctx.cfg.weight_c;
  const auto [alpha, mu] = find_alpha_mu(c);
  const double A = compute_A(alpha, c);
  ctx.rec.put("alpha", alpha);
  ctx.rec.put("mu", mu);
  ctx.rec.put("A", A);
  ctx.rec.put("A_pow_mu_half", std::pow(A, mu / 2.0));

  const LiftReport lift = aperiodic_lift(ctx.xi, ctx.w);
  const C1Estimate c1 = estimate_c1(lift.lifted, ctx.w, c1_trials, cap,
                                    ctx.stream("proof.c1"), ctx.cfg.workers);
  ctx.rec.put("c1_upper", c1.upper_ci());
  const MomentResult rho = moment_rho_fc(lift.lifted, ctx.w);

  MultiscaleParams ms{c, alpha, ctx.cfg.multiscale.beta, mu, std::nullopt, std::nullopt};
  const K0Report k0 = check_k0_conditions(ms, c1.upper_ci(), rho.value, kmax);
  ctx.rec.put("k0_minimal", k0.minimal_k ? static_cast<double>(*k0.minimal_k) : -1.0);
  {
    nlohmann::json jk{{"c1_used", k0.c1_used},
                      {"moment_rho_used", k0.moment_rho_used},
                      {"minimal_k", k0.minimal_k ? nlohmann::json(*k0.minimal_k) : nlohmann::json()},
                      {"rows", nlohmann::json::array()}};
    // long stretches of identical rows compress to nothing of value; keep
    // the window around the transition plus the ends
    const int lo = k0.minimal_k ? std::max(0, *k0.minimal_k - 50) : 0;
    const int hi = k0.minimal_k ? std::min<int>(kmax, *k0.minimal_k + 50) : std::min(kmax, 200);
    for (const auto& row : k0.rows) {
      if (row.k > 5 && (row.k < lo || row.k > hi)) continue;
      jk["rows"].push_back({{"k", row.k},
                            {"cond1", row.cond[0]},
                            {"cond2", row.cond[1]},
                            {"cond3", row.cond[2]}});
    }
    ctx.artifact("k0_report.json", jk.dump(2));
  }

  const TailSumReport t4 = tail_sum_k4(A, mu, 1, horizon);
  ctx.rec.put("k4_minimal", t4.minimal_k ? static_cast<double>(*t4.minimal_k) : -1.0);
  const int k4 = t4.minimal_k.value_or(1);
  ctx.rec.put("tail_sum_at_k4", tail_sum_k4(A, mu, k4, horizon).value);
  const LadderBound lb = ladder_lower_bound(A, mu, k4, horizon);
  ctx.rec.put("ladder_lower_bound", lb.lower_bound);
  ctx.rec.put("union_bound_at_k0",
              k0.minimal_k ? corollary_union_bound(c, A, *k0.minimal_k, horizon) : -1.0);
}

void run_audits(RunContext& ctx) {
  const std::string which = ctx.params.value("which", std::string("all"));
  const std::vector<double> ps =
      ctx.params.value("p_list", std::vector<double>{0.7, 0.9, 0.95});
  const int level = ctx.params.value("level", 1);
  const int k_lo = ctx.params.value("k_lo", 0);
  const int k_hi = ctx.params.value("k_hi", 1);
  const int k_top = std::max(level, k_hi);
  const ScaleTable scales = scale_table(ctx.cfg.multiscale.A(), k_top + 1);
  const HeightTable heights = height_table(ctx.cfg.multiscale, scales, k_top);

  std::uint64_t violations = 0, antecedents = 0;
  int idx = 0;
  for (const double p : ps) {
    std::vector<AuditRecord> recs;
    if (which == "all" || which == "strip")
      recs.push_back(run_horizontal_audit(ctx.xi, p, level, scales, heights, ctx.cfg.trials,
                                          ctx.stream("audit.strip." + std::to_string(p)),
                                          ctx.cfg.workers));
    if (which == "all" || which == "rescaled")
      recs.push_back(run_vertical_audit(ctx.xi, p, level, scales, heights, ctx.cfg.trials,
                                        ctx.stream("audit.rescaled." + std::to_string(p)),
                                        ctx.cfg.workers));
    if (which == "all" || which == "ladder")
      recs.push_back(run_ladder_audit(ctx.xi, p, k_lo, k_hi, scales, heights, ctx.cfg.trials,
                                      ctx.stream("audit.ladder." + std::to_string(p)),
                                      ctx.cfg.workers));
    for (const auto& r : recs) {
      violations += r.violation_count;
      antecedents += r.antecedent_count;
      ctx.artifact("audit_" + std::to_string(idx++) + "_" + r.name + ".json", audit_to_json(r));
    }
  }
  ctx.rec.put("violation_count", static_cast<double>(violations));
  ctx.rec.put("antecedent_count", static_cast<double>(antecedents));
}

}  // namespace

ResultRecord run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunContext ctx{cfg,
                 nlohmann::json::parse(cfg.params_json),
                 {},
                 {},
                 build_pmf(cfg.distribution),
                 WeightFunction{cfg.weight_c}};
  ctx.rec.experiment = kind_name(cfg.kind);
  ctx.rec.config_hash = cfg.hash();
  ctx.rec.timestamp = now_iso();

  ctx.dir = fs::path(cfg.output_dir) / (kind_name(cfg.kind) + "-" + cfg.hash().substr(0, 8));
  fs::create_directories(ctx.dir);
  write_text_file((ctx.dir / "config.json").string(), config_to_json(cfg));

  switch (cfg.kind) {
    case ExperimentKind::Stationarity: run_stationarity(ctx); break;
    case ExperimentKind::Coupling: run_coupling(ctx); break;
    case ExperimentKind::C1: run_c1(ctx); break;
    case ExperimentKind::Scales: run_scales(ctx); break;
    case ExperimentKind::Labels: run_labels(ctx); break;
    case ExperimentKind::Pk: run_pk(ctx); break;
    case ExperimentKind::Decouple: run_decouple(ctx); break;
    case ExperimentKind::Qk: run_qk(ctx); break;
    case ExperimentKind::Theta: run_theta(ctx); break;
    case ExperimentKind::Sweep: run_sweep(ctx); break;
    case ExperimentKind::ProofConstants: run_proof_constants(ctx); break;
    case ExperimentKind::Audits: run_audits(ctx); break;
  }

  write_text_file((ctx.dir / "record.json").string(), record_to_json(ctx.rec));
  return ctx.rec;
}

ReportOutcome report(const std::string& output_dir) {
  std::vector<fs::path> files;
  if (fs::exists(output_dir)) {
    for (const auto& e : fs::recursive_directory_iterator(output_dir))
      if (e.is_regular_file() && e.path().filename() == "record.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw NoResults("no record.json under " + output_dir);

  std::ostringstream os;
  bool violation = false;
  for (const auto& f : files) {
    const ResultRecord rec = record_from_json(read_text_file(f.string()));
    os << rec.experiment << " [" << rec.config_hash.substr(0, 8) << "]\n";
    for (const auto& [name, m] : rec.metrics) {
      char buf[160];
      if (m.ci_lo && m.ci_hi)
        std::snprintf(buf, sizeof buf, "  %-24s %.6g  [%.6g, %.6g]\n", name.c_str(), m.value,
                      *m.ci_lo, *m.ci_hi);
      else
        std::snprintf(buf, sizeof buf, "  %-24s %.6g\n", name.c_str(), m.value);
      os << buf;
      if (name == "violation_count" && m.value > 0.0) violation = true;
    }
    if (rec.metrics.count("violation_count") && rec.metrics.at("violation_count").value == 0.0)
      os << "  0 violations\n";
  }
  return {os.str(), violation ? 3 : 0};
}

}  // namespace percolab
