// percolab: Monte Carlo laboratory for bond percolation on a randomly
// horizontally stretched lattice.
//
// Subcommands map onto experiments; every run writes a record.json plus CSV
// artifacts under --out, and `report` summarizes them. Exit codes: 0 ok,
// 1 usage, 2 experiment error, 3 audit violations.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "percolab/environment.hpp"
#include "percolab/errors.hpp"
#include "percolab/run.hpp"

using namespace percolab;

namespace {

struct GlobalOpts {
  std::string config_file;
  std::uint64_t seed = 1;
  std::uint64_t trials = 2000;
  std::string out = "out";
  unsigned workers = 1;
  std::string dist_json;
  double weight_c = 18.0;
  double toy_A = 3.0;
  double height_cap = 0.2;
};

ExperimentConfig assemble(const GlobalOpts& g, ExperimentKind kind, const nlohmann::json& params) {
  ExperimentConfig cfg;
  if (!g.config_file.empty()) cfg = config_from_json(read_text_file(g.config_file));
  if (!g.dist_json.empty()) cfg.distribution = spec_from_json(g.dist_json);
  cfg.weight_c = g.weight_c;
  cfg.multiscale.c = std::max(g.weight_c, 17.1);
  cfg.multiscale.toy_A = g.toy_A;
  cfg.multiscale.height_cap = g.height_cap;
  cfg.kind = kind;
  nlohmann::json merged = nlohmann::json::parse(cfg.params_json);
  for (const auto& [k, v] : params.items()) merged[k] = v;
  cfg.params_json = merged.dump();
  cfg.trials = g.trials;
  cfg.master_seed = g.seed;
  cfg.output_dir = g.out;
  cfg.workers = g.workers;
  return cfg;
}

int do_run(const GlobalOpts& g, ExperimentKind kind, const nlohmann::json& params) {
  const ResultRecord rec = run(assemble(g, kind, params));
  std::printf("%s [%s]\n", rec.experiment.c_str(), rec.config_hash.substr(0, 8).c_str());
  for (const auto& [name, m] : rec.metrics) std::printf("  %-24s %.6g\n", name.c_str(), m.value);
  if (rec.metrics.count("violation_count") && rec.metrics.at("violation_count").value > 0.0)
    return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percolab - stretched-lattice percolation laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_file, "experiment config JSON file");
  app.add_option("--seed", g.seed, "64-bit master seed");
  app.add_option("--trials", g.trials, "Monte Carlo trials");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--workers", g.workers, "worker threads");
  app.add_option("--dist", g.dist_json, "distribution spec JSON");
  app.add_option("--weight-c", g.weight_c, "weight exponent c of F_c");
  app.add_option("--toy-A", g.toy_A, "toy scale ratio A");
  app.add_option("--height-cap", g.height_cap, "toy cap on the height exponent");

  // dist show
  auto* dist = app.add_subcommand("dist", "distribution utilities");
  auto* dist_show = dist->add_subcommand("show", "print the law and export CSV");

  // renewal stationarity|coupling|c1
  auto* renewal = app.add_subcommand("renewal", "renewal-process experiments");
  auto* ren_st = renewal->add_subcommand("stationarity", "TV distance of Z_n vs the delay law");
  std::int64_t st_n = 50, st_cap = 64;
  ren_st->add_option("-n,--n", st_n, "chain index");
  ren_st->add_option("--support-cap", st_cap, "TV support cap");
  auto* ren_cp = renewal->add_subcommand("coupling", "coupling time distribution");
  std::int64_t cp_cap = 4096;
  ren_cp->add_option("--cap", cp_cap, "censoring cap");
  auto* ren_c1 = renewal->add_subcommand("c1", "decoupling constant estimate");
  std::int64_t c1_cap = 65536;
  ren_c1->add_option("--cap", c1_cap, "censoring cap");

  // scales table|verify
  auto* scales_cmd = app.add_subcommand("scales", "scale recursion");
  int sc_kmax = 8;
  auto* sc_table = scales_cmd->add_subcommand("table", "exact L_k table");
  sc_table->add_option("--kmax", sc_kmax, "largest scale index");
  auto* sc_verify = scales_cmd->add_subcommand("verify", "exact inequality checks");
  sc_verify->add_option("--kmax", sc_kmax, "largest scale index");

  // env sample|label|pk
  auto* env_cmd = app.add_subcommand("env", "environment experiments");
  auto* env_sample = env_cmd->add_subcommand("sample", "sample an environment to a file");
  std::int64_t env_span = 1000;
  std::string env_file = "environment.txt";
  env_sample->add_option("--span", env_span, "minimum span to cover");
  env_sample->add_option("--file", env_file, "output file, one gap per line");
  auto* env_label = env_cmd->add_subcommand("label", "good/bad interval statistics");
  int lb_ktop = 2;
  env_label->add_option("--k-top", lb_ktop, "top scale");
  auto* env_pk = env_cmd->add_subcommand("pk", "bad-interval probability estimate");
  int pk_k = 1;
  env_pk->add_option("-k,--k", pk_k, "scale index");

  // decouple
  auto* dec = app.add_subcommand("decouple", "decoupling gap vs bound");
  std::int64_t dec_m = 0, dec_n = 2;
  dec->add_option("-m,--m", dec_m, "event A window end");
  dec->add_option("-n,--n", dec_n, "separation parameter");

  // perc qk|theta|sweep|audit
  auto* perc = app.add_subcommand("perc", "lattice percolation experiments");
  auto* perc_qk = perc->add_subcommand("qk", "crossing failure probabilities");
  double qk_p = 0.9;
  int qk_k = 0;
  perc_qk->add_option("-p,--p", qk_p, "edge parameter");
  perc_qk->add_option("-k,--k", qk_k, "scale index");
  auto* perc_theta = perc->add_subcommand("theta", "origin-to-boundary connection");
  double th_p = 0.55;
  std::int64_t th_n = 64;
  perc_theta->add_option("-p,--p", th_p, "edge parameter");
  perc_theta->add_option("-n,--n", th_n, "box size");
  auto* perc_sweep = perc->add_subcommand("sweep", "theta curve over a p grid");
  std::vector<double> sw_grid;
  std::vector<std::int64_t> sw_sizes;
  perc_sweep->add_option("--p-grid", sw_grid, "p grid (increasing)");
  perc_sweep->add_option("--sizes", sw_sizes, "box sizes");
  auto* perc_audit = perc->add_subcommand("audit", "containment audits");
  std::string audit_which = "all";
  int audit_level = 1, audit_klo = 0, audit_khi = 1;
  std::vector<double> audit_ps;
  perc_audit->add_option("--which", audit_which, "strip|rescaled|ladder|all");
  perc_audit->add_option("--level", audit_level, "parent scale for strip/rescaled");
  perc_audit->add_option("--k-lo", audit_klo, "ladder bottom scale");
  perc_audit->add_option("--k-hi", audit_khi, "ladder top scale");
  perc_audit->add_option("--p-list", audit_ps, "edge parameters");

  // proof constants
  auto* proof = app.add_subcommand("proof", "proof-constant arithmetic");
  auto* proof_const = proof->add_subcommand("constants", "A, (alpha,mu), k0, k4, ladder bound");
  int pc_kmax = 20000, pc_horizon = 64;
  proof_const->add_option("--kmax", pc_kmax, "k0 search range");
  proof_const->add_option("--horizon", pc_horizon, "tail sum horizon");

  // report
  auto* rep = app.add_subcommand("report", "summarize records under --out");

  // global flags may follow the subcommand
  std::function<void(CLI::App*)> allow_fallthrough = [&](CLI::App* a) {
    for (CLI::App* sub : a->get_subcommands({})) {
      sub->fallthrough();
      allow_fallthrough(sub);
    }
  };
  allow_fallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // usage
  }

  try {
    if (dist_show->parsed()) {
      ExperimentConfig cfg = assemble(g, ExperimentKind::Theta, {});
      std::filesystem::create_directories(g.out);
      const IntegerPmf pmf = build_pmf(cfg.distribution);
      std::printf("family: %s\n", spec_family(cfg.distribution).c_str());
      std::printf("mean:   %.12g\n", mean_xi(pmf));
      std::printf("head atoms: %zu%s\n", pmf.values().size(),
                  pmf.has_tail() ? " (+ parametric tail)" : "");
      write_text_file(g.out + "/pmf.csv", pmf_to_csv(pmf));
      std::printf("wrote %s/pmf.csv\n", g.out.c_str());
      return 0;
    }
    if (ren_st->parsed())
      return do_run(g, ExperimentKind::Stationarity, {{"n", st_n}, {"support_cap", st_cap}});
    if (ren_cp->parsed()) return do_run(g, ExperimentKind::Coupling, {{"cap", cp_cap}});
    if (ren_c1->parsed()) return do_run(g, ExperimentKind::C1, {{"cap", c1_cap}});
    if (sc_table->parsed()) return do_run(g, ExperimentKind::Scales, {{"kmax", sc_kmax}});
    if (sc_verify->parsed()) return do_run(g, ExperimentKind::Scales, {{"kmax", sc_kmax}});
    if (env_sample->parsed()) {
      ExperimentConfig cfg = assemble(g, ExperimentKind::Labels, {});
      const IntegerPmf pmf = build_pmf(cfg.distribution);
      Stream s = derive_stream(g.seed, "env.sample", 0);
      const EnvironmentSample env =
          sample_environment_covering(pmf, env_span, StationaryDelay{}, s);
      write_text_file(env_file, environment_to_text(env));
      std::printf("wrote %s (%zu gaps)\n", env_file.c_str(), env.gaps.size());
      return 0;
    }
    if (env_label->parsed()) return do_run(g, ExperimentKind::Labels, {{"k_top", lb_ktop}});
    if (env_pk->parsed()) return do_run(g, ExperimentKind::Pk, {{"k", pk_k}});
    if (dec->parsed()) return do_run(g, ExperimentKind::Decouple, {{"m", dec_m}, {"n", dec_n}});
    if (perc_qk->parsed()) return do_run(g, ExperimentKind::Qk, {{"p", qk_p}, {"k", qk_k}});
    if (perc_theta->parsed()) return do_run(g, ExperimentKind::Theta, {{"p", th_p}, {"n", th_n}});
    if (perc_sweep->parsed()) {
      nlohmann::json params = nlohmann::json::object();
      if (!sw_grid.empty()) params["p_grid"] = sw_grid;
      if (!sw_sizes.empty()) params["sizes"] = sw_sizes;
      return do_run(g, ExperimentKind::Sweep, params);
    }
    if (perc_audit->parsed()) {
      nlohmann::json params{{"which", audit_which},
                            {"level", audit_level},
                            {"k_lo", audit_klo},
                            {"k_hi", audit_khi}};
      if (!audit_ps.empty()) params["p_list"] = audit_ps;
      return do_run(g, ExperimentKind::Audits, params);
    }
    if (proof_const->parsed())
      return do_run(g, ExperimentKind::ProofConstants,
                    {{"kmax", pc_kmax}, {"horizon", pc_horizon}});
    if (rep->parsed()) {
      const ReportOutcome out = report(g.out);
      std::fputs(out.text.c_str(), stdout);
      return out.exit_code;
    }
  } catch (const NoResults& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::fprintf(stderr, "no subcommand action\n");
  return 1;
}
