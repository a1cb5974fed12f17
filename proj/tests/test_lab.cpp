#include <filesystem>

#include "doctest.h"
#include "percolab/errors.hpp"
#include "percolab/run.hpp"

using namespace percolab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig base_config(const std::string& out) {
  ExperimentConfig cfg;
  cfg.distribution = Deterministic{1};
  cfg.weight_c = 18.0;
  cfg.multiscale = MultiscaleParams{18.0, 0.99, 0.97, 0.95, 3.0, 0.2};
  cfg.kind = ExperimentKind::Theta;
  cfg.params_json = R"({"p": 0.0, "n": 12})";
  cfg.trials = 200;
  cfg.master_seed = 99;
  cfg.output_dir = out;
  cfg.workers = 1;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config canonicalization and hashing") {
  const ExperimentConfig a = base_config("x");
  ExperimentConfig b = base_config("y");
  b.workers = 16;  // execution details stay out of the hash
  CHECK(a.hash() == b.hash());

  ExperimentConfig c = base_config("x");
  c.master_seed = 100;
  CHECK(a.hash() != c.hash());

  const ExperimentConfig back = config_from_json(config_to_json(a));
  CHECK(back.hash() == a.hash());
  CHECK(back.canonical_json() == a.canonical_json());
}

TEST_CASE("config validation") {
  ExperimentConfig cfg = base_config("x");
  cfg.weight_c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidSpec);
  cfg = base_config("x");
  cfg.params_json = "[1,2]";
  CHECK_THROWS_AS(cfg.validate(), InvalidSpec);
}

TEST_CASE("theta experiment writes a record with zero theta at p=0") {
  TempDir dir("percolab_lab_theta");
  ExperimentConfig cfg = base_config(dir.path.string());
  const ResultRecord rec = run(cfg);
  CHECK(rec.experiment == "Theta");
  CHECK(rec.metrics.at("theta_hat").value == 0.0);

  const fs::path rdir = dir.path / ("Theta-" + cfg.hash().substr(0, 8));
  CHECK(fs::exists(rdir / "record.json"));
  CHECK(fs::exists(rdir / "config.json"));

  const ResultRecord back = record_from_json(read_text_file((rdir / "record.json").string()));
  CHECK(back.experiment == rec.experiment);
  CHECK(back.config_hash == rec.config_hash);
  CHECK(back.metrics.size() == rec.metrics.size());
  for (const auto& [name, m] : rec.metrics) {
    CHECK(back.metrics.at(name).value == m.value);  // bit-exact round trip
  }
}

TEST_CASE("sweep rerun gives byte-identical CSV and worker count is irrelevant") {
  TempDir d1("percolab_lab_sweep1");
  TempDir d2("percolab_lab_sweep2");
  ExperimentConfig cfg = base_config(d1.path.string());
  cfg.kind = ExperimentKind::Sweep;
  cfg.params_json = R"({"p_grid": [0.4, 0.5, 0.6], "sizes": [12]})";
  cfg.trials = 150;

  const ResultRecord r1 = run(cfg);
  cfg.output_dir = d2.path.string();
  cfg.workers = 16;
  const ResultRecord r2 = run(cfg);

  const std::string sub = "Sweep-" + cfg.hash().substr(0, 8);
  const std::string csv1 = read_text_file((d1.path / sub / "sweep.csv").string());
  const std::string csv2 = read_text_file((d2.path / sub / "sweep.csv").string());
  CHECK(csv1 == csv2);
  CHECK(r1.metrics.at("crossing_n12").value == r2.metrics.at("crossing_n12").value);
  CHECK(fs::exists(d1.path / sub / "sweep.svg"));
}

TEST_CASE("worker fan-out keeps metrics bit-identical across counts") {
  TempDir d1("percolab_lab_w1");
  TempDir d2("percolab_lab_w2");
  ExperimentConfig cfg = base_config(d1.path.string());
  cfg.kind = ExperimentKind::Pk;
  cfg.distribution = UniformRange{2, 4};
  cfg.params_json = R"({"k": 1, "k_base": 0})";
  cfg.trials = 4000;
  const ResultRecord r1 = run(cfg);

  cfg.output_dir = d2.path.string();
  cfg.workers = 16;
  const ResultRecord r2 = run(cfg);
  CHECK(r1.metrics.at("p_hat").value == r2.metrics.at("p_hat").value);
}

TEST_CASE("scales experiment emits exact-arithmetic artifacts") {
  TempDir dir("percolab_lab_scales");
  ExperimentConfig cfg = base_config(dir.path.string());
  cfg.kind = ExperimentKind::Scales;
  cfg.params_json = R"({"kmax": 5})";
  const ResultRecord rec = run(cfg);
  CHECK(rec.metrics.at("checks_failed").value == 0.0);
  const fs::path rdir = dir.path / ("Scales-" + cfg.hash().substr(0, 8));
  CHECK(fs::exists(rdir / "inequalities.csv"));
  CHECK(fs::exists(rdir / "scales.json"));
}

TEST_CASE("report aggregates records and flags violations") {
  TempDir dir("percolab_lab_report");
  CHECK_THROWS_AS(report(dir.path.string()), NoResults);

  ExperimentConfig cfg = base_config(dir.path.string());
  run(cfg);
  const ReportOutcome ok = report(dir.path.string());
  CHECK(ok.exit_code == 0);
  CHECK(ok.text.find("Theta") != std::string::npos);

  // synthetic audit record with a violation flips the exit code
  ResultRecord bad;
  bad.experiment = "Audits";
  bad.config_hash = "deadbeefdeadbeef";
  bad.put("violation_count", 2.0);
  fs::create_directories(dir.path / "Audits-deadbeef");
  write_text_file((dir.path / "Audits-deadbeef" / "record.json").string(),
                  record_to_json(bad));
  const ReportOutcome flagged = report(dir.path.string());
  CHECK(flagged.exit_code == 3);

  // and a clean audit prints its zero-violation line
  ResultRecord good;
  good.experiment = "Audits";
  good.config_hash = "0123456701234567";
  good.put("violation_count", 0.0);
  write_text_file((dir.path / "Audits-deadbeef" / "record.json").string(),
                  record_to_json(good));
  const ReportOutcome clean = report(dir.path.string());
  CHECK(clean.exit_code == 0);
  CHECK(clean.text.find("0 violations") != std::string::npos);
}

TEST_CASE("stationarity experiment dispatch") {
  TempDir dir("percolab_lab_stat");
  ExperimentConfig cfg = base_config(dir.path.string());
  cfg.kind = ExperimentKind::Stationarity;
  cfg.distribution = UniformRange{2, 5};
  cfg.params_json = R"({"n": 25, "support_cap": 16})";
  cfg.trials = 20000;
  const ResultRecord rec = run(cfg);
  CHECK(rec.metrics.at("tv_at_n").value <= 0.05);
  CHECK(rec.metrics.at("tv_at_0").value <= 0.05);
}

TEST_CASE("svg output is a well-formed polyline plot") {
  const SvgSeries s{"n=2", {0.0, 0.5, 1.0}, {0.1, 0.4, 0.9}};
  const std::string svg = svg_line_plot("demo", {s});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
