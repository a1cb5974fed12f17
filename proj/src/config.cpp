#include "percolab/config.hpp"

#include <cstdio>

#include "json.hpp"
#include "percolab/errors.hpp"
#include "percolab/rng.hpp"

namespace percolab {

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Stationarity: return "Stationarity";
    case ExperimentKind::Coupling: return "Coupling";
    case ExperimentKind::C1: return "C1";
    case ExperimentKind::Scales: return "Scales";
    case ExperimentKind::Labels: return "Labels";
    case ExperimentKind::Pk: return "Pk";
    case ExperimentKind::Decouple: return "Decouple";
    case ExperimentKind::Qk: return "Qk";
    case ExperimentKind::Theta: return "Theta";
    case ExperimentKind::Sweep: return "Sweep";
    case ExperimentKind::ProofConstants: return "ProofConstants";
    case ExperimentKind::Audits: return "Audits";
  }
  throw InvalidSpec("unknown experiment kind");
}

ExperimentKind kind_from_name(const std::string& name) {
  static const std::map<std::string, ExperimentKind> m = {
      {"Stationarity", ExperimentKind::Stationarity},
      {"Coupling", ExperimentKind::Coupling},
      {"C1", ExperimentKind::C1},
      {"Scales", ExperimentKind::Scales},
      {"Labels", ExperimentKind::Labels},
      {"Pk", ExperimentKind::Pk},
      {"Decouple", ExperimentKind::Decouple},
      {"Qk", ExperimentKind::Qk},
      {"Theta", ExperimentKind::Theta},
      {"Sweep", ExperimentKind::Sweep},
      {"ProofConstants", ExperimentKind::ProofConstants},
      {"Audits", ExperimentKind::Audits},
  };
  auto it = m.find(name);
  if (it == m.end()) throw InvalidSpec("unknown experiment kind " + name);
  return it->second;
}

void ExperimentConfig::validate() const {
  build_pmf(distribution);  // parameter ranges
  if (weight_c <= 0.0) throw InvalidSpec("weight_c must be positive");
  multiscale.validate();
  const auto parsed = nlohmann::json::parse(params_json);
  if (!parsed.is_object()) throw InvalidSpec("params must be a JSON object");
}

namespace {

nlohmann::json multiscale_to_json(const MultiscaleParams& m) {
  nlohmann::json j{{"c", m.c}, {"alpha", m.alpha}, {"beta", m.beta}, {"mu", m.mu}};
  if (m.toy_A) j["toy_A"] = *m.toy_A;
  if (m.height_cap) j["height_cap"] = *m.height_cap;
  return j;
}

MultiscaleParams multiscale_from_json(const nlohmann::json& j) {
  MultiscaleParams m{j.at("c").get<double>(), j.at("alpha").get<double>(),
                     j.at("beta").get<double>(), j.at("mu").get<double>(), std::nullopt,
                     std::nullopt};
  if (j.contains("toy_A")) m.toy_A = j.at("toy_A").get<double>();
  if (j.contains("height_cap")) m.height_cap = j.at("height_cap").get<double>();
  return m;
}

// Canonical float formatting: %.17g round-trips doubles bit-exactly.
void canonicalize(nlohmann::json& j) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) canonicalize(v);
  } else if (j.is_array()) {
    for (auto& v : j) canonicalize(v);
  } else if (j.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    j = std::string("f64:") + buf;
  }
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j{{"distribution", nlohmann::json::parse(spec_to_json(cfg.distribution))},
                   {"weight_c", cfg.weight_c},
                   {"multiscale", multiscale_to_json(cfg.multiscale)},
                   {"experiment", kind_name(cfg.kind)},
                   {"params", nlohmann::json::parse(cfg.params_json)},
                   {"trials", cfg.trials},
                   {"master_seed", cfg.master_seed},
                   {"output_dir", cfg.output_dir},
                   {"workers", cfg.workers}};
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("distribution")) cfg.distribution = spec_from_json(j.at("distribution").dump());
  if (j.contains("weight_c")) cfg.weight_c = j.at("weight_c").get<double>();
  if (j.contains("multiscale")) cfg.multiscale = multiscale_from_json(j.at("multiscale"));
  if (j.contains("experiment")) cfg.kind = kind_from_name(j.at("experiment").get<std::string>());
  if (j.contains("params")) cfg.params_json = j.at("params").dump();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<std::uint64_t>();
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<unsigned>();
  return cfg;
}

std::string ExperimentConfig::canonical_json() const {
  nlohmann::json j{{"distribution", nlohmann::json::parse(spec_to_json(distribution))},
                   {"weight_c", weight_c},
                   {"multiscale", multiscale_to_json(multiscale)},
                   {"experiment", kind_name(kind)},
                   {"params", nlohmann::json::parse(params_json)},
                   {"trials", trials},
                   {"master_seed", master_seed}};
  canonicalize(j);
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json())));
  return buf;
}

}  // namespace percolab
