#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "percolab/pmf.hpp"
#include "percolab/scales.hpp"

namespace percolab {

enum class ExperimentKind {
  Stationarity,
  Coupling,
  C1,
  Scales,
  Labels,
  Pk,
  Decouple,
  Qk,
  Theta,
  Sweep,
  ProofConstants,
  Audits,
};

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct ExperimentConfig {
  DistributionSpec distribution = BorderlineLog{18.0, 0.5, 3};
  double weight_c = 18.0;
  MultiscaleParams multiscale{18.0, 0.99, 0.97, 0.95, 3.0, 0.2};
  ExperimentKind kind = ExperimentKind::Theta;
  std::string params_json = "{}";  // per-experiment parameters
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
  unsigned workers = 1;

  void validate() const;
  // Canonical JSON: sorted keys, fixed numeric formatting. workers and
  // output_dir are execution details and stay out of the hash.
  std::string canonical_json() const;
  std::string hash() const;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace percolab
