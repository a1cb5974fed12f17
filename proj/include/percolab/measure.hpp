#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "percolab/events.hpp"
#include "percolab/labels.hpp"
#include "percolab/lattice.hpp"
#include "percolab/stats.hpp"

namespace percolab {

struct QkEstimate {
  int k = 0;
  double h_hat = 0.0;
  double v_hat = 0.0;
  double q_hat = 0.0;
  Interval h_ci, v_ci;
  std::uint64_t environments_sampled = 0;
  std::string conditioning;  // description of the good-interval conditioning
};

// h_hat: fraction of failed H_{0,0}^k over environments with I_0^k, I_1^k
// good; v_hat with I_0^k good; q_hat = max. A conditional average over good
// environments, which lower-bounds the worst case over them.
QkEstimate estimate_qk(const IntegerPmf& xi, double p, int k, std::uint64_t trials, Stream s,
                       const ScaleTable& scales, const HeightTable& heights,
                       unsigned workers = 1);

struct ThetaEstimate {
  double p = 0.0;
  std::int64_t n = 0;
  double theta = 0.0;
  Interval ci;
  std::uint64_t trials = 0;
};

// Finite-box proxy for percolation from the origin's side: an open crossing
// of [0,n]^2 from the origin's column to the far side, fresh environment per
// trial.
ThetaEstimate theta_hat(const IntegerPmf& xi, double p, std::int64_t n, std::uint64_t trials,
                        Stream s, unsigned workers = 1);

struct SweepRow {
  double p;
  std::int64_t n;
  double theta;
  double ci_lo, ci_hi;
  std::uint64_t trials;
  std::uint64_t seed;
};

// Shared uniform fields across the whole p grid, so every indicator is
// nondecreasing in p sample by sample.
std::vector<SweepRow> pc_sweep(const IntegerPmf& xi, const std::vector<double>& p_grid,
                               const std::vector<std::int64_t>& sizes, std::uint64_t trials,
                               Stream s, std::uint64_t seed_label, unsigned workers = 1);

// Interpolated p where theta crosses 1/2 for box size n.
double sweep_crossing_point(const std::vector<SweepRow>& rows, std::int64_t n);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct AuditRecord {
  std::string name;
  std::uint64_t antecedent_count = 0;
  std::uint64_t violation_count = 0;
  std::uint64_t trials = 0;
  std::string params_json;
};

std::string audit_to_json(const AuditRecord& rec);

AuditRecord run_horizontal_audit(const IntegerPmf& xi, double p, int level,
                                 const ScaleTable& scales, const HeightTable& heights,
                                 std::uint64_t trials, Stream s, unsigned workers = 1);

AuditRecord run_vertical_audit(const IntegerPmf& xi, double p, int level,
                               const ScaleTable& scales, const HeightTable& heights,
                               std::uint64_t trials, Stream s, unsigned workers = 1);

AuditRecord run_ladder_audit(const IntegerPmf& xi, double p, int k_lo, int k_hi,
                             const ScaleTable& scales, const HeightTable& heights,
                             std::uint64_t trials, Stream s, unsigned workers = 1);

}  // namespace percolab
