#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace percolab {

// Parameters of the multiscale recursion. A = alpha e^(c^2/32) must satisfy
// 1 < A < e^(c^2/32), equivalently c/4 > sqrt(2 log A).
struct MultiscaleParams {
  double c;
  double alpha;
  double beta;
  double mu;
  std::optional<double> toy_A;       // overrides A for desk-scale runs
  std::optional<double> height_cap;  // caps the exponent in H_k

  double A() const;
  void validate() const;
};

double compute_A(double alpha, double c);

// Smallest c for which the crossing constants can be chosen: 8 sqrt(log 96).
double alpha_mu_threshold();

// Picks (alpha, mu) on the diagonal alpha = mu = t by bisection from t = 0.99
// toward 1 until w(t,t) = sqrt(32 log(96^(2/t)/t)) < c; then A^(mu/2) > 96.
std::pair<double, double> find_alpha_mu(double c);

// Exact scale sequence L_0 = floor(A), L_k = floor(A^(k+1)) L_{k-1}. The
// double A is treated as the exact rational it represents.
struct ScaleTable {
  double A;
  std::vector<mpz_class> L;
  std::vector<mpz_class> ratio;  // floor(A^(k+1))
  std::vector<double> r;         // r(k,A)
  std::vector<double> logL;

  std::int64_t L_int(int k) const;  // throws OutOfRange when L_k exceeds int64
};

ScaleTable scale_table(double A, int kmax);

double r_of(double A, int k);

struct InequalityCheck {
  int k;
  std::string id;
  bool pass;
  double margin;  // log(rhs) - log(lhs), nonnegative when pass
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
  std::string to_csv() const;  // k, inequality-id, pass, margin
};

// Every scale-table inequality family, cross-multiplied in exact integer
// arithmetic. Zero tolerance.
InequalityReport verify_scale_inequalities(double A, int kmax);

// Heights H_0 = 100, H_k = 2 ceil(exp(L_k^(1-beta/(k+1)))) H_{k-1}, carried in
// log space; with height_cap active the capped integer sequence is also kept.
struct HeightTable {
  std::vector<double> exponent;  // L_k^(1-beta/(k+1)), possibly capped
  std::vector<double> logH;      // +inf past the double range
  std::vector<std::string> symbolic;  // textual form where logH overflowed
  std::optional<std::vector<std::int64_t>> toy;

  std::int64_t H_int(int k) const;
};

HeightTable height_table(const MultiscaleParams& params, const ScaleTable& scales, int kmax);

// The three conditions selecting k0, evaluated per k. Condition three
// compares E F_c(rho) against exp(c sqrt(log L_k)/2) using a certified lower
// bound for log L_k.
struct K0Report {
  struct Row {
    int k;
    std::array<bool, 3> cond;
    bool all() const { return cond[0] && cond[1] && cond[2]; }
  };
  std::vector<Row> rows;
  std::optional<int> minimal_k;
  double c1_used;
  double moment_rho_used;
};

K0Report check_k0_conditions(const MultiscaleParams& params, double c1, double moment_rho,
                             int kmax);

// (A^(2(k+2))/2) (pk^2 + c1 / F_c(Lk))
double pk_recursion_rhs(double pk, double c1, double A, int k, double Lk, double c);

// exp(-c sqrt(log Lk) / 2)
double pk_bound(double c, double Lk);
double pk_bound_log(double c, double logLk);

// sum_{k >= k_from} A^(k+2) exp(-(A^((k+1)(k+2)/2)/2^(k+1))^(1-mu/(k+1))),
// evaluated in log space with the geometric remainder past `horizon`.
struct TailSumReport {
  double value;          // partial sum plus remainder (upper bound)
  double remainder;      // certified bound past the horizon
  std::optional<int> minimal_k;  // smallest k_from making the sum < 1/2
};

TailSumReport tail_sum_k4(double A, double mu, int k4, int horizon);

// 1 - tail sum from k5; a certified lower bound for the ladder probability.
struct LadderBound {
  double lower_bound;
  double sum_upper;
};

LadderBound ladder_lower_bound(double A, double mu, int k5, int horizon);

// Union bound sum_{k>=k_from} 8 L_k^(2/(k+1)) exp(-c sqrt(log L_k)/2) on the
// complement labels, using certified log L_k bounds.
double corollary_union_bound(double c, double A, int k_from, int horizon);

}  // namespace percolab
