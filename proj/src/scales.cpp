#include "percolab/scales.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "percolab/errors.hpp"

namespace percolab {

namespace {

double mpz_log(const mpz_class& z) {
  signed long int exp;
  const double d = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(d) + static_cast<double>(exp) * std::log(2.0);
}

// log L_k enclosure without building the table: sum of log floor(A^(j+1)),
// with x/2 <= floor(x) <= x.
void logL_bounds(double logA, int k, double* lo, double* hi) {
  const double e = 0.5 * static_cast<double>(k + 1) * static_cast<double>(k + 2) * logA;
  *hi = e;
  *lo = e - static_cast<double>(k + 1) * std::log(2.0);
}

}  // namespace

double MultiscaleParams::A() const { return toy_A ? *toy_A : compute_A(alpha, c); }

void MultiscaleParams::validate() const {
  if (c <= 0.0) throw OutOfRange("c must be positive");
  if (!(alpha > std::exp(-c * c / 32.0) && alpha < 1.0))
    throw OutOfRange("alpha must lie in (e^(-c^2/32), 1)");
  if (!(mu > 0.0 && mu < beta && beta < 1.0)) throw OutOfRange("need 0 < mu < beta < 1");
  if (toy_A && *toy_A <= 1.0) throw OutOfRange("toy A must exceed 1");
  const double a = compute_A(alpha, c);
  if (!(a > 1.0 && a < std::exp(c * c / 32.0) && c / 4.0 > std::sqrt(2.0 * std::log(a))))
    throw OutOfRange("A out of range");
}

double compute_A(double alpha, double c) {
  if (!(alpha > std::exp(-c * c / 32.0) && alpha < 1.0))
    throw OutOfRange("alpha must lie in (e^(-c^2/32), 1)");
  return alpha * std::exp(c * c / 32.0);
}

double alpha_mu_threshold() { return 8.0 * std::sqrt(std::log(96.0)); }

std::pair<double, double> find_alpha_mu(double c) {
  if (c <= alpha_mu_threshold())
    throw BelowThreshold("need c > 8 sqrt(log 96) = " + std::to_string(alpha_mu_threshold()));
  auto w = [](double t) {
    return std::sqrt(32.0 * std::log(std::pow(96.0, 2.0 / t) / t));
  };
  double t = 0.99;
  for (int i = 0; i < 200 && w(t) >= c; ++i) t = 0.5 * (1.0 + t);
  if (w(t) >= c) throw BelowThreshold("no (alpha, mu) found below c");
  const double a = compute_A(t, c);
  if (!(std::pow(a, t / 2.0) > 96.0)) throw BelowThreshold("A^(mu/2) <= 96");
  return {t, t};
}

ScaleTable scale_table(double A, int kmax) {
  if (!(A > 1.0)) throw OutOfRange("A must exceed 1");
  if (kmax < 0) throw OutOfRange("kmax must be nonnegative");
  ScaleTable t;
  t.A = A;
  mpq_class a(A);  // exact value of the double
  a.canonicalize();
  mpz_class num = a.get_num(), den = a.get_den();
  mpz_class num_pow = num, den_pow = den;  // num^(k+1), den^(k+1)
  for (int k = 0; k <= kmax; ++k) {
    if (k > 0) {
      num_pow *= num;
      den_pow *= den;
    }
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), num_pow.get_mpz_t(), den_pow.get_mpz_t());
    t.ratio.push_back(fl);
    t.L.push_back(k == 0 ? fl : fl * t.L.back());
    t.r.push_back(r_of(A, k));
    t.logL.push_back(mpz_log(t.L.back()));
  }
  return t;
}

std::int64_t ScaleTable::L_int(int k) const {
  const mpz_class& v = L.at(static_cast<std::size_t>(k));
  if (!v.fits_slong_p()) throw OutOfRange("L_k exceeds 64-bit range");
  return static_cast<std::int64_t>(v.get_si());
}

double r_of(double A, int k) {
  const double logA = std::log(A);
  return 2.0 * std::log(4.0) /
             (static_cast<double>(k + 1) *
              (static_cast<double>(k + 2) * logA - 2.0 * std::log(2.0))) +
         static_cast<double>(k + 3) / static_cast<double>(k + 1);
}

bool InequalityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string InequalityReport::to_csv() const {
  std::ostringstream os;
  os << "k,inequality,pass,margin\n";
  char buf[64];
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%.6g", c.margin);
    os << c.k << "," << c.id << "," << (c.pass ? 1 : 0) << "," << buf << "\n";
  }
  return os.str();
}

InequalityReport verify_scale_inequalities(double A, int kmax) {
  const ScaleTable t = scale_table(A, kmax + 1);
  mpq_class a(A);
  a.canonicalize();
  const mpz_class num = a.get_num(), den = a.get_den();

  auto pow_z = [](const mpz_class& b, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
  };
  InequalityReport rep;
  auto add = [&](int k, const char* id, const mpz_class& lhs, const mpz_class& rhs) {
    // checks lhs <= rhs exactly; margin reported as log(rhs) - log(lhs)
    rep.checks.push_back({k, id, lhs <= rhs, mpz_log(rhs) - mpz_log(lhs)});
  };

  for (int k = 0; k <= kmax; ++k) {
    const unsigned long kp1 = static_cast<unsigned long>(k + 1);
    const unsigned long e1 = kp1;                                        // A^(k+1)
    const unsigned long e2 = kp1 * static_cast<unsigned long>(k + 2) / 2;  // exponent of L_k bound
    const unsigned long e3 = kp1 * static_cast<unsigned long>(k + 2);     // (A^(k+2))^(k+1)
    const mpz_class num1 = pow_z(num, e1), den1 = pow_z(den, e1);
    const mpz_class num2 = pow_z(num, e2), den2 = pow_z(den, e2);
    const mpz_class num3 = pow_z(num, e3), den3 = pow_z(den, e3);
    const mpz_class two_k1 = pow_z(2, kp1);
    const mpz_class four_k1 = pow_z(4, kp1);
    const mpz_class& Lk = t.L[static_cast<std::size_t>(k)];
    const mpz_class& fl = t.ratio[static_cast<std::size_t>(k)];

    add(k, "floor_lo", num1, 2 * fl * den1);              // A^(k+1) <= 2 floor(A^(k+1))
    add(k, "floor_hi", fl * den1, num1);                  // floor(A^(k+1)) <= A^(k+1)
    add(k, "Lk_lo", num2, two_k1 * Lk * den2);            // A^(e2) <= 2^(k+1) L_k
    add(k, "Lk_hi", Lk * den2, num2);                     // L_k <= A^(e2)
    add(k, "Apow_lo", Lk * Lk * den3, num3);              // L_k^2 <= A^((k+1)(k+2))
    add(k, "Apow_hi", num3, four_k1 * Lk * Lk * den3);    // A^((k+1)(k+2)) <= 4^(k+1) L_k^2
    const mpz_class& Ln = t.L[static_cast<std::size_t>(k) + 1];
    const mpz_class lhs_lo = pow_z(Lk, static_cast<unsigned long>(k + 3));
    const mpz_class rhs_lo = two_k1 * pow_z(Ln, kp1);
    add(k, "Lnext_lo", lhs_lo, rhs_lo);                   // L_k^(k+3) <= 2^(k+1) L_{k+1}^(k+1)
    add(k, "Lnext_hi", pow_z(Ln, kp1), four_k1 * lhs_lo); // L_{k+1}^(k+1) <= 4^(k+1) L_k^(k+3)
  }
  return rep;
}

HeightTable height_table(const MultiscaleParams& params, const ScaleTable& scales, int kmax) {
  if (!(params.beta > params.mu && params.beta < 1.0)) throw OutOfRange("need mu < beta < 1");
  if (kmax >= static_cast<int>(scales.L.size())) throw OutOfRange("scale table too short");
  HeightTable h;
  h.exponent.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  h.logH.assign(static_cast<std::size_t>(kmax) + 1, 0.0);
  h.symbolic.assign(static_cast<std::size_t>(kmax) + 1, "");
  h.logH[0] = std::log(100.0);
  if (params.height_cap) h.toy = std::vector<std::int64_t>{100};

  std::ostringstream sym;
  sym << "log 100";
  for (int k = 1; k <= kmax; ++k) {
    const double e_log = (1.0 - params.beta / static_cast<double>(k + 1)) * scales.logL[k];
    double e = e_log > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(e_log);
    if (params.height_cap) e = std::min(e, *params.height_cap);
    h.exponent[static_cast<std::size_t>(k)] = e;
    const double ceil_term = e > 40.0 ? e : std::log(std::ceil(std::exp(e)));
    h.logH[static_cast<std::size_t>(k)] =
        std::log(2.0) + ceil_term + h.logH[static_cast<std::size_t>(k) - 1];
    sym << " + log 2 + exp(" << e_log << ")";
    h.symbolic[static_cast<std::size_t>(k)] = sym.str();
    if (h.toy) {
      const double mult = 2.0 * std::ceil(std::exp(e));
      const double next = mult * static_cast<double>(h.toy->back());
      if (next > 9.0e18) throw OutOfRange("toy height exceeds 64-bit range");
      h.toy->push_back(static_cast<std::int64_t>(next));
    }
  }
  return h;
}

std::int64_t HeightTable::H_int(int k) const {
  if (!toy) throw OutOfRange("integer heights only available with a height cap");
  return toy->at(static_cast<std::size_t>(k));
}

K0Report check_k0_conditions(const MultiscaleParams& params, double c1, double moment_rho,
                             int kmax) {
  const double c = params.c;
  const double A = compute_A(params.alpha, c);
  const double logA = std::log(A);
  const double gap = c / 4.0 - std::sqrt(2.0 * logA);

  K0Report rep;
  rep.c1_used = c1;
  rep.moment_rho_used = moment_rho;
  for (int k = 0; k <= kmax; ++k) {
    K0Report::Row row;
    row.k = k;
    const double kk1 = static_cast<double>(k + 1), kk2 = static_cast<double>(k + 2);
    const double lhs1 = c - 2.0 * std::sqrt(kk2 / kk1) * std::sqrt(2.0 * logA) -
                        0.5 * c * std::sqrt(r_of(A, k));
    row.cond[0] = lhs1 > gap;
    const double expo2 = -gap * std::sqrt(0.5 * kk1 * kk2) * std::sqrt(logA);
    row.cond[1] = expo2 < -std::log(16.0 * (c1 + 1.0));
    double llo, lhi;
    logL_bounds(logA, k, &llo, &lhi);
    row.cond[2] = std::log(std::max(moment_rho, 1e-300)) <= 0.5 * c * std::sqrt(std::max(llo, 0.0));
    rep.rows.push_back(row);
    if (!rep.minimal_k && row.all()) {
      bool tail_ok = true;  // conditions must hold for every k from here up
      for (int j = k + 1; j <= kmax && tail_ok; ++j) {
        const double l1 = c - 2.0 * std::sqrt((j + 2.0) / (j + 1.0)) * std::sqrt(2.0 * logA) -
                          0.5 * c * std::sqrt(r_of(A, j));
        const double e2 =
            -gap * std::sqrt(0.5 * (j + 1.0) * (j + 2.0)) * std::sqrt(logA);
        double jlo, jhi;
        logL_bounds(logA, j, &jlo, &jhi);
        tail_ok = l1 > gap && e2 < -std::log(16.0 * (c1 + 1.0)) &&
                  std::log(std::max(moment_rho, 1e-300)) <= 0.5 * c * std::sqrt(std::max(jlo, 0.0));
      }
      if (tail_ok) rep.minimal_k = k;
    }
  }
  return rep;
}

double pk_recursion_rhs(double pk, double c1, double A, int k, double Lk, double c) {
  if (!(pk >= 0.0 && c1 >= 0.0 && A > 1.0 && Lk >= 1.0)) throw OutOfRange("bad inputs");
  const double fc = std::exp(c * std::sqrt(std::log(Lk)));
  return 0.5 * std::pow(A, 2.0 * static_cast<double>(k + 2)) * (pk * pk + c1 / fc);
}

double pk_bound(double c, double Lk) {
  if (Lk < 1.0) throw OutOfRange("Lk must be >= 1");
  return std::exp(-0.5 * c * std::sqrt(std::log(Lk)));
}

double pk_bound_log(double c, double logLk) { return -0.5 * c * std::sqrt(std::max(logLk, 0.0)); }

namespace {

// log of A^(k+2) exp(-(A^((k+1)(k+2)/2)/2^(k+1))^(1-mu/(k+1))); -inf when the
// inner exponent overflows (the term is then certainly below 1e-300).
double ladder_term_log(double logA, double mu, int k) {
  const double kk1 = static_cast<double>(k + 1), kk2 = static_cast<double>(k + 2);
  const double inner_log = (1.0 - mu / kk1) * (0.5 * kk1 * kk2 * logA - kk1 * std::log(2.0));
  if (inner_log > 700.0) return -std::numeric_limits<double>::infinity();
  return kk2 * logA - std::exp(inner_log);
}

// Geometric remainder past k', per the term-by-term domination
//   sum_{k >= k'} term_k <= A^(k'+2) e^(-A^(k'^2/8)/sqrt(2))
//                            / (1 - e^(-A^(k'^2/8) log A / (8 sqrt 2))),
// valid for k' > max(4 sqrt 2, 4 log 2 / log A).
double ladder_remainder(double logA, int kprime) {
  const double kd = static_cast<double>(kprime);
  if (!(kd > 4.0 * std::sqrt(2.0) && kd > 4.0 * std::log(2.0) / logA))
    return std::numeric_limits<double>::infinity();
  const double p8 = kd * kd / 8.0 * logA;  // log A^(k'^2/8)
  if (p8 > 700.0) return 0.0;
  const double x = std::exp(p8);
  const double lead = (kd + 2.0) * logA - x / std::sqrt(2.0);
  const double denom = -std::expm1(-x * logA / (8.0 * std::sqrt(2.0)));
  if (lead < -700.0) return 0.0;
  return std::exp(lead) / denom;
}

}  // namespace

TailSumReport tail_sum_k4(double A, double mu, int k4, int horizon) {
  if (!(A > 1.0 && mu > 0.0 && mu < 1.0)) throw OutOfRange("need A > 1 and mu in (0,1)");
  if (k4 < 0 || horizon < k4) throw OutOfRange("need 0 <= k4 <= horizon");
  const double logA = std::log(A);

  int h = horizon;
  while (!(static_cast<double>(h + 1) > 4.0 * std::sqrt(2.0) &&
           static_cast<double>(h + 1) > 4.0 * std::log(2.0) / logA))
    ++h;
  const double rem = ladder_remainder(logA, h + 1);

  std::vector<double> term(static_cast<std::size_t>(h) + 1, 0.0);
  for (int k = 0; k <= h; ++k) {
    const double lt = ladder_term_log(logA, mu, k);
    term[static_cast<std::size_t>(k)] = lt > 700.0 ? std::numeric_limits<double>::infinity()
                                                   : (std::isinf(lt) ? 0.0 : std::exp(lt));
  }
  auto suffix = [&](int from) {
    double s = rem;
    for (int k = h; k >= from; --k) s += term[static_cast<std::size_t>(k)];
    return s;
  };

  TailSumReport rep;
  rep.remainder = rem;
  rep.value = suffix(k4);
  for (int k = 0; k <= h; ++k) {
    if (suffix(k) < 0.5) {
      rep.minimal_k = k;
      break;
    }
  }
  return rep;
}

LadderBound ladder_lower_bound(double A, double mu, int k5, int horizon) {
  const TailSumReport t = tail_sum_k4(A, mu, k5, horizon);
  return {1.0 - t.value, t.value};
}

double corollary_union_bound(double c, double A, int k_from, int horizon) {
  const double logA = std::log(A);
  double s = 0.0;
  double last = 0.0;
  for (int k = k_from; k <= horizon; ++k) {
    double llo, lhi;
    logL_bounds(logA, k, &llo, &lhi);
    llo = std::max(llo, 0.0);
    const double lt = std::log(8.0) + 2.0 / static_cast<double>(k + 1) * lhi +
                      pk_bound_log(c, llo);
    last = lt < -700.0 ? 0.0 : std::exp(lt);
    s += last;
  }
  // terms decay superexponentially once positive margin is reached; double
  // the final term as a crude tail allowance
  return s + 2.0 * last;
}

}  // namespace percolab
