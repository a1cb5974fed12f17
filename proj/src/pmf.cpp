#include "percolab/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "percolab/errors.hpp"

namespace percolab {

namespace {
constexpr double kMassTol = 1e-12;
}

double WeightFunction::operator()(double x) const {
  if (x < 1.0) return 1.0;
  return std::exp(c * std::sqrt(std::log(x)));
}

double WeightFunction::log_value(double x) const {
  if (x < 1.0) return 0.0;
  return c * std::sqrt(std::log(x));
}

double WeightFunction::ctilde() const {
  const double t = std::log(2.0) / c;
  return std::max(std::exp(t * t), std::exp(0.5));
}

double weight_fc(const WeightFunction& w, double x) { return w(x); }

IntegerPmf::IntegerPmf(std::vector<std::int64_t> values, std::vector<double> probs, Tail tail,
                       std::int64_t min_support)
    : values_(std::move(values)), probs_(std::move(probs)), tail_(std::move(tail)) {
  if (values_.size() != probs_.size()) throw InvalidSpec("values/probs size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (probs_[i] < 0.0) throw InvalidSpec("negative probability");
    if (values_[i] < min_support) throw InvalidSpec("support value below minimum");
    if (i > 0 && values_[i] <= values_[i - 1])
      throw InvalidSpec("support values not strictly increasing");
  }
  cum_.resize(values_.size());
  double acc = 0.0, comp = 0.0;  // Kahan, so long heads keep the 1e-12 mass invariant
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double y = probs_[i] - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
    cum_[i] = acc;
  }
  head_mass_ = acc;

  if (has_tail()) {
    const std::int64_t start = std::visit(
        [](const auto& t) -> std::int64_t {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, std::monostate>)
            return 0;
          else
            return t.start;
        },
        tail_);
    if (!values_.empty() && start <= values_.back())
      throw InvalidSpec("tail start must exceed last head atom");
    if (start < min_support) throw InvalidSpec("tail start below minimum support");
  }

  const Bracket tm = tail_mass();
  const double total = head_mass_ + tm.mid();
  if (std::fabs(total - 1.0) > kMassTol)
    throw InvalidSpec("total mass " + std::to_string(total) + " not 1");
  build_guide();
}

Bracket IntegerPmf::tail_mass() const {
  return std::visit(
      [](const auto& t) -> Bracket {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          const double v = t.scale / (1.0 - t.ratio);
          return {v, v};
        } else {
          return power_tail_sum(t.exponent, static_cast<std::uint64_t>(t.start)) * t.scale;
        }
      },
      tail_);
}

double IntegerPmf::prob(std::int64_t k) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), k);
  if (it != values_.end() && *it == k) return probs_[it - values_.begin()];
  return std::visit(
      [k](const auto& t) -> double {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          if (k < t.start) return 0.0;
          return t.scale * std::pow(t.ratio, static_cast<double>(k - t.start));
        } else {
          if (k < t.start) return 0.0;
          return t.scale * std::pow(static_cast<double>(k), -t.exponent);
        }
      },
      tail_);
}

Bracket IntegerPmf::tail_sum(std::int64_t n) const {
  double head = 0.0;
  auto it = std::lower_bound(values_.begin(), values_.end(), n);
  for (std::size_t i = it - values_.begin(); i < values_.size(); ++i) head += probs_[i];
  Bracket t = std::visit(
      [n](const auto& t) -> Bracket {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          const std::int64_t m = std::max(n, t.start);
          const double v =
              t.scale * std::pow(t.ratio, static_cast<double>(m - t.start)) / (1.0 - t.ratio);
          return {v, v};
        } else {
          const std::int64_t m = std::max(n, t.start);
          return power_tail_sum(t.exponent, static_cast<std::uint64_t>(m)) * t.scale;
        }
      },
      tail_);
  return {head + t.lo, head + t.hi};
}

std::int64_t IntegerPmf::min_value() const {
  if (!values_.empty()) return values_.front();
  return std::visit(
      [](const auto& t) -> std::int64_t {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          throw InvalidSpec("empty pmf");
        else
          return t.start;
      },
      tail_);
}

bool IntegerPmf::aperiodic() const {
  std::int64_t g = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (probs_[i] > 0.0) g = std::gcd(g, values_[i]);
    if (g == 1) return true;
  }
  if (has_tail()) {
    // a parametric tail carries consecutive integers
    return true;
  }
  return g == 1;
}

void IntegerPmf::build_guide() {
  const std::size_t g = std::max<std::size_t>(16, 2 * values_.size());
  guide_.assign(g, 0);
  std::size_t j = 0;
  for (std::size_t i = 0; i < g; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(g);
    while (j < cum_.size() && cum_[j] <= u) ++j;
    guide_[i] = static_cast<std::uint32_t>(j);
  }
}

std::int64_t IntegerPmf::sample(double u) const {
  if (!cum_.empty() && u < cum_.back()) {
    const std::size_t g = guide_.size();
    std::size_t j = guide_[std::min<std::size_t>(g - 1, static_cast<std::size_t>(u * g))];
    while (j < cum_.size() && cum_[j] <= u) ++j;
    if (j < cum_.size()) return values_[j];
  }
  if (!has_tail()) return values_.back();

  return std::visit(
      [this, u](const auto& t) -> std::int64_t {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return values_.back();
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          // smallest m >= 0 with head + scale (1 - r^(m+1)) / (1-r) > u
          const double q = (u - head_mass_) * (1.0 - t.ratio) / t.scale;
          double m_est = 0.0;
          if (q < 1.0) m_est = std::floor(std::log1p(-q) / std::log(t.ratio));
          std::int64_t m = std::max<std::int64_t>(0, static_cast<std::int64_t>(m_est) - 2);
          auto cum_at = [&](std::int64_t mm) {
            return head_mass_ +
                   t.scale * (1.0 - std::pow(t.ratio, static_cast<double>(mm + 1))) /
                       (1.0 - t.ratio);
          };
          while (cum_at(m) <= u && m < (1ll << 40)) ++m;
          return t.start + m;
        } else {
          // smallest k >= start with P(X > k) < 1 - u
          const double rem = std::max(1.0 - u, 1e-300);
          const double target = rem / t.scale;  // sum_{j>k} j^(-e) < target
          double k_est =
              std::pow((t.exponent - 1.0) * target, 1.0 / (1.0 - t.exponent));
          std::int64_t k =
              std::max(t.start, static_cast<std::int64_t>(k_est) - 2);
          while (k < (1ll << 50)) {
            const Bracket s = power_tail_sum(t.exponent, static_cast<std::uint64_t>(k + 1));
            if (s.mid() * t.scale < rem) break;
            ++k;
          }
          return k;
        }
      },
      tail_);
}

std::string spec_family(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Deterministic>) return "Deterministic";
        if constexpr (std::is_same_v<T, UniformRange>) return "UniformRange";
        if constexpr (std::is_same_v<T, Zeta>) return "Zeta";
        if constexpr (std::is_same_v<T, BorderlineLog>) return "BorderlineLog";
      },
      spec);
}

namespace {

IntegerPmf build_borderline(const BorderlineLog& b) {
  if (b.c <= 0.0 || b.eps <= 0.0) throw InvalidSpec("BorderlineLog needs c > 0, eps > 0");
  if (b.cutoff < 3) throw InvalidSpec("BorderlineLog cutoff must be >= 3");

  auto log_mass = [&](double k) {
    const double lk = std::log(k);
    return -2.0 * lk - b.c * std::sqrt(lk) - (1.0 + b.eps) * std::log(lk);
  };
  // remainder past K is at most exp(-c sqrt(log K)) (log K)^-(1+eps) / K,
  // every factor of the integrand being decreasing
  auto rem_upper = [&](double K) {
    const double lk = std::log(K);
    return std::exp(-b.c * std::sqrt(lk)) * std::pow(lk, -(1.0 + b.eps)) / K;
  };

  std::vector<std::int64_t> values;
  std::vector<double> masses;
  double acc = 0.0;
  const std::int64_t cap = b.cutoff + (1ll << 22);
  std::int64_t k = b.cutoff;
  for (; k <= cap; ++k) {
    const double m = std::exp(log_mass(static_cast<double>(k)));
    values.push_back(k);
    masses.push_back(m);
    acc += m;
    if (rem_upper(static_cast<double>(k)) <= 1e-13 * acc && k >= b.cutoff + 8) break;
  }
  const double rem = rem_upper(static_cast<double>(k));

  if (rem <= 1e-13 * acc) {
    const double z = acc + 0.5 * rem;
    for (auto& m : masses) m /= z;
    return IntegerPmf(std::move(values), std::move(masses), std::monostate{});
  }

  // truncation cap reached (small c): carry the remainder as a fitted
  // quadratic power tail and flag the pmf as carrying an approximate tail
  const double rem_lo = std::exp(log_mass(static_cast<double>(k + 1)));
  const double rem_mid = 0.5 * (rem + rem_lo);
  const double z = acc + rem_mid;
  for (auto& m : masses) m /= z;
  const double tail_norm = power_tail_sum(2.0, static_cast<std::uint64_t>(k + 1)).mid();
  PowerTail tail{k + 1, 2.0, (rem_mid / z) / tail_norm};
  IntegerPmf pmf(std::move(values), std::move(masses), tail);
  pmf.mark_approx_tail();
  return pmf;
}

}  // namespace

IntegerPmf build_pmf(const DistributionSpec& spec) {
  return std::visit(
      [](const auto& s) -> IntegerPmf {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          if (s.d < 1) throw InvalidSpec("Deterministic needs d >= 1");
          return IntegerPmf({s.d}, {1.0}, std::monostate{});
        } else if constexpr (std::is_same_v<T, UniformRange>) {
          if (s.a < 1 || s.a > s.b) throw InvalidSpec("UniformRange needs 1 <= a <= b");
          std::vector<std::int64_t> v;
          std::vector<double> p;
          const double w = 1.0 / static_cast<double>(s.b - s.a + 1);
          for (std::int64_t k = s.a; k <= s.b; ++k) {
            v.push_back(k);
            p.push_back(w);
          }
          return IntegerPmf(std::move(v), std::move(p), std::monostate{});
        } else if constexpr (std::is_same_v<T, Zeta>) {
          if (s.s <= 2.0) throw InvalidSpec("Zeta needs s > 2");
          if (s.cutoff < 1) throw InvalidSpec("Zeta cutoff must be >= 1");
          const double z = power_tail_sum(s.s, 1).mid();
          std::vector<std::int64_t> v;
          std::vector<double> p;
          for (std::int64_t k = 1; k <= s.cutoff; ++k) {
            v.push_back(k);
            p.push_back(std::pow(static_cast<double>(k), -s.s) / z);
          }
          PowerTail tail{s.cutoff + 1, s.s, 1.0 / z};
          return IntegerPmf(std::move(v), std::move(p), tail);
        } else {
          return build_borderline(s);
        }
      },
      spec);
}

Bracket mean_xi_bracket(const IntegerPmf& pmf) {
  double head = 0.0;
  for (std::size_t i = 0; i < pmf.values().size(); ++i)
    head += static_cast<double>(pmf.values()[i]) * pmf.probs()[i];
  Bracket tail = std::visit(
      [](const auto& t) -> Bracket {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          // sum_{k>=m} k r^(k-m) = m/(1-r) + r/(1-r)^2
          const double r = t.ratio;
          const double v = t.scale * (static_cast<double>(t.start) / (1.0 - r) +
                                      r / ((1.0 - r) * (1.0 - r)));
          return {v, v};
        } else {
          if (t.exponent <= 2.0) throw InfiniteMean("power tail with exponent <= 2");
          return weighted_power_tail_mean(t.exponent, 0.0, static_cast<std::uint64_t>(t.start)) *
                 t.scale;
        }
      },
      pmf.tail());
  return {head + tail.lo, head + tail.hi};
}

double mean_xi(const IntegerPmf& pmf) { return mean_xi_bracket(pmf).mid(); }

namespace {

// E[g(X) 1{X>=1}] with g(k) = F_c(k) or k F_c(k); certified enclosure.
MomentResult weighted_moment(const IntegerPmf& pmf, const WeightFunction& w, bool with_k) {
  double head = 0.0;
  for (std::size_t i = 0; i < pmf.values().size(); ++i) {
    const std::int64_t v = pmf.values()[i];
    if (v < 1) continue;
    double g = w(static_cast<double>(v));
    if (with_k) g *= static_cast<double>(v);
    head += g * pmf.probs()[i];
  }
  Bracket tail = std::visit(
      [&](const auto& t) -> Bracket {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          // explicit terms; remainder by a dominating geometric ratio
          double s = 0.0;
          std::int64_t k = t.start;
          for (;; ++k) {
            const double x = static_cast<double>(k);
            double g = w(x);
            if (with_k) g *= x;
            const double term = t.scale * std::pow(t.ratio, static_cast<double>(k - t.start)) * g;
            s += term;
            // ratio bound for g(k+1)/g(k), decreasing in k
            double rb = std::exp(w.c * (std::sqrt(std::log(x + 1.0)) - std::sqrt(std::log(x))));
            if (with_k) rb *= (x + 1.0) / x;
            const double q = t.ratio * rb;
            if (q < 0.999) {
              const double rem = term * q / (1.0 - q);
              if (rem <= 1e-13 * s || rem < 1e-300) return {s, s + rem};
            }
            if (k - t.start > 2000000) return {s, s * 1.001};
          }
        } else {
          if (with_k) {
            if (t.exponent <= 2.0) throw Diverges("E[xi F_c(xi)] infinite for this tail");
            return weighted_power_tail_mean(t.exponent, w.c, static_cast<std::uint64_t>(t.start)) *
                   t.scale;
          }
          if (t.exponent <= 1.0) throw Diverges("E[F_c(xi)] infinite for this tail");
          return weighted_power_tail(t.exponent, w.c, static_cast<std::uint64_t>(t.start)) *
                 t.scale;
        }
      },
      pmf.tail());
  Bracket total{head + tail.lo, head + tail.hi};
  double err = 0.5 * total.width();
  if (pmf.approx_tail()) err += 1e-4 * (tail.hi - 0.0);
  return {total.mid(), err};
}

}  // namespace

MomentResult moment_xi_fc(const IntegerPmf& pmf, const WeightFunction& w) {
  return weighted_moment(pmf, w, true);
}

IntegerPmf stationary_delay(const IntegerPmf& pmf) {
  const double m = mean_xi(pmf);  // throws InfiniteMean for heavy tails

  if (!pmf.has_tail()) {
    const std::int64_t top = pmf.max_head_value();
    std::vector<std::int64_t> v;
    std::vector<double> p;
    // lambda_k = T(k+1)/m via exact suffix sums
    std::vector<double> suffix(static_cast<std::size_t>(top) + 2, 0.0);
    for (std::int64_t k = top; k >= 1; --k)
      suffix[static_cast<std::size_t>(k)] =
          suffix[static_cast<std::size_t>(k) + 1] + pmf.prob(k);
    for (std::int64_t k = 0; k < top; ++k) {
      v.push_back(k);
      p.push_back(suffix[static_cast<std::size_t>(k) + 1] / m);
    }
    return IntegerPmf(std::move(v), std::move(p), std::monostate{}, 0);
  }

  if (std::holds_alternative<GeometricTail>(pmf.tail())) {
    const auto& t = std::get<GeometricTail>(pmf.tail());
    std::vector<std::int64_t> v;
    std::vector<double> p;
    for (std::int64_t k = 0; k + 1 < t.start; ++k) {
      v.push_back(k);
      p.push_back(pmf.tail_sum(k + 1).mid() / m);
    }
    GeometricTail lt{t.start - 1, t.ratio, t.scale / ((1.0 - t.ratio) * m)};
    return IntegerPmf(std::move(v), std::move(p), lt, 0);
  }

  const auto& t = std::get<PowerTail>(pmf.tail());
  if (t.exponent <= 2.0) throw InfiniteMean("stationary delay needs E(xi) < infinity");
  const std::int64_t K = std::max<std::int64_t>(t.start + 1, 50000);
  std::vector<std::int64_t> v;
  std::vector<double> p;
  double acc = 0.0;
  for (std::int64_t k = 0; k < K; ++k) {
    v.push_back(k);
    const double lam = pmf.tail_sum(k + 1).mid() / m;
    p.push_back(lam);
    acc += lam;
  }
  // the true lambda tail is a Hurwitz sum; a fitted power tail with
  // exponent e-1 matches it within ~e/(2K) per atom past K
  const double residual = 1.0 - acc;
  const double norm = power_tail_sum(t.exponent - 1.0, static_cast<std::uint64_t>(K)).mid();
  PowerTail lt{K, t.exponent - 1.0, residual / norm};
  IntegerPmf out(std::move(v), std::move(p), lt, 0);
  out.mark_approx_tail();
  return out;
}

MomentResult moment_rho_fc(const IntegerPmf& pmf, const WeightFunction& w) {
  IntegerPmf lambda = stationary_delay(pmf);
  return weighted_moment(lambda, w, false);
}

LiftReport aperiodic_lift(const IntegerPmf& pmf, const WeightFunction& w) {
  const auto& vals = pmf.values();
  std::vector<std::int64_t> atoms;
  for (std::size_t i = 0; i < vals.size() && atoms.size() < 2; ++i)
    if (pmf.probs()[i] > 0.0) atoms.push_back(vals[i]);
  if (atoms.size() < 2 && pmf.has_tail()) {
    const std::int64_t ts = std::visit(
        [](const auto& t) -> std::int64_t {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, std::monostate>)
            return 0;
          else
            return t.start;
        },
        pmf.tail());
    atoms.push_back(ts);
  }
  if (atoms.size() < 2) throw DegenerateSupport("need two support atoms for the lift");

  LiftReport rep;
  rep.a1 = atoms[0];
  rep.a2 = atoms[1];
  const double ct = w.ctilde();
  const std::int64_t ct_ceil = static_cast<std::int64_t>(std::ceil(ct));
  rep.ctilde_binds = ct_ceil >= rep.a2;
  rep.a0 = std::max(rep.a2, ct_ceil) + 1;
  if (static_cast<double>(rep.a0 - 1) <= ct) rep.a0 += 1;

  const std::int64_t a0 = rep.a0, a1 = rep.a1;
  double mass_lo = 0.0;  // P(xi <= a1) -> a0 - 1
  double mass_mid = 0.0; // P(a1 < xi <= a0) -> a0
  std::vector<std::int64_t> v;
  std::vector<double> p;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] <= a1)
      mass_lo += pmf.probs()[i];
    else if (vals[i] <= a0)
      mass_mid += pmf.probs()[i];
  }
  Tail new_tail = std::monostate{};
  if (pmf.has_tail()) {
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (!std::is_same_v<T, std::monostate>) {
            if (t.start <= a0) {
              if (t.start <= a1)
                mass_lo += pmf.tail_sum(t.start).mid() - pmf.tail_sum(a1 + 1).mid();
              mass_mid += pmf.tail_sum(std::max(t.start, a1 + 1)).mid() -
                          pmf.tail_sum(a0 + 1).mid();
              if constexpr (std::is_same_v<T, GeometricTail>) {
                new_tail = GeometricTail{
                    a0 + 1, t.ratio,
                    t.scale * std::pow(t.ratio, static_cast<double>(a0 + 1 - t.start))};
              } else {
                new_tail = PowerTail{a0 + 1, t.exponent, t.scale};
              }
            } else {
              new_tail = t;
            }
          }
        },
        pmf.tail());
  }
  v.push_back(a0 - 1);
  p.push_back(mass_lo);
  v.push_back(a0);
  p.push_back(mass_mid);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] > a0) {
      v.push_back(vals[i]);
      p.push_back(pmf.probs()[i]);
    }
  }
  rep.lifted = IntegerPmf(std::move(v), std::move(p), new_tail);
  if (pmf.approx_tail()) rep.lifted.mark_approx_tail();
  return rep;
}

std::string spec_to_json(const DistributionSpec& spec) {
  nlohmann::json j;
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          j = {{"family", "Deterministic"}, {"d", s.d}};
        } else if constexpr (std::is_same_v<T, UniformRange>) {
          j = {{"family", "UniformRange"}, {"a", s.a}, {"b", s.b}};
        } else if constexpr (std::is_same_v<T, Zeta>) {
          j = {{"family", "Zeta"}, {"s", s.s}, {"cutoff", s.cutoff}};
        } else {
          j = {{"family", "BorderlineLog"}, {"c", s.c}, {"eps", s.eps}, {"cutoff", s.cutoff}};
        }
      },
      spec);
  return j.dump();
}

DistributionSpec spec_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const std::string fam = j.at("family").get<std::string>();
  if (fam == "Deterministic") return Deterministic{j.at("d").get<std::int64_t>()};
  if (fam == "UniformRange")
    return UniformRange{j.at("a").get<std::int64_t>(), j.at("b").get<std::int64_t>()};
  if (fam == "Zeta") return Zeta{j.at("s").get<double>(), j.at("cutoff").get<std::int64_t>()};
  if (fam == "BorderlineLog")
    return BorderlineLog{j.at("c").get<double>(), j.at("eps").get<double>(),
                         j.at("cutoff").get<std::int64_t>()};
  throw InvalidSpec("unknown family " + fam);
}

std::string pmf_to_csv(const IntegerPmf& pmf, std::size_t max_rows) {
  std::ostringstream os;
  os << "value,prob\n";
  char buf[64];
  std::size_t rows = 0;
  for (std::size_t i = 0; i < pmf.values().size() && rows < max_rows; ++i, ++rows) {
    std::snprintf(buf, sizeof buf, "%.17g", pmf.probs()[i]);
    os << pmf.values()[i] << "," << buf << "\n";
  }
  if (pmf.has_tail() && rows < max_rows) {
    std::int64_t k = pmf.max_head_value() + 1;
    for (; rows < max_rows; ++rows, ++k) {
      const double q = pmf.prob(k);
      if (q < 1e-15) break;
      std::snprintf(buf, sizeof buf, "%.17g", q);
      os << k << "," << buf << "\n";
    }
  }
  return os.str();
}

}  // namespace percolab
