#include "percolab/decouple.hpp"

#include <cmath>

#include "percolab/errors.hpp"
#include "percolab/parallel.hpp"

namespace percolab {

GapReport decoupling_gap(const IntegerPmf& xi, const WeightFunction& w, double c1,
                         std::int64_t m, std::int64_t n, const CoordEvent& a,
                         const CoordEvent& b, std::uint64_t trials, Stream s,
                         unsigned workers) {
  if (a.max_index() > m) throw BadEventWindow("event A reaches past coordinate m");
  if (!b.tests.empty() && b.min_index() < m + 2 * n)
    throw BadEventWindow("event B touches coordinates before m+2n");
  const std::int64_t horizon = std::max(a.max_index(), b.max_index());
  const IntegerPmf lambda = stationary_delay(xi);

  auto run = [&](std::uint64_t i) -> std::uint8_t {
    Stream t = s.substream(i);
    std::vector<std::int64_t> path(static_cast<std::size_t>(horizon) + 1);
    std::int64_t z = lambda.sample(t);
    path[0] = z;
    for (std::int64_t k = 1; k <= horizon; ++k) {
      z = z > 0 ? z - 1 : xi.sample(t) - 1;
      path[static_cast<std::size_t>(k)] = z;
    }
    const bool ia = a.eval(path);
    const bool ib = b.eval(path);
    return static_cast<std::uint8_t>((ia ? 1 : 0) | (ib ? 2 : 0));
  };
  const std::vector<std::uint8_t> out = map_trials<std::uint8_t>(trials, workers, run);

  std::uint64_t ca = 0, cb = 0, cab = 0;
  for (auto o : out) {
    ca += o & 1;
    cb += (o >> 1) & 1;
    cab += o == 3;
  }
  GapReport rep;
  rep.trials = trials;
  const double nn = static_cast<double>(trials);
  rep.p_a = static_cast<double>(ca) / nn;
  rep.p_b = static_cast<double>(cb) / nn;
  rep.p_ab = static_cast<double>(cab) / nn;
  rep.gap = rep.p_ab - rep.p_a * rep.p_b;
  // influence function h = xy - p_b x - p_a y; se = sd(h)/sqrt(N)
  double s1 = 0.0, s2 = 0.0;
  for (auto o : out) {
    const double x = o & 1 ? 1.0 : 0.0;
    const double y = (o >> 1) & 1 ? 1.0 : 0.0;
    const double h = x * y - rep.p_b * x - rep.p_a * y;
    s1 += h;
    s2 += h * h;
  }
  const double var = std::max(0.0, (s2 - s1 * s1 / nn) / std::max(1.0, nn - 1.0));
  rep.se = std::sqrt(var / nn);
  rep.bound = c1 / w(static_cast<double>(n));
  return rep;
}

ExactEventProbs exact_event_probs(const IntegerPmf& xi, const CoordEvent& a, const CoordEvent& b,
                                  std::int64_t horizon) {
  if (xi.has_tail()) throw InvalidSpec("exact event probabilities need a finite-support law");
  const std::int64_t zmax = xi.max_head_value() - 1;
  const IntegerPmf lambda = stationary_delay(xi);

  // state: (z, sat_a, sat_b) where sat flags record violations so far
  const std::size_t nz = static_cast<std::size_t>(zmax) + 1;
  auto idx = [nz](std::size_t z, bool va, bool vb) { return (z * 2 + (va ? 1 : 0)) * 2 + (vb ? 1 : 0); };

  auto violates = [](const CoordEvent& e, std::int64_t t, std::int64_t z) {
    for (const auto& test : e.tests) {
      if (test.index != t) continue;
      if (test.op == CoordTest::Op::LE ? z > test.value : z != test.value) return true;
    }
    return false;
  };

  std::vector<double> cur(nz * 4, 0.0);
  for (std::int64_t z = 0; z <= zmax; ++z) {
    const double p0 = lambda.prob(z);
    if (p0 <= 0.0) continue;
    cur[idx(static_cast<std::size_t>(z), violates(a, 0, z), violates(b, 0, z))] += p0;
  }
  for (std::int64_t t = 1; t <= horizon; ++t) {
    std::vector<double> nxt(nz * 4, 0.0);
    for (std::size_t z = 0; z < nz; ++z) {
      for (int va = 0; va < 2; ++va) {
        for (int vb = 0; vb < 2; ++vb) {
          const double p = cur[idx(z, va, vb)];
          if (p <= 0.0) continue;
          auto push = [&](std::int64_t z2, double w) {
            if (w <= 0.0) return;
            const bool nva = va || violates(a, t, z2);
            const bool nvb = vb || violates(b, t, z2);
            nxt[idx(static_cast<std::size_t>(z2), nva, nvb)] += p * w;
          };
          if (z > 0) {
            push(static_cast<std::int64_t>(z) - 1, 1.0);
          } else {
            for (std::int64_t j = 0; j <= zmax; ++j) push(j, xi.prob(j + 1));
          }
        }
      }
    }
    cur.swap(nxt);
  }
  ExactEventProbs out{0.0, 0.0, 0.0};
  for (std::size_t z = 0; z < nz; ++z) {
    for (int va = 0; va < 2; ++va) {
      for (int vb = 0; vb < 2; ++vb) {
        const double p = cur[idx(z, va, vb)];
        if (!va) out.p_a += p;
        if (!vb) out.p_b += p;
        if (!va && !vb) out.p_ab += p;
      }
    }
  }
  return out;
}

}  // namespace percolab
