#include "percolab/labels.hpp"

#include <algorithm>
#include <sstream>

#include "percolab/errors.hpp"
#include "percolab/parallel.hpp"

namespace percolab {

bool EnvironmentSample::has_point_in(std::int64_t a, std::int64_t b) const {
  auto it = std::lower_bound(points.begin(), points.end(), a);
  return it != points.end() && *it < b;
}

bool EnvironmentSample::contains(std::int64_t x) const {
  return std::binary_search(points.begin(), points.end(), x);
}

EnvironmentSample sample_environment(const IntegerPmf& xi, std::int64_t n_gaps,
                                     const DelaySpec& delay, Stream& s) {
  if (n_gaps < 0) throw InvalidSpec("need n_gaps >= 0");
  DelayDraw draw(xi, delay);
  EnvironmentSample env;
  env.delay_offset = draw(s);
  env.points.reserve(static_cast<std::size_t>(n_gaps) + 1);
  env.gaps.reserve(static_cast<std::size_t>(n_gaps));
  env.points.push_back(env.delay_offset);
  for (std::int64_t i = 0; i < n_gaps; ++i) {
    const std::int64_t g = xi.sample(s);
    env.gaps.push_back(g);
    env.points.push_back(env.points.back() + g);
  }
  return env;
}

EnvironmentSample sample_environment_covering(const IntegerPmf& xi, std::int64_t span,
                                              const DelayDraw& delay, Stream& s) {
  EnvironmentSample env;
  env.delay_offset = delay(s);
  env.points.push_back(env.delay_offset);
  while (env.points.back() < span) {
    const std::int64_t g = xi.sample(s);
    env.gaps.push_back(g);
    env.points.push_back(env.points.back() + g);
  }
  return env;
}

EnvironmentSample sample_environment_covering(const IntegerPmf& xi, std::int64_t span,
                                              const DelaySpec& delay, Stream& s) {
  return sample_environment_covering(xi, span, DelayDraw(xi, delay), s);
}

std::string environment_to_text(const EnvironmentSample& env) {
  std::ostringstream os;
  os << "# delay " << env.delay_offset << "\n";
  for (auto g : env.gaps) os << g << "\n";
  return os.str();
}

EnvironmentSample environment_from_text(const std::string& text) {
  EnvironmentSample env;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string word;
      ls >> word;
      if (word == "delay") ls >> env.delay_offset;
      continue;
    }
    env.gaps.push_back(std::stoll(line));
  }
  env.points.push_back(env.delay_offset);
  for (auto g : env.gaps) env.points.push_back(env.points.back() + g);
  return env;
}

LabelGrid label_intervals(const EnvironmentSample& env, const ScaleTable& scales, int k_base,
                          int k_top, std::int64_t window) {
  if (k_base < 0 || k_top < k_base || k_top >= static_cast<int>(scales.L.size()))
    throw InvalidSpec("bad scale range");
  const std::int64_t L_top = scales.L_int(k_top);
  if (window < L_top) throw WindowTooSmall("window smaller than L_{k_top}");
  if (env.span() < window) throw WindowTooSmall("environment does not cover the window");

  LabelGrid grid;
  grid.k_base = k_base;
  grid.k_top = k_top;
  grid.bad.resize(static_cast<std::size_t>(k_top - k_base) + 1);

  const std::int64_t L0 = scales.L_int(k_base);
  const std::int64_t n0 = window / L0;
  auto& base = grid.bad[0];
  base.resize(static_cast<std::size_t>(n0));
  std::size_t pt = 0;
  const auto& pts = env.points;
  while (pt < pts.size() && pts[pt] < 0) ++pt;
  for (std::int64_t i = 0; i < n0; ++i) {
    const std::int64_t lo = i * L0, hi = lo + L0;
    while (pt < pts.size() && pts[pt] < lo) ++pt;
    base[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(!(pt < pts.size() && pts[pt] < hi));
  }

  for (int k = k_base + 1; k <= k_top; ++k) {
    const std::int64_t ratio =
        static_cast<std::int64_t>(scales.ratio[static_cast<std::size_t>(k)].get_si());
    const auto& child = grid.bad[static_cast<std::size_t>(k - 1 - k_base)];
    const std::int64_t n = window / scales.L_int(k);
    auto& cur = grid.bad[static_cast<std::size_t>(k - k_base)];
    cur.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      // bad iff bad children at indices i < j with j > i + 1; equivalently
      // the first and last bad child are more than one apart
      std::int64_t first = -1, last = -1;
      for (std::int64_t j = 0; j < ratio; ++j) {
        if (child[static_cast<std::size_t>(i * ratio + j)]) {
          if (first < 0) first = j;
          last = j;
        }
      }
      cur[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(first >= 0 && last - first > 1);
    }
  }
  return grid;
}

PkEstimate estimate_pk(const IntegerPmf& xi, const ScaleTable& scales, int k, int k_base,
                       std::uint64_t trials, Stream s, unsigned workers) {
  const std::int64_t window = scales.L_int(k);
  const DelayDraw delay(xi, StationaryDelay{});
  auto run = [&](std::uint64_t i) -> std::uint8_t {
    Stream t = s.substream(i);
    const EnvironmentSample env = sample_environment_covering(xi, window, delay, t);
    const LabelGrid g = label_intervals(env, scales, k_base, k, window);
    return static_cast<std::uint8_t>(g.is_bad(k, 0));
  };
  const std::vector<std::uint8_t> out = map_trials<std::uint8_t>(trials, workers, run);
  std::uint64_t bad = 0;
  for (auto o : out) bad += o;
  PkEstimate est;
  est.k = k;
  est.trials = trials;
  est.p_hat = trials ? static_cast<double>(bad) / static_cast<double>(trials) : 0.0;
  est.wilson = wilson_interval(bad, trials);
  return est;
}

}  // namespace percolab
