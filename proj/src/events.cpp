#include "percolab/events.hpp"

#include <algorithm>

#include "percolab/errors.hpp"

namespace percolab {

bool event_H(const EdgeConfig& cfg, std::int64_t i, std::int64_t j, int k,
             const ScaleTable& scales, const HeightTable& heights) {
  const std::int64_t L = scales.L_int(k);
  const std::int64_t H = heights.H_int(k);
  return crossing_h(cfg, Rect{i * L, (i + 2) * L, j * H, (j + 1) * H});
}

bool event_V(const EdgeConfig& cfg, std::int64_t i, std::int64_t j, int k,
             const ScaleTable& scales, const HeightTable& heights) {
  const std::int64_t L = scales.L_int(k);
  const std::int64_t H = heights.H_int(k);
  return crossing_v(cfg, Rect{i * L, (i + 1) * L, j * H, (j + 2) * H});
}

bool strip_event_S(const EdgeConfig& cfg, int level, std::int64_t j, const ScaleTable& scales,
                   const HeightTable& heights) {
  const std::int64_t L1 = scales.L_int(level);
  const std::int64_t H = heights.H_int(level - 1);
  return crossing_h(cfg, Rect{0, 2 * L1, 2 * j * H, (2 * j + 2) * H});
}

std::optional<std::pair<std::int64_t, std::int64_t>> gamma_star_range(
    int level, const LabelGrid& labels, int parent, const ScaleTable& scales) {
  const int k = level - 1;
  const std::int64_t ratio =
      static_cast<std::int64_t>(scales.ratio[static_cast<std::size_t>(level)].get_si());
  if (labels.count(k) < 2 * ratio) throw WindowTooSmall("labels do not cover both parents");

  std::int64_t first = -1, last = -1;
  for (std::int64_t j = parent * ratio; j < (parent + 1) * ratio; ++j) {
    if (labels.is_bad(k, j)) {
      if (first < 0) first = j;
      last = j;
    }
  }
  if (first < 0) return std::nullopt;
  if (last - first > 1) throw TooManyBadChildren("parent interval is not good");

  const std::int64_t L = scales.L_int(k);
  const std::int64_t span = 2 * scales.L_int(level);
  const std::int64_t lo = std::max<std::int64_t>(0, (first - 1) * L);
  const std::int64_t hi = std::min<std::int64_t>(span, (first + 3) * L);
  return std::make_pair(lo, hi);
}

bool gamma_paths_open(const EdgeConfig& cfg, int level, const LabelGrid& labels,
                      const ScaleTable& scales, const HeightTable& heights) {
  const std::int64_t y = 2 * heights.H_int(level - 1);
  for (int parent = 0; parent < 2; ++parent) {
    const auto range = gamma_star_range(level, labels, parent, scales);
    if (!range) continue;
    for (std::int64_t m = range->first; m < range->second; ++m)
      if (!cfg.is_h_open(m, y)) return false;
  }
  return true;
}

ContainmentSample containment_check_horizontal(const EdgeConfig& cfg, int level,
                                               const LabelGrid& labels, const ScaleTable& scales,
                                               const HeightTable& heights) {
  const int k = level - 1;
  const std::int64_t ratio =
      static_cast<std::int64_t>(scales.ratio[static_cast<std::size_t>(level)].get_si());

  ContainmentSample out;
  bool ante = gamma_paths_open(cfg, level, labels, scales, heights);
  for (std::int64_t i = 0; ante && i < 2 * ratio; ++i) {
    const bool good_i = !labels.is_bad(k, i);
    if (good_i && !event_V(cfg, i, 0, k, scales, heights)) ante = false;
    if (ante && i + 1 < 2 * ratio && good_i && !labels.is_bad(k, i + 1) &&
        !event_H(cfg, i, 0, k, scales, heights))
      ante = false;
  }
  out.antecedent = ante;
  if (ante) {
    const std::int64_t L1 = scales.L_int(level);
    const std::int64_t H = heights.H_int(k);
    out.violation = !crossing_h_top_closed(cfg, Rect{0, 2 * L1, 0, 2 * H});
  }
  return out;
}

RenormGrid renormalize(const EdgeConfig& cfg, int k, const ScaleTable& scales,
                       const HeightTable& heights, std::int64_t jmax) {
  if (k + 1 >= static_cast<int>(scales.ratio.size()))
    throw OutOfRange("scale table too short for M_k");
  const std::int64_t ratio =
      static_cast<std::int64_t>(scales.ratio[static_cast<std::size_t>(k) + 1].get_si());
  RenormGrid grid;
  grid.Mk = ratio / 2 - 1;
  grid.width = grid.Mk;
  grid.height = jmax;
  if (grid.width < 1 || jmax < 1) throw GridTooSmall("renormalized grid is empty");
  grid.open.assign(static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(jmax), 0);
  for (std::int64_t j = 0; j < jmax; ++j)
    for (std::int64_t i = 0; i < grid.width; ++i)
      grid.open[static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.width) +
                static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(event_H(cfg, i, j, k, scales, heights) &&
                                    event_V(cfg, i, j, k, scales, heights));
  return grid;
}

bool rescaled_vertical_crossing(const RenormGrid& grid, std::int64_t width, std::int64_t height) {
  if (grid.width < width || grid.height < height) throw GridTooSmall("grid below requested size");
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  DisjointSetForest dsf(n + 2);
  const std::size_t src = n, dst = n + 1;
  auto idx = [&](std::int64_t i, std::int64_t j) {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(i);
  };
  for (std::int64_t j = 0; j < height; ++j)
    for (std::int64_t i = 0; i < width; ++i) {
      if (!grid.is_open(i, j)) continue;
      if (j == 0) dsf.unite(src, idx(i, j));
      if (j == height - 1) dsf.unite(dst, idx(i, j));
      if (i + 1 < width && grid.is_open(i + 1, j)) dsf.unite(idx(i, j), idx(i + 1, j));
      if (j + 1 < height && grid.is_open(i, j + 1)) dsf.unite(idx(i, j), idx(i, j + 1));
    }
  return dsf.connected(src, dst);
}

ContainmentSample containment_check_vertical(const EdgeConfig& cfg, int level,
                                             const ScaleTable& scales,
                                             const HeightTable& heights) {
  const int k = level - 1;
  const std::int64_t jmax = 2 * heights.H_int(level) / heights.H_int(k);
  const RenormGrid grid = renormalize(cfg, k, scales, heights, jmax);
  ContainmentSample out;
  out.antecedent = rescaled_vertical_crossing(grid, grid.width, jmax);
  if (out.antecedent) out.violation = !event_V(cfg, 0, 0, level, scales, heights);
  return out;
}

ContainmentSample ladder_certificate(const EdgeConfig& cfg, int k_lo, int k_hi,
                                     const ScaleTable& scales, const HeightTable& heights) {
  const std::int64_t W = 3 * scales.L_int(k_hi);
  const std::int64_t T = 2 * heights.H_int(k_hi);
  if (cfg.width() < W || cfg.height() < T)
    throw WindowTooSmall("window below 3 L_khi x 2 H_khi");

  ContainmentSample out;
  bool ante = true;
  for (int k = k_lo; ante && k <= k_hi; ++k) {
    const std::int64_t L = scales.L_int(k);
    std::int64_t count = W / L - 1;  // H_{i,0}^k must fit in the window
    if (k + 1 < static_cast<int>(scales.ratio.size())) {
      const std::int64_t mk =
          scales.ratio[static_cast<std::size_t>(k) + 1].get_si() / 2 - 1;
      count = std::min(count, mk);
    }
    for (std::int64_t i = 0; ante && i < count; ++i)
      ante = event_H(cfg, i, 0, k, scales, heights) && event_V(cfg, i, 0, k, scales, heights);
  }
  out.antecedent = ante;
  if (!ante) return out;

  // bottom row connected to the top row through the whole window
  const std::size_t w = static_cast<std::size_t>(W) + 1;
  const std::size_t h = static_cast<std::size_t>(T) + 1;
  DisjointSetForest dsf(w * h + 2);
  const std::size_t src = w * h, dst = w * h + 1;
  auto idx = [&](std::int64_t x, std::int64_t y) {
    return static_cast<std::size_t>(x) * h + static_cast<std::size_t>(y);
  };
  for (std::int64_t x = 0; x <= W; ++x)
    for (std::int64_t y = 0; y <= T; ++y) {
      if (y < T && cfg.is_v_open(x, y)) dsf.unite(idx(x, y), idx(x, y + 1));
      if (x < W && cfg.is_h_open(x, y)) dsf.unite(idx(x, y), idx(x + 1, y));
      if (y == 0) dsf.unite(src, idx(x, y));
      if (y == T) dsf.unite(dst, idx(x, y));
    }
  out.violation = !dsf.connected(src, dst);
  return out;
}

}  // namespace percolab
