#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "percolab/labels.hpp"
#include "percolab/lattice.hpp"
#include "percolab/scales.hpp"

namespace percolab {

// H_{i,j}^k: open left-right crossing of (I_i^k u I_{i+1}^k) x [jH_k,(j+1)H_k).
bool event_H(const EdgeConfig& cfg, std::int64_t i, std::int64_t j, int k,
             const ScaleTable& scales, const HeightTable& heights);

// V_{i,j}^k: open bottom-top crossing of I_i^k x [jH_k,(j+2)H_k).
bool event_V(const EdgeConfig& cfg, std::int64_t i, std::int64_t j, int k,
             const ScaleTable& scales, const HeightTable& heights);

// S_j at `level` = k+1: horizontal crossing of [0,2L_{k+1}) x [2jH_k,(2j+2)H_k).
bool strip_event_S(const EdgeConfig& cfg, int level, std::int64_t j, const ScaleTable& scales,
                   const HeightTable& heights);

// x-range [lo, hi) of the gamma detour over the first bad child of parent
// l in {0,1} at `level`; nullopt when the parent has no bad child. Throws
// TooManyBadChildren when the parent is not good.
std::optional<std::pair<std::int64_t, std::int64_t>> gamma_star_range(
    int level, const LabelGrid& labels, int parent, const ScaleTable& scales);

// Both gamma detours fully open at height 2H_{level-1}; empty paths are open.
bool gamma_paths_open(const EdgeConfig& cfg, int level, const LabelGrid& labels,
                      const ScaleTable& scales, const HeightTable& heights);

struct ContainmentSample {
  bool antecedent = false;
  bool violation = false;
};

// (all H over good pairs) & (all V over good) & (gamma paths open)  =>  S_0.
// The consequent keeps the strip's top-row horizontals: the gamma detours
// run exactly on that row, and with them removed the inclusion can fail on
// adversarial configurations.
ContainmentSample containment_check_horizontal(const EdgeConfig& cfg, int level,
                                               const LabelGrid& labels, const ScaleTable& scales,
                                               const HeightTable& heights);

// Site (i,j) open iff H_{i,j}^k and V_{i,j}^k. Neighboring sites share
// rectangle area; the six dependent offsets are listed in kDependency.
struct RenormGrid {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::int64_t Mk = 0;
  std::vector<std::uint8_t> open;

  bool is_open(std::int64_t i, std::int64_t j) const {
    return open[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(i)] != 0;
  }
  static constexpr std::array<std::pair<int, int>, 6> kDependency = {
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}};
};

RenormGrid renormalize(const EdgeConfig& cfg, int k, const ScaleTable& scales,
                       const HeightTable& heights, std::int64_t jmax);

// Open-site top-bottom crossing with nearest-neighbor steps.
bool rescaled_vertical_crossing(const RenormGrid& grid, std::int64_t width, std::int64_t height);

// rescaled bottom-top site crossing  =>  V_{0,0}^{level}.
ContainmentSample containment_check_vertical(const EdgeConfig& cfg, int level,
                                             const ScaleTable& scales,
                                             const HeightTable& heights);

// (all H_{i,0}^k & V_{i,0}^k for k in [k_lo,k_hi])  =>  some open cluster
// joins the bottom row to the top row 2H_{k_hi} of the window.
ContainmentSample ladder_certificate(const EdgeConfig& cfg, int k_lo, int k_hi,
                                     const ScaleTable& scales, const HeightTable& heights);

}  // namespace percolab
