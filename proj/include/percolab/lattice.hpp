#pragma once

#include <cstdint>
#include <vector>

#include "percolab/environment.hpp"
#include "percolab/rng.hpp"

namespace percolab {

enum class Formulation { Stretched, UnitColumns };

struct WindowConfig {
  std::int64_t columns;  // UnitColumns: lattice width; Stretched: column count
  std::int64_t rows;
  Formulation formulation = Formulation::UnitColumns;
};

// Half-open rectangle [x0,x1) x [y0,y1); the vertex set is the closed box
// and the edge set drops the top-row horizontals and right-column verticals.
struct Rect {
  std::int64_t x0, x1, y0, y1;

  std::int64_t width() const { return x1 - x0; }
  std::int64_t height() const { return y1 - y0; }
};

// Open/closed states for every edge of a finite window. Direct mode stores
// sampled bits; uniform-field mode evaluates a per-edge hash against p, so
// the same field can be re-thresholded at any p' with pathwise monotone
// coupling.
class EdgeConfig {
 public:
  static EdgeConfig sample_direct(const EnvironmentSample& env, const WindowConfig& window,
                                  double p, Stream& s);
  static EdgeConfig uniform_field(const EnvironmentSample& env, const WindowConfig& window,
                                  double p, std::uint64_t field_seed);
  // Explicit bits over a fully-columned window; v sized (w+1)*h row-minor by
  // column, h sized w*(h+1).
  static EdgeConfig from_bits(std::int64_t width, std::int64_t height,
                              std::vector<std::uint8_t> v_bits, std::vector<std::uint8_t> h_bits);

  std::int64_t width() const { return width_; }
  std::int64_t height() const { return height_; }
  Formulation formulation() const { return formulation_; }
  double p() const { return p_; }
  bool is_field() const { return field_; }

  void set_p(double p);  // uniform-field mode only

  // vertical edge (x,y)-(x,y+1), x in [0..width], y in [0..height-1]
  bool is_v_open(std::int64_t x, std::int64_t y) const;
  // horizontal edge (x,y)-(x+1,y), x in [0..width-1], y in [0..height]
  bool is_h_open(std::int64_t x, std::int64_t y) const;

 private:
  EdgeConfig() = default;
  void init(const EnvironmentSample& env, const WindowConfig& window, double p);

  Formulation formulation_ = Formulation::UnitColumns;
  std::int64_t width_ = 0, height_ = 0;
  double p_ = 0.0;
  bool field_ = false;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> on_lambda_;   // UnitColumns: column carries vertical edges
  std::vector<std::int64_t> gap_;         // Stretched: gap lengths between columns
  std::vector<std::uint8_t> v_bits_, h_bits_;  // direct mode
  std::vector<double> h_exponent_;        // per-column horizontal open probability exponent

  double v_prob(std::int64_t x) const;
  double h_prob(std::int64_t x) const;
};

class DisjointSetForest {
 public:
  DisjointSetForest() = default;
  explicit DisjointSetForest(std::size_t n) { reset(n); }

  void reset(std::size_t n);
  std::size_t find(std::size_t a);
  bool unite(std::size_t a, std::size_t b);
  bool connected(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t components() const { return components_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::size_t components_ = 0;
};

// Open left-right (resp. bottom-top) path inside the rect's edge set.
bool crossing_h(const EdgeConfig& cfg, const Rect& rect);
bool crossing_v(const EdgeConfig& cfg, const Rect& rect);

// Variant keeping the top-row horizontal edges; the horizontal containment
// audit needs the detour row the gamma paths live on.
bool crossing_h_top_closed(const EdgeConfig& cfg, const Rect& rect);

}  // namespace percolab
