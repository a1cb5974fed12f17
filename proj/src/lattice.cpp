#include "percolab/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "percolab/errors.hpp"

namespace percolab {

namespace {
std::uint64_t edge_id(bool horizontal, std::int64_t x, std::int64_t y) {
  return (static_cast<std::uint64_t>(horizontal) << 62) |
         (static_cast<std::uint64_t>(x) << 31) | static_cast<std::uint64_t>(y);
}
}  // namespace

void EdgeConfig::init(const EnvironmentSample& env, const WindowConfig& window, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("p must be in [0,1]");
  if (window.columns < 1 || window.rows < 1) throw InvalidSpec("window must be at least 1x1");
  formulation_ = window.formulation;
  width_ = window.columns;
  height_ = window.rows;
  p_ = p;

  if (formulation_ == Formulation::UnitColumns) {
    if (env.span() < width_) throw EnvTooShort("environment does not reach the window edge");
    on_lambda_.assign(static_cast<std::size_t>(width_) + 1, 0);
    for (auto pt : env.points) {
      if (pt >= 0 && pt <= width_) on_lambda_[static_cast<std::size_t>(pt)] = 1;
    }
  } else {
    if (static_cast<std::int64_t>(env.points.size()) < width_ + 1)
      throw EnvTooShort("need columns+1 renewal points");
    gap_.assign(static_cast<std::size_t>(width_), 0);
    h_exponent_.assign(static_cast<std::size_t>(width_), 1.0);
    for (std::int64_t i = 0; i < width_; ++i) {
      gap_[static_cast<std::size_t>(i)] =
          env.points[static_cast<std::size_t>(i) + 1] - env.points[static_cast<std::size_t>(i)];
      h_exponent_[static_cast<std::size_t>(i)] = static_cast<double>(gap_[static_cast<std::size_t>(i)]);
    }
  }
}

double EdgeConfig::v_prob(std::int64_t x) const {
  if (formulation_ == Formulation::UnitColumns)
    return on_lambda_[static_cast<std::size_t>(x)] ? p_ : 0.0;
  return p_;
}

double EdgeConfig::h_prob(std::int64_t x) const {
  if (formulation_ == Formulation::UnitColumns) return p_;
  return std::pow(p_, h_exponent_[static_cast<std::size_t>(x)]);
}

EdgeConfig EdgeConfig::sample_direct(const EnvironmentSample& env, const WindowConfig& window,
                                     double p, Stream& s) {
  EdgeConfig cfg;
  cfg.init(env, window, p);
  const std::size_t w = static_cast<std::size_t>(cfg.width_);
  const std::size_t h = static_cast<std::size_t>(cfg.height_);
  cfg.v_bits_.assign((w + 1) * h, 0);
  cfg.h_bits_.assign(w * (h + 1), 0);
  for (std::int64_t x = 0; x <= cfg.width_; ++x) {
    const double pv = cfg.v_prob(x);
    for (std::int64_t y = 0; y < cfg.height_; ++y) {
      const double u = s.next_unit();
      cfg.v_bits_[static_cast<std::size_t>(x) * h + static_cast<std::size_t>(y)] = u < pv;
    }
  }
  for (std::int64_t x = 0; x < cfg.width_; ++x) {
    const double ph = cfg.h_prob(x);
    for (std::int64_t y = 0; y <= cfg.height_; ++y) {
      const double u = s.next_unit();
      cfg.h_bits_[static_cast<std::size_t>(x) * (h + 1) + static_cast<std::size_t>(y)] = u < ph;
    }
  }
  return cfg;
}

EdgeConfig EdgeConfig::uniform_field(const EnvironmentSample& env, const WindowConfig& window,
                                     double p, std::uint64_t field_seed) {
  EdgeConfig cfg;
  cfg.init(env, window, p);
  cfg.field_ = true;
  cfg.seed_ = field_seed;
  return cfg;
}

EdgeConfig EdgeConfig::from_bits(std::int64_t width, std::int64_t height,
                                 std::vector<std::uint8_t> v_bits,
                                 std::vector<std::uint8_t> h_bits) {
  EdgeConfig cfg;
  cfg.formulation_ = Formulation::UnitColumns;
  cfg.width_ = width;
  cfg.height_ = height;
  cfg.p_ = 0.0;
  cfg.on_lambda_.assign(static_cast<std::size_t>(width) + 1, 1);
  if (v_bits.size() != static_cast<std::size_t>(width + 1) * static_cast<std::size_t>(height) ||
      h_bits.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height + 1))
    throw InvalidSpec("bit array sizes do not match the window");
  cfg.v_bits_ = std::move(v_bits);
  cfg.h_bits_ = std::move(h_bits);
  return cfg;
}

void EdgeConfig::set_p(double p) {
  if (!field_) throw InvalidSpec("set_p needs uniform-field mode");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidSpec("p must be in [0,1]");
  p_ = p;
}

bool EdgeConfig::is_v_open(std::int64_t x, std::int64_t y) const {
  if (field_) return unit_from_hash(seed_, edge_id(false, x, y)) < v_prob(x);
  return v_bits_[static_cast<std::size_t>(x) * static_cast<std::size_t>(height_) +
                 static_cast<std::size_t>(y)] != 0;
}

bool EdgeConfig::is_h_open(std::int64_t x, std::int64_t y) const {
  if (field_) return unit_from_hash(seed_, edge_id(true, x, y)) < h_prob(x);
  return h_bits_[static_cast<std::size_t>(x) * (static_cast<std::size_t>(height_) + 1) +
                 static_cast<std::size_t>(y)] != 0;
}

void DisjointSetForest::reset(std::size_t n) {
  parent_.resize(n);
  rank_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  components_ = n;
}

std::size_t DisjointSetForest::find(std::size_t a) {
  std::size_t root = a;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[a] != root) {
    const std::size_t next = parent_[a];
    parent_[a] = static_cast<std::uint32_t>(root);
    a = next;
  }
  return root;
}

bool DisjointSetForest::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = static_cast<std::uint32_t>(a);
  if (rank_[a] == rank_[b]) ++rank_[a];
  --components_;
  return true;
}

namespace {

bool crossing_impl(const EdgeConfig& cfg, const Rect& r, bool horizontal, bool top_closed) {
  if (!(r.x0 < r.x1 && r.y0 < r.y1)) throw RectOutOfWindow("degenerate rect");
  if (r.x0 < 0 || r.y0 < 0 || r.x1 > cfg.width() || r.y1 > cfg.height())
    throw RectOutOfWindow("rect exceeds the window");

  const std::size_t w = static_cast<std::size_t>(r.width()) + 1;
  const std::size_t h = static_cast<std::size_t>(r.height()) + 1;
  DisjointSetForest dsf(w * h + 2);
  const std::size_t src = w * h, dst = w * h + 1;
  auto idx = [&](std::int64_t x, std::int64_t y) {
    return static_cast<std::size_t>(x - r.x0) * h + static_cast<std::size_t>(y - r.y0);
  };

  for (std::int64_t x = r.x0; x < r.x1; ++x)
    for (std::int64_t y = r.y0; y < r.y1; ++y) {
      if (cfg.is_v_open(x, y)) dsf.unite(idx(x, y), idx(x, y + 1));
      if (cfg.is_h_open(x, y)) dsf.unite(idx(x, y), idx(x + 1, y));
    }
  if (top_closed)
    for (std::int64_t x = r.x0; x < r.x1; ++x)
      if (cfg.is_h_open(x, r.y1)) dsf.unite(idx(x, r.y1), idx(x + 1, r.y1));

  if (horizontal) {
    for (std::int64_t y = r.y0; y <= r.y1; ++y) {
      dsf.unite(src, idx(r.x0, y));
      dsf.unite(dst, idx(r.x1, y));
    }
  } else {
    for (std::int64_t x = r.x0; x <= r.x1; ++x) {
      dsf.unite(src, idx(x, r.y0));
      dsf.unite(dst, idx(x, r.y1));
    }
  }
  return dsf.connected(src, dst);
}

}  // namespace

bool crossing_h(const EdgeConfig& cfg, const Rect& rect) {
  return crossing_impl(cfg, rect, true, false);
}

bool crossing_v(const EdgeConfig& cfg, const Rect& rect) {
  return crossing_impl(cfg, rect, false, false);
}

bool crossing_h_top_closed(const EdgeConfig& cfg, const Rect& rect) {
  return crossing_impl(cfg, rect, true, true);
}

}  // namespace percolab
