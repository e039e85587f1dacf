#pragma once

// Flat (n−1)-discs D(p, u, r), curve–disc intersection counting, parity
// classification, and the ball-window predicate.
//
// Two disc representations are supported. A plain Disc stores (p, u, r). An
// AnchoredDisc is a disc built around a known curve point z:
// p = z + ξa, u = b, r = ξ + δ. Estimators always produce anchored discs, and
// keeping (ξ, δ) separate lets radius and distance comparisons stay accurate
// when ξ is huge or δ is tiny. It also lets the root search divide out the
// crossing at z analytically instead of finding it numerically.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "fraclen/curve.hpp"
#include "fraclen/errors.hpp"
#include "fraclen/geometry.hpp"

namespace fraclen {

struct Disc {
  VecN p;
  UnitVec u;
  double r;

  Disc(VecN center, const VecN& normal, double radius) : p(std::move(center)), u(normal), r(radius) {
    if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("Disc: radius must be positive and finite");
    if (p.size() != u.vec().size()) throw DimensionError("Disc: center/normal dimension mismatch");
  }
};

/// Open ball {x : |x − center| < R}.
struct Window {
  VecN center;
  double R;

  Window(VecN c, double radius) : center(std::move(c)), R(radius) {
    if (!(R > 0.0) || !std::isfinite(R)) throw PreconditionError("Window: radius must be positive");
  }
  double diameter() const noexcept { return 2.0 * R; }
};

enum class DiscLabel { odd, even, boundary, tangential, degenerate };

inline std::string_view to_string(DiscLabel l) {
  switch (l) {
    case DiscLabel::odd: return "odd";
    case DiscLabel::even: return "even";
    case DiscLabel::boundary: return "boundary";
    case DiscLabel::tangential: return "tangential";
    case DiscLabel::degenerate: return "degenerate";
  }
  return "?";
}

struct Hit {
  double s;
  VecN z;
  double xi;  // |z − p|
};

struct DiscClass {
  std::vector<Hit> interior_hits;
  DiscLabel label = DiscLabel::even;
  int count = 0;

  bool parity_defined() const noexcept { return label == DiscLabel::odd || label == DiscLabel::even; }
};

/// Classification tolerances. tol_plane and tol_radius are multiplied by the
/// curve scale (bounding-box diagonal); tol_tangent is a bound on |t·u|.
struct Tolerances {
  double tol_plane = 1e-12;
  double tol_radius = 1e-9;
  double tol_tangent = 1e-9;
  int grid = 2048;

  void validate() const {
    if (!(tol_plane > 0.0 && tol_radius > 0.0 && tol_tangent > 0.0)) {
      throw PreconditionError("tolerances must be positive");
    }
    if (grid < 64) throw PreconditionError("root-isolation grid must have at least 64 intervals");
  }
};

/// Curve positions cached on a uniform parameter grid. Root isolation only
/// needs dot products against these nodes, so building the grid once and
/// sharing it between samples removes almost all curve evaluations.
class CurveGrid {
 public:
  explicit CurveGrid(const Curve& curve, int cells = 2048) : curve_(curve), cells_(cells), dim_(curve.dim()) {
    if (cells < 64) throw PreconditionError("CurveGrid: grid must have at least 64 intervals");
    ds_ = curve.period() / cells;
    nodes_.resize(static_cast<std::size_t>(cells + 1) * static_cast<std::size_t>(dim_));
    coords_.resize(nodes_.size());
    VecN lo = VecN::Constant(dim_, std::numeric_limits<double>::infinity());
    VecN hi = -lo;
    for (int i = 0; i <= cells; ++i) {
      const VecN x = curve.eval(node_param(i));
      std::copy(x.data(), x.data() + dim_, nodes_.begin() + static_cast<std::ptrdiff_t>(i) * dim_);
      for (int k = 0; k < dim_; ++k) coords_[static_cast<std::size_t>(k) * static_cast<std::size_t>(cells + 1) + static_cast<std::size_t>(i)] = x[k];
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    scale_ = std::max((hi - lo).norm(), std::numeric_limits<double>::min());
    build_blocks();
  }

  static constexpr int kBlockCells = 32;

  /// Ball containing every curve point of cells [first_cell, last_cell].
  struct Block {
    int first_node;
    int last_node;
    VecN center;
    double radius;
  };

  const Curve& curve() const noexcept { return curve_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  int cells() const noexcept { return cells_; }
  int dim() const noexcept { return dim_; }
  double ds() const noexcept { return ds_; }
  double scale() const noexcept { return scale_; }
  double node_param(int i) const noexcept { return i == cells_ ? curve_.s1() : curve_.s0() + i * ds_; }
  Eigen::Map<const VecN> node(int i) const {
    return Eigen::Map<const VecN>(nodes_.data() + static_cast<std::ptrdiff_t>(i) * dim_, dim_);
  }

  /// out[i − first] = (x_i − origin)·dir for nodes first..last.
  void fill_dots(const VecN& origin, const VecN& dir, int first, int last, double* out) const noexcept {
    const double c = origin.dot(dir);
    const int stride = cells_ + 1;
    const int count = last - first + 1;
    const double d0 = dir[0];
    const double* x0 = coords_.data() + first;
    for (int i = 0; i < count; ++i) out[i] = x0[i] * d0 - c;
    for (int k = 1; k < dim_; ++k) {
      const double dk = dir[k];
      const double* xk = coords_.data() + static_cast<std::ptrdiff_t>(k) * stride + first;
      for (int i = 0; i < count; ++i) out[i] += xk[i] * dk;
    }
  }

  /// Dot product (x_i − origin)·dir without materializing x_i.
  double node_dot(int i, const VecN& origin, const VecN& dir) const noexcept {
    const double* x = nodes_.data() + static_cast<std::ptrdiff_t>(i) * dim_;
    double acc = 0.0;
    for (int k = 0; k < dim_; ++k) acc += (x[k] - origin[k]) * dir[k];
    return acc;
  }

 private:
  void build_blocks() {
    for (int first = 0; first < cells_; first += kBlockCells) {
      const int last = std::min(cells_, first + kBlockCells);
      VecN lo = node(first);
      VecN hi = lo;
      double vmax = 0.0;
      for (int i = first; i <= last; ++i) {
        lo = lo.cwiseMin(node(i));
        hi = hi.cwiseMax(node(i));
        vmax = std::max(vmax, curve_.speed(node_param(i)));
      }
      VecN c = 0.5 * (lo + hi);
      double rad = 0.0;
      for (int i = first; i <= last; ++i) rad = std::max(rad, (node(i) - c).norm());
      // A point inside a cell is at most one cell's travel from either node.
      rad += vmax * ds_;
      blocks_.push_back({first, last, std::move(c), rad});
    }
  }

  Curve curve_;
  int cells_;
  int dim_;
  double ds_;
  double scale_;
  std::vector<double> nodes_;   // node-major
  std::vector<double> coords_;  // coordinate-major, for vectorized dot products
  std::vector<Block> blocks_;
};

struct Crossing {
  double s;
  bool tangential_suspect;  // |g| stayed below tol across a whole grid interval
  bool refined;             // bisection reached |g| ≤ tol
};

namespace detail {

inline int sign_of(double x) noexcept { return (x > 0.0) - (x < 0.0); }

/// g(s) = (x(s) − p)·u for an arbitrary disc.
struct PlainProbe {
  const Disc& disc;

  void node_values(const CurveGrid& grid, int first, int last, double* q) const {
    grid.fill_dots(disc.p, disc.u.vec(), first, last, q);
  }
  double value(const VecN& x) const { return (x - disc.p).dot(disc.u.vec()); }
  int sign_at(double s, const VecN& x) const {
    (void)s;
    return sign_of(value(x));
  }
  bool resolvable(double) const { return true; }
  double excess(const VecN& x) const { return (x - disc.p).norm() - disc.r; }
  double distance(const VecN& x) const { return (x - disc.p).norm(); }
  const VecN& normal() const { return disc.u.vec(); }
};

}  // namespace detail

/// Disc through a known curve point z = eval(s_z): p = z + ξa, u = b, r = ξ + δ.
struct AnchoredDisc {
  double s_z;
  VecN z;
  VecN a;
  VecN b;
  double xi;
  double delta;

  double radius() const noexcept { return xi + delta; }
  VecN center() const { return z + xi * a; }
  Disc to_disc() const { return Disc(center(), b, radius()); }

  /// |x − p| − r, evaluated without cancellation for large ξ.
  double excess(const VecN& x) const {
    const VecN y = x - z;
    const double ay = a.dot(y);
    const double num = y.squaredNorm() - 2.0 * xi * ay - delta * (2.0 * xi + delta);
    const double dist = std::sqrt(std::max(0.0, y.squaredNorm() - 2.0 * xi * ay + xi * xi));
    return num / (dist + radius());
  }
  /// |x − p|² − ξ²: negative when x is closer to the center than z is.
  double closer_than_anchor(const VecN& x) const {
    const VecN y = x - z;
    return y.squaredNorm() - 2.0 * xi * a.dot(y);
  }
};

/// Which part of the disc the anchor z lies in.
enum class PinnedRole {
  interior,  // z is an interior hit (δ > 0)
  boundary   // z lies on ∂D and is not counted
};

namespace detail {

/// g(s) = (x(s) − z)·b divided by a factor vanishing at s_z, so that the
/// known crossing at z disappears from the sign pattern. The divisor is
/// s − s_z on open curves and sin(π(s − s_z)/P) on closed ones; the closed
/// version also vanishes at s_z ± P, where the curve returns to z.
struct AnchoredProbe {
  const AnchoredDisc& disc;
  bool closed;
  double period;
  double near;       // parameter distance below which the limit sign is used
  int limit_sign;    // sign(b · x′(s_z))

  /// Writes g at nodes first..last with its sign replaced by the deflated sign.
  void node_values(const CurveGrid& grid, int first, int last, double* q) const {
    grid.fill_dots(disc.z, disc.b, first, last, q);
    const int cells = grid.cells();
    const int k = std::clamp(static_cast<int>(std::floor((disc.s_z - grid.curve().s0()) / grid.ds())), 0, cells);
    for (int i = first; i <= std::min(k, last); ++i) q[i - first] = -q[i - first];
    auto fix = [&](int i) {
      if (i < first || i > last) return;
      double& v = q[i - first];
      const double g = i <= k ? -v : v;
      v = deflated(grid.node_param(i), g) * std::max(std::abs(g), std::numeric_limits<double>::min());
    };
    // Only nodes next to s_z (and next to the seam on closed curves) can fall
    // inside the `near` window or sit exactly on s_z.
    for (int i = k - 1; i <= k + 2; ++i) fix(i);
    if (closed) {
      fix(0);
      fix(1);
      fix(cells - 1);
      fix(cells);
    }
  }
  double value(const VecN& x) const { return (x - disc.z).dot(disc.b); }
  int sign_at(double s, const VecN& x) const { return deflated(s, value(x)); }
  double excess(const VecN& x) const { return disc.excess(x); }
  /// A root closer to the anchor than `near` cannot be told apart from it.
  bool resolvable(double s) const {
    const double d = std::abs(s - disc.s_z);
    return d >= near && !(closed && period - d < near);
  }
  double distance(const VecN& x) const { return (x - disc.center()).norm(); }
  const VecN& normal() const { return disc.b; }

  int deflated(double s, double g) const {
    const double d = s - disc.s_z;
    if (std::abs(d) < near) return limit_sign;
    if (closed && period - std::abs(d) < near) return -limit_sign;
    return sign_of(g) * sign_of(d);
  }
};

struct RootScan {
  std::vector<Crossing> roots;
};

/// Sign-change scan on the cached grid followed by bisection on the probe's
/// sign function. Roots are refined until |g| ≤ tol. Blocks of cells whose
/// bounding ball stays clear of the hyperplane are skipped; with
/// `inside_only`, blocks whose ball lies outside the disc are skipped too.
/// A run of intervals lying in the hyperplane is reported once, plus once more
/// where the run enters the disc.
template <class Probe>
RootScan scan_roots(const CurveGrid& grid, const Probe& probe, double tol, bool inside_only, double radius_tol) {
  RootScan out;
  const Curve& curve = grid.curve();
  const int cells = grid.cells();
  thread_local std::vector<double> buffer;
  buffer.resize(static_cast<std::size_t>(CurveGrid::kBlockCells) + 1);
  double* q = buffer.data();

  bool prev_flat = false;  // previous interval lay inside the tolerance band
  bool prev_flat_inside = false;
  int last_scanned = -1;   // last node of the previous scanned block
  for (const auto& block : grid.blocks()) {
    if (std::abs(probe.value(block.center)) > block.radius + tol ||
        (inside_only && probe.excess(block.center) > block.radius + radius_tol)) {
      continue;
    }
    if (last_scanned != block.first_node) prev_flat = prev_flat_inside = false;
    last_scanned = block.last_node;
    const int first = block.first_node;
    probe.node_values(grid, first, block.last_node, q);
    if (first == 0 && q[0] == 0.0) {
      const bool flat_next = std::abs(q[1]) <= tol;
      if (!flat_next) out.roots.push_back({grid.node_param(0), false, true});
    }
    for (int i = first + 1; i <= block.last_node; ++i) {
      const double g0 = q[i - 1 - first];
      const double g1 = q[i - first];
      const bool small = std::abs(g0) <= tol && std::abs(g1) <= tol;
      const double lo0 = grid.node_param(i - 1);
      const double hi0 = grid.node_param(i);
      const bool flat = small && std::abs(probe.value(curve.eval(0.5 * (lo0 + hi0)))) <= tol;
      bool flat_inside = false;
      if (flat) {
        const double mid = 0.5 * (lo0 + hi0);
        flat_inside = inside_only && probe.excess(curve.eval(mid)) <= radius_tol;
        if (!prev_flat || (flat_inside && !prev_flat_inside)) out.roots.push_back({mid, true, true});
      } else if (g1 == 0.0) {
        // A root exactly on a node; the last node of a closed curve repeats node 0.
        const bool seam = curve.closed() && i == cells;
        const bool next_flat = i < cells && i < block.last_node && std::abs(q[i + 1 - first]) <= tol;
        if (!seam && !next_flat) out.roots.push_back({hi0, false, true});
      } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
        const int s_lo = g0 > 0.0 ? 1 : -1;
        double lo = lo0;
        double hi = hi0;
        bool refined = false;
        double mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
          mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          const VecN x = curve.eval(mid);
          if (std::abs(probe.value(x)) <= tol && probe.resolvable(mid)) {
            refined = true;
            break;
          }
          if (probe.sign_at(mid, x) == s_lo) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        out.roots.push_back({mid, false, refined});
      }
      prev_flat = flat;
      prev_flat_inside = flat_inside;
    }
  }
  return out;
}

template <class Probe>
DiscClass classify_roots(const CurveGrid& grid, const Probe& probe, const RootScan& scan, const Tolerances& tol,
                         double radius, DiscClass cls) {
  bool degenerate = false;
  bool tangential = false;
  bool boundary = false;
  for (const Crossing& c : scan.roots) {
    const VecN x = grid.curve().eval(c.s);
    const double e = probe.excess(x);
    if (e > radius) continue;  // outside the closed disc
    if (!c.refined) {
      degenerate = true;
      continue;
    }
    if (c.tangential_suspect) {
      tangential = true;
      continue;
    }
    if (std::abs(grid.curve().tangent(c.s).dot(probe.normal())) < tol.tol_tangent) tangential = true;
    if (std::abs(e) <= radius) {
      boundary = true;
    } else {
      cls.interior_hits.push_back({c.s, x, probe.distance(x)});
    }
  }
  cls.count = static_cast<int>(cls.interior_hits.size());
  if (degenerate) {
    cls.label = DiscLabel::degenerate;
  } else if (tangential) {
    cls.label = DiscLabel::tangential;
  } else if (boundary) {
    cls.label = DiscLabel::boundary;
  } else {
    cls.label = cls.count % 2 == 1 ? DiscLabel::odd : DiscLabel::even;
  }
  return cls;
}

}  // namespace detail

/// Roots of g(s) = (eval(s) − p)·u found on a uniform grid and refined by
/// bisection to |g| ≤ tol. A root closer than one grid cell to another root
/// of the same interval pair can be missed; raise `grid` for such curves.
inline std::vector<Crossing> hyperplane_crossings(const Curve& curve, const VecN& p, const VecN& u, int grid,
                                                  double tol) {
  if (grid < 64) throw PreconditionError("hyperplane_crossings: grid must be >= 64");
  if (!(tol > 0.0)) throw PreconditionError("hyperplane_crossings: tol must be positive");
  const CurveGrid cg(curve, grid);
  const Disc plane(p, u, 1.0);
  return detail::scan_roots(cg, detail::PlainProbe{plane}, tol, false, 0.0).roots;
}

inline DiscClass classify_disc(const CurveGrid& grid, const Disc& disc, const Tolerances& tol = {}) {
  const detail::PlainProbe probe{disc};
  const double radius_tol = tol.tol_radius * grid.scale();
  const auto scan = detail::scan_roots(grid, probe, tol.tol_plane * grid.scale(), true, radius_tol);
  return detail::classify_roots(grid, probe, scan, tol, radius_tol, {});
}

inline DiscClass classify_disc(const Curve& curve, const Disc& disc, const Tolerances& tol = {}) {
  tol.validate();
  return classify_disc(CurveGrid(curve, tol.grid), disc, tol);
}

/// Classify an anchored disc. With PinnedRole::interior the anchor z is
/// reported as an interior hit; with PinnedRole::boundary it lies on ∂D and is
/// excluded from the count.
inline DiscClass classify_anchored(const CurveGrid& grid, const AnchoredDisc& disc, PinnedRole role,
                                   const Tolerances& tol = {}) {
  const Curve& curve = grid.curve();
  const VecN dz = curve.derivative(disc.s_z);
  const double bt = disc.b.dot(dz) / dz.norm();
  const detail::AnchoredProbe probe{disc, curve.closed(), curve.period(), 1e-3 * grid.ds(),
                                    detail::sign_of(bt)};
  // Discs much smaller than the curve get a proportionally smaller radius band;
  // an absolute band would swallow them whole.
  const double radius_tol = tol.tol_radius * std::min(grid.scale(), disc.radius());
  DiscClass pinned;
  bool pinned_tangential = std::abs(bt) < tol.tol_tangent;
  bool pinned_boundary = false;
  if (role == PinnedRole::interior) {
    if (disc.delta <= radius_tol) {
      pinned_boundary = true;
    } else {
      pinned.interior_hits.push_back({disc.s_z, disc.z, disc.xi});
    }
  }
  const auto scan = detail::scan_roots(grid, probe, tol.tol_plane * grid.scale(), true, radius_tol);
  DiscClass cls = detail::classify_roots(grid, probe, scan, tol, radius_tol, std::move(pinned));
  if (cls.label != DiscLabel::degenerate) {
    if (pinned_tangential) {
      cls.label = DiscLabel::tangential;
    } else if (pinned_boundary && cls.label != DiscLabel::tangential) {
      cls.label = DiscLabel::boundary;
    }
  }
  return cls;
}

/// Interior hit closest to the center; ties go to the smaller parameter.
inline std::optional<Hit> canonical_hit(const DiscClass& cls) {
  if (!cls.parity_defined() || cls.interior_hits.empty()) return std::nullopt;
  const Hit* best = &cls.interior_hits.front();
  for (const Hit& h : cls.interior_hits) {
    if (h.xi < best->xi || (h.xi == best->xi && h.s < best->s)) best = &h;
  }
  return *best;
}

inline std::optional<Hit> canonical_hit(const Curve& curve, const Disc& disc, const DiscClass& cls) {
  (void)curve;
  (void)disc;
  return canonical_hit(cls);
}

/// True when the anchor z is the canonical hit of its own disc. Distances are
/// compared through |x − p|² − ξ², which keeps its accuracy for large ξ.
inline bool anchor_is_canonical(const AnchoredDisc& disc, const DiscClass& cls) {
  bool found_anchor = false;
  for (const Hit& h : cls.interior_hits) {
    if (h.s == disc.s_z) {
      found_anchor = true;
      continue;
    }
    const double d = disc.closer_than_anchor(h.z);
    if (d < 0.0 || (d == 0.0 && h.s < disc.s_z)) return false;
  }
  return found_anchor;
}

namespace detail {
inline double boundary_distance(double q_par, double perp_minus_r) { return std::hypot(q_par, perp_minus_r); }
}  // namespace detail

/// Whether the relative boundary sphere ∂D meets the open window ball.
inline bool boundary_meets_window(const Disc& disc, const Window& window) {
  const Decomposition d = perp_decompose(disc.p - window.center, disc.u);
  const double q_par = d.parallel.norm();
  const double q_perp = d.perpendicular.norm();
  return detail::boundary_distance(q_par, q_perp - disc.r) < window.R;
}

inline bool boundary_meets_window(const AnchoredDisc& disc, const Window& window) {
  const VecN w = disc.z - window.center;
  const double q_par = w.dot(disc.b);
  const double w_perp2 = std::max(0.0, w.squaredNorm() - q_par * q_par);
  const double aw = disc.a.dot(w);
  const double perp2 = std::max(0.0, w_perp2 + 2.0 * disc.xi * aw + disc.xi * disc.xi);
  const double r = disc.radius();
  const double gap = (w_perp2 + 2.0 * disc.xi * aw - disc.delta * (2.0 * disc.xi + disc.delta)) /
                     (std::sqrt(perp2) + r);
  return detail::boundary_distance(q_par, gap) < window.R;
}

}  // namespace fraclen
