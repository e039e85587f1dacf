#pragma once

// Compact C¹ parametric curves with exact tangents.
//
// A Curve is a single chart s ∈ [s0, s1] ↦ R^n, optionally periodic. Only
// one connected component is represented.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fraclen/errors.hpp"
#include "fraclen/geometry.hpp"

namespace fraclen {

enum class CurveKind { segment, circle_arc, helix, fourier, spline };

inline std::string_view to_string(CurveKind k) {
  switch (k) {
    case CurveKind::segment: return "segment";
    case CurveKind::circle_arc: return "circle_arc";
    case CurveKind::helix: return "helix";
    case CurveKind::fourier: return "fourier";
    case CurveKind::spline: return "spline";
  }
  return "?";
}

inline CurveKind curve_kind_from_string(std::string_view name) {
  for (auto k : {CurveKind::segment, CurveKind::circle_arc, CurveKind::helix, CurveKind::fourier,
                 CurveKind::spline}) {
    if (to_string(k) == name) return k;
  }
  throw CurveSpecError("unknown curve kind '" + std::string(name) + "'");
}

/// Declarative curve description. Parameter arrays are flattened row-major;
/// see make_curve for the keys each kind reads.
struct CurveSpec {
  CurveKind kind = CurveKind::segment;
  int dimension = 3;
  std::map<std::string, std::vector<double>> params;
  bool closed = false;  // spline only; other kinds decide closure themselves
};

/// Parametric map and its derivative. Implementations are immutable.
class CurveShape {
 public:
  virtual ~CurveShape() = default;
  virtual VecN position(double s) const = 0;
  virtual VecN derivative(double s) const = 0;
};

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

class Curve {
 public:
  Curve(std::shared_ptr<const CurveShape> shape, int dim, double s0, double s1, bool closed)
      : shape_(std::move(shape)), dim_(dim), s0_(s0), s1_(s1), closed_(closed) {
    require_dimension(dim, 3, "Curve");
    if (!(s1 > s0)) throw CurveSpecError("curve parameter range must satisfy s0 < s1");
  }

  int dim() const noexcept { return dim_; }
  double s0() const noexcept { return s0_; }
  double s1() const noexcept { return s1_; }
  double period() const noexcept { return s1_ - s0_; }
  bool closed() const noexcept { return closed_; }

  /// Closed curves accept any s and wrap it; open curves clamp to [s0, s1].
  double normalize(double s) const {
    if (closed_) {
      const double p = period();
      double t = std::fmod(s - s0_, p);
      if (t < 0) t += p;
      return s0_ + t;
    }
    return std::clamp(s, s0_, s1_);
  }

  VecN eval(double s) const { return shape_->position(normalize(s)); }
  VecN derivative(double s) const { return shape_->derivative(normalize(s)); }
  double speed(double s) const { return derivative(s).norm(); }
  UnitVec tangent(double s) const { return UnitVec(derivative(s)); }

  /// x ↦ scale·Q·x + shift applied to the curve.
  Curve transformed(const Matrix& q, const VecN& shift, double scale = 1.0) const;

 private:
  std::shared_ptr<const CurveShape> shape_;
  int dim_;
  double s0_;
  double s1_;
  bool closed_;
};

namespace detail {

class AffineShape final : public CurveShape {
 public:
  AffineShape(std::shared_ptr<const CurveShape> inner, Matrix q, VecN shift, double scale)
      : inner_(std::move(inner)), q_(std::move(q)), shift_(std::move(shift)), scale_(scale) {}
  VecN position(double s) const override { return scale_ * (q_ * inner_->position(s)) + shift_; }
  VecN derivative(double s) const override { return scale_ * (q_ * inner_->derivative(s)); }

 private:
  std::shared_ptr<const CurveShape> inner_;
  Matrix q_;
  VecN shift_;
  double scale_;
};

class SegmentShape final : public CurveShape {
 public:
  SegmentShape(VecN start, VecN end) : start_(std::move(start)), delta_(end - start_) {}
  VecN position(double s) const override { return start_ + s * delta_; }
  VecN derivative(double) const override { return delta_; }

 private:
  VecN start_;
  VecN delta_;
};

/// center + radius (cos θ e1 + sin θ e2) + pitch θ e3, θ = θ0 + s·dθ.
class HelixShape final : public CurveShape {
 public:
  HelixShape(VecN center, double radius, VecN e1, VecN e2, VecN e3, double pitch, double theta0,
             double dtheta)
      : center_(std::move(center)), radius_(radius), e1_(std::move(e1)), e2_(std::move(e2)),
        e3_(std::move(e3)), pitch_(pitch), theta0_(theta0), dtheta_(dtheta) {}

  VecN position(double s) const override {
    const double th = theta0_ + s * dtheta_;
    return center_ + radius_ * (std::cos(th) * e1_ + std::sin(th) * e2_) + pitch_ * th * e3_;
  }
  VecN derivative(double s) const override {
    const double th = theta0_ + s * dtheta_;
    return dtheta_ * (radius_ * (-std::sin(th) * e1_ + std::cos(th) * e2_) + pitch_ * e3_);
  }

 private:
  VecN center_;
  double radius_;
  VecN e1_, e2_, e3_;
  double pitch_;
  double theta0_;
  double dtheta_;
};

/// center + Σ_k cos_k cos(2πks) + sin_k sin(2πks), s ∈ [0, 1].
class FourierShape final : public CurveShape {
 public:
  FourierShape(VecN center, std::vector<VecN> cos_terms, std::vector<VecN> sin_terms)
      : center_(std::move(center)), cos_(std::move(cos_terms)), sin_(std::move(sin_terms)) {}

  VecN position(double s) const override {
    VecN x = center_;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * s;
      x += std::cos(w) * cos_[k] + std::sin(w) * sin_[k];
    }
    return x;
  }
  VecN derivative(double s) const override {
    VecN d = VecN::Zero(center_.size());
    for (std::size_t k = 0; k < cos_.size(); ++k) {
      const double f = 2.0 * std::numbers::pi * static_cast<double>(k + 1);
      d += f * (-std::sin(f * s) * cos_[k] + std::cos(f * s) * sin_[k]);
    }
    return d;
  }

 private:
  VecN center_;
  std::vector<VecN> cos_;
  std::vector<VecN> sin_;
};

/// Interpolating cubic spline in chord-length parameter. Natural end
/// conditions when open, periodic when closed.
class SplineShape final : public CurveShape {
 public:
  SplineShape(std::vector<VecN> nodes, bool closed) : closed_(closed) {
    if (closed) nodes.push_back(nodes.front());
    y_ = std::move(nodes);
    const std::size_t m = y_.size() - 1;  // number of intervals
    knots_.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double h = (y_[i + 1] - y_[i]).norm();
      if (!(h > 0.0)) throw CurveSpecError("spline: consecutive nodes must be distinct");
      knots_[i + 1] = knots_[i] + h;
    }
    solve_second_derivatives();
  }

  double length_param() const { return knots_.back(); }

  VecN position(double s) const override {
    const auto [i, h, l, r] = locate(s);
    return (m_[i] * (r * r * r) + m_[i + 1] * (l * l * l)) / (6.0 * h) +
           (y_[i] / h - m_[i] * h / 6.0) * r + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * l;
  }
  VecN derivative(double s) const override {
    const auto [i, h, l, r] = locate(s);
    return (-m_[i] * (r * r) + m_[i + 1] * (l * l)) / (2.0 * h) - (y_[i] / h - m_[i] * h / 6.0) +
           (y_[i + 1] / h - m_[i + 1] * h / 6.0);
  }

 private:
  struct Cell {
    std::size_t i;
    double h, l, r;  // interval width, s - t_i, t_{i+1} - s
  };

  Cell locate(double s) const {
    const std::size_t m = knots_.size() - 1;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    i = std::min(i, m - 1);
    const double h = knots_[i + 1] - knots_[i];
    return {i, h, s - knots_[i], knots_[i + 1] - s};
  }

  void solve_second_derivatives() {
    const std::size_t m = y_.size() - 1;
    const int dim = static_cast<int>(y_[0].size());
    auto h = [&](std::size_t i) { return knots_[i + 1] - knots_[i]; };
    m_.assign(m + 1, VecN::Zero(dim));
    if (closed_) {
      // Unknowns M_0..M_{m-1}, M_m = M_0, indices cyclic.
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      Eigen::MatrixXd rhs(static_cast<Eigen::Index>(m), dim);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t prev = (i + m - 1) % m;
        const double hp = h(prev);
        const double hi = h(i);
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, static_cast<Eigen::Index>(prev)) += hp;
        a(ii, ii) += 2.0 * (hp + hi);
        a(ii, static_cast<Eigen::Index>((i + 1) % m)) += hi;
        rhs.row(ii) = (6.0 * ((y_[i + 1] - y_[i]) / hi - (y_[i] - y_[prev]) / hp)).transpose();
      }
      const Eigen::MatrixXd sol = a.partialPivLu().solve(rhs);
      for (std::size_t i = 0; i < m; ++i) m_[i] = sol.row(static_cast<Eigen::Index>(i)).transpose();
      m_[m] = m_[0];
    } else {
      const std::size_t k = m - 1;  // interior unknowns M_1..M_{m-1}
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
      Eigen::MatrixXd rhs(static_cast<Eigen::Index>(k), dim);
      for (std::size_t i = 1; i < m; ++i) {
        const auto row = static_cast<Eigen::Index>(i - 1);
        if (i > 1) a(row, row - 1) = h(i - 1);
        a(row, row) = 2.0 * (h(i - 1) + h(i));
        if (i + 1 < m) a(row, row + 1) = h(i);
        rhs.row(row) = (6.0 * ((y_[i + 1] - y_[i]) / h(i) - (y_[i] - y_[i - 1]) / h(i - 1))).transpose();
      }
      const Eigen::MatrixXd sol = a.partialPivLu().solve(rhs);
      for (std::size_t i = 1; i < m; ++i) m_[i] = sol.row(static_cast<Eigen::Index>(i - 1)).transpose();
    }
  }

  bool closed_;
  std::vector<VecN> y_;
  std::vector<double> knots_;
  std::vector<VecN> m_;
};

inline const std::vector<double>& require_param(const CurveSpec& spec, const std::string& key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw CurveSpecError(std::string(to_string(spec.kind)) + ": missing parameter '" + key + "'");
  }
  for (double x : it->second) {
    if (!std::isfinite(x)) throw CurveSpecError("parameter '" + key + "' has a non-finite entry");
  }
  return it->second;
}

inline std::vector<double> param_or(const CurveSpec& spec, const std::string& key,
                                    std::vector<double> fallback) {
  return spec.params.contains(key) ? require_param(spec, key) : std::move(fallback);
}

inline VecN as_vec(const std::vector<double>& xs, int n, const std::string& key) {
  if (static_cast<int>(xs.size()) != n) {
    throw CurveSpecError("parameter '" + key + "' must have " + std::to_string(n) + " entries, got " +
                         std::to_string(xs.size()));
  }
  VecN v(n);
  for (int i = 0; i < n; ++i) v[i] = xs[static_cast<std::size_t>(i)];
  return v;
}

inline std::vector<VecN> as_points(const std::vector<double>& xs, int n, const std::string& key) {
  if (xs.size() % static_cast<std::size_t>(n) != 0) {
    throw CurveSpecError("parameter '" + key + "' length is not a multiple of the dimension");
  }
  std::vector<VecN> pts;
  for (std::size_t i = 0; i < xs.size(); i += static_cast<std::size_t>(n)) {
    pts.push_back(as_vec({xs.begin() + static_cast<std::ptrdiff_t>(i),
                          xs.begin() + static_cast<std::ptrdiff_t>(i) + n},
                         n, key));
  }
  return pts;
}

inline VecN axis(int n, int i) {
  VecN e = VecN::Zero(n);
  e[i] = 1.0;
  return e;
}

inline VecN scalar_param(const CurveSpec& spec, const std::string& key, double fallback) {
  const auto v = param_or(spec, key, {fallback});
  if (v.size() != 1) throw CurveSpecError("parameter '" + key + "' must be a scalar");
  return make_vec({v[0]});
}

inline void require_orthonormal(const std::vector<VecN>& frame) {
  for (std::size_t i = 0; i < frame.size(); ++i) {
    for (std::size_t j = 0; j < frame.size(); ++j) {
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(frame[i].dot(frame[j]) - want) > 1e-9) {
        throw CurveSpecError("frame vectors e1, e2[, e3] must be orthonormal");
      }
    }
  }
}

/// Rejects parametrizations whose speed vanishes somewhere on a dense sample.
inline void require_regular(const CurveShape& shape, double s0, double s1) {
  constexpr int kSamples = 4096;
  double vmax = 0.0;
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSamples; ++i) {
    const double v = shape.derivative(s0 + (s1 - s0) * i / kSamples).norm();
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  if (!(vmin > 1e-9 * vmax) || !std::isfinite(vmax)) {
    throw CurveSpecError("curve is not regular: speed vanishes on the parameter range");
  }
}

}  // namespace detail

inline Curve Curve::transformed(const Matrix& q, const VecN& shift, double scale) const {
  if (q.rows() != dim_ || q.cols() != dim_ || shift.size() != dim_) {
    throw DimensionError("Curve::transformed: matrix/shift dimension mismatch");
  }
  return Curve(std::make_shared<detail::AffineShape>(shape_, q, shift, scale), dim_, s0_, s1_, closed_);
}

/// Build a curve from its declarative description.
///
/// Parameter keys by kind (vectors have `dimension` entries):
///   segment     start, end                               s ∈ [0, 1]
///   circle_arc  radius; center, e1, e2, angles=[θ0, θ1]    s ∈ [0, 1]
///   helix       radius, pitch; center, e1, e2, e3, range=[t0, t1]   s = t
///   fourier     center, cos, sin (K vectors each)         s ∈ [0, 1], closed
///   spline      nodes (≥ 4 points); spec.closed           chord-length s
/// Optional keys default to the origin, the coordinate axes, a full turn.
inline Curve make_curve(const CurveSpec& spec) {
  using namespace detail;
  const int n = spec.dimension;
  try {
    require_dimension(n, 3, "make_curve");
  } catch (const DimensionError& e) {
    throw CurveSpecError(e.what());
  }
  const VecN origin = VecN::Zero(n);
  const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  auto vec_or = [&](const std::string& key, const VecN& fallback) {
    return spec.params.contains(key) ? as_vec(require_param(spec, key), n, key) : fallback;
  };

  switch (spec.kind) {
    case CurveKind::segment: {
      const VecN a = as_vec(require_param(spec, "start"), n, "start");
      const VecN b = as_vec(require_param(spec, "end"), n, "end");
      if (!((b - a).norm() > 0.0)) throw CurveSpecError("segment: endpoints must be distinct");
      return Curve(std::make_shared<SegmentShape>(a, b), n, 0.0, 1.0, false);
    }
    case CurveKind::circle_arc:
    case CurveKind::helix: {
      const bool helix = spec.kind == CurveKind::helix;
      const double radius = scalar_param(spec, "radius", 1.0)[0];
      if (!(radius > 0.0)) throw CurveSpecError("radius must be positive");
      const VecN e1 = vec_or("e1", axis(n, 0));
      const VecN e2 = vec_or("e2", axis(n, 1));
      const VecN e3 = vec_or("e3", axis(n, 2));
      require_orthonormal(helix ? std::vector<VecN>{e1, e2, e3} : std::vector<VecN>{e1, e2});
      const VecN center = vec_or("center", origin);
      const auto range =
          param_or(spec, helix ? "range" : "angles", {0.0, 2.0 * std::numbers::pi});
      if (range.size() != 2 || !(range[1] != range[0])) {
        throw CurveSpecError(std::string(helix ? "range" : "angles") + " must be two distinct values");
      }
      const double sweep = range[1] - range[0];
      if (helix) {
        const double pitch = scalar_param(spec, "pitch", 0.0)[0];
        if (pitch == 0.0 && std::abs(std::abs(sweep) - 2.0 * std::numbers::pi) < 1e-12) {
          throw CurveSpecError("helix with zero pitch over a full turn: use circle_arc");
        }
        if (std::abs(sweep) > 2.0 * std::numbers::pi && pitch == 0.0) {
          throw CurveSpecError("helix with zero pitch overlaps itself");
        }
        // Parameter is the angle itself.
        auto shape = std::make_shared<HelixShape>(center, radius, e1, e2, e3, pitch, 0.0, 1.0);
        return Curve(shape, n, std::min(range[0], range[1]), std::max(range[0], range[1]), false);
      }
      if (std::abs(sweep) > 2.0 * std::numbers::pi + 1e-12) {
        throw CurveSpecError("circle_arc: angular sweep exceeds a full turn");
      }
      const bool closed = std::abs(std::abs(sweep) - 2.0 * std::numbers::pi) <= 1e-12;
      auto shape = std::make_shared<HelixShape>(center, radius, e1, e2, VecN::Zero(n).eval(), 0.0,
                                                range[0], sweep);
      return Curve(shape, n, 0.0, 1.0, closed);
    }
    case CurveKind::fourier: {
      const VecN center = vec_or("center", origin);
      const auto cos_terms = as_points(param_or(spec, "cos", {}), n, "cos");
      const auto sin_terms = as_points(param_or(spec, "sin", {}), n, "sin");
      if (cos_terms.size() != sin_terms.size() || cos_terms.empty()) {
        throw CurveSpecError("fourier: 'cos' and 'sin' must list the same nonzero number of vectors");
      }
      auto shape = std::make_shared<FourierShape>(center, cos_terms, sin_terms);
      require_regular(*shape, 0.0, 1.0);
      return Curve(shape, n, 0.0, 1.0, true);
    }
    case CurveKind::spline: {
      auto nodes = as_points(require_param(spec, "nodes"), n, "nodes");
      if (spec.closed && nodes.size() >= 2 && (nodes.front() - nodes.back()).norm() == 0.0) {
        nodes.pop_back();
      }
      if (nodes.size() < 4) throw CurveSpecError("spline: at least 4 distinct nodes required");
      auto shape = std::make_shared<SplineShape>(nodes, spec.closed);
      const double len = shape->length_param();
      require_regular(*shape, 0.0, len);
      return Curve(shape, n, 0.0, len, spec.closed);
    }
  }
  throw CurveSpecError("unhandled curve kind");
}

/// Length of the curve, adaptive Gauss–Kronrod on |eval′(s)|.
/// Throws QuadratureError (carrying the best estimate) when the absolute
/// error bound exceeds `tol`.
inline double arclength(const Curve& curve, double tol = 1e-10) {
  if (!(tol > 0.0)) throw PreconditionError("arclength: tol must be positive");
  auto speed = [&](double s) { return curve.speed(s); };
  double rough = 0.0;
  constexpr int kRough = 64;
  for (int i = 0; i < kRough; ++i) rough += speed(curve.s0() + (i + 0.5) * curve.period() / kRough);
  rough *= curve.period() / kRough;
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      speed, curve.s0(), curve.s1(), 20, std::max(0.25 * tol / rough, 1e-15), &err);
  if (!(err <= tol)) {
    throw QuadratureError("arclength: quadrature did not reach the requested tolerance", value, err);
  }
  return value;
}

/// R with max_s |eval(s) − center| ≤ R: dense sampling plus a Lipschitz margin.
inline double bounding_radius(const Curve& curve, const VecN& center) {
  constexpr int kSamples = 4096;
  const double ds = curve.period() / kSamples;
  double rmax = 0.0;
  double vmax = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double s = curve.s0() + i * ds;
    rmax = std::max(rmax, (curve.eval(s) - center).norm());
    vmax = std::max(vmax, curve.speed(s));
  }
  return rmax + 0.5 * vmax * ds;
}

inline double bounding_radius(const Curve& curve) {
  return bounding_radius(curve, VecN::Zero(curve.dim()));
}

/// Cumulative arclength table; maps a uniform arclength draw back to a parameter.
class ArclengthMap {
 public:
  explicit ArclengthMap(const Curve& curve, int cells = 4096) : curve_(curve) {
    ds_ = curve.period() / cells;
    cumulative_.assign(static_cast<std::size_t>(cells) + 1, 0.0);
    for (int i = 0; i < cells; ++i) {
      const double a = curve.s0() + i * ds_;
      cumulative_[static_cast<std::size_t>(i) + 1] = cumulative_[static_cast<std::size_t>(i)] + piece(a, a + ds_);
    }
  }

  double length() const noexcept { return cumulative_.back(); }

  /// Parameter s at which the arclength from s0 equals `arc` ∈ [0, length()].
  double param_at(double arc) const {
    arc = std::clamp(arc, 0.0, length());
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), arc);
    std::size_t i = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    i = std::min(i, cumulative_.size() - 2);
    const double a = curve_.s0() + static_cast<double>(i) * ds_;
    const double target = arc - cumulative_[i];
    const double width = cumulative_[i + 1] - cumulative_[i];
    double s = a + ds_ * (width > 0.0 ? target / width : 0.0);
    for (int iter = 0; iter < 3; ++iter) {
      const double f = piece(a, s) - target;
      s = std::clamp(s - f / curve_.speed(s), a, a + ds_);
    }
    return s;
  }

 private:
  double piece(double a, double b) const {
    return boost::math::quadrature::gauss<double, 7>::integrate([&](double s) { return curve_.speed(s); }, a, b);
  }

  Curve curve_;
  double ds_;
  std::vector<double> cumulative_;
};

}  // namespace fraclen
