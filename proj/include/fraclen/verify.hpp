#pragma once

// Numerical checks of the change-of-variables factors, of the boundary normal
// of the odd-disc set, and of the |b·c| integral over U⊥².
//
//   Φ(z, a, b, ξ)    = (z + ξa, b)
//   Ξ(z, a, b, ξ, r) = (z + ξa, b, r)
//   Ψ(z, a, b, r)    = (z + ra, b, r)
//
// fd_gram_jacobian pushes an orthonormal frame of the domain through the map
// with central differences and returns √det(JᵀJ). Steps on the pair (a, b)
// are rotations, so the perturbed pair stays exactly orthonormal.
//
// Two volume conventions exist on U⊥². The product convention (a on the
// sphere, b on the unit sphere of {a}⊥) steps the coupled direction as a
// rotation by h in the (a, b) plane. The Hausdorff convention is the metric
// induced from R^n × R^n, whose unit coupled direction is (b, −a)/√2, so the
// same rotation uses the angle h/√2. Every Jacobian in the Hausdorff
// convention is the product one divided by √2.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fraclen/curve.hpp"
#include "fraclen/errors.hpp"
#include "fraclen/fraclen.hpp"
#include "fraclen/geometry.hpp"
#include "fraclen/parallel.hpp"
#include "fraclen/random.hpp"

namespace fraclen {

enum class MapId { Phi, Xi, Psi };

inline std::string_view to_string(MapId m) {
  switch (m) {
    case MapId::Phi: return "Phi";
    case MapId::Xi: return "Xi";
    case MapId::Psi: return "Psi";
  }
  return "?";
}

inline MapId map_id_from_string(std::string_view name) {
  if (name == "Phi") return MapId::Phi;
  if (name == "Xi") return MapId::Xi;
  if (name == "Psi") return MapId::Psi;
  throw ConfigError("unknown map '" + std::string(name) + "' (expected Phi, Xi or Psi)");
}

enum class MeasureConvention { product, hausdorff };

/// A point (s, a, b, ξ, r) of C × U⊥² × R⁺ × R⁺. Φ ignores r and Ψ ignores ξ.
struct ManifoldPoint {
  double s = 0.0;
  VecN a;
  VecN b;
  double xi = 1.0;
  double r = 1.0;
};

struct JacobianReport {
  MapId map = MapId::Phi;
  ManifoldPoint point;
  double fd_gram_sqrt = 0.0;
  double closed_form = 0.0;
  double rel_error = 0.0;
};

/// Floor of the denominator of JacobianReport::rel_error.
inline constexpr double kJacobianFloor = 1e-300;

namespace detail {

struct PointFrame {
  VecN z;
  VecN t;
  double speed;
  double at;
  double bt;
};

inline PointFrame frame_at(const Curve& curve, const ManifoldPoint& q) {
  const int n = curve.dim();
  if (q.a.size() != n || q.b.size() != n) throw DimensionError("manifold point does not match curve dimension");
  if (std::abs(q.a.norm() - 1.0) > 1e-12 || std::abs(q.b.norm() - 1.0) > 1e-12 || std::abs(q.a.dot(q.b)) > 1e-12) {
    throw PreconditionError("manifold point: (a, b) must be an orthonormal pair");
  }
  const VecN dz = curve.derivative(q.s);
  const double speed = dz.norm();
  const VecN t = dz / speed;
  return {curve.eval(q.s), t, speed, q.a.dot(t), q.b.dot(t)};
}

inline void require_nondegenerate(MapId map, const ManifoldPoint& q, const PointFrame& f) {
  if (map == MapId::Psi) {
    if (!(f.at * f.at + f.bt * f.bt > 1e-12)) throw PreconditionError("Psi: (a·t)² + (b·t)² is too small");
    if (!(q.r > 0.0)) throw PreconditionError("Psi: r must be positive");
    return;
  }
  if (!(std::abs(f.bt) > 1e-6)) throw PreconditionError("Phi/Xi: |b·t| is too small");
  if (!(q.xi > 0.0)) throw PreconditionError("Phi/Xi: xi must be positive");
  if (map == MapId::Xi && !(q.r > 0.0)) throw PreconditionError("Xi: r must be positive");
}

inline Eigen::VectorXd apply_map(MapId map, const Curve& curve, double s, const VecN& a, const VecN& b, double xi,
                                 double r) {
  const int n = curve.dim();
  const VecN z = curve.eval(s);
  const bool has_r = map != MapId::Phi;
  Eigen::VectorXd out(2 * n + (has_r ? 1 : 0));
  out.head(n) = z + (map == MapId::Psi ? r : xi) * a;
  out.segment(n, n) = b;
  if (has_r) out[2 * n] = r;
  return out;
}

}  // namespace detail

/// √det(JᵀJ) of the map at `q` by central differences with step h.
inline double fd_gram_jacobian(MapId map, const Curve& curve, const ManifoldPoint& q, double h,
                               MeasureConvention conv = MeasureConvention::product) {
  if (!(h >= 1e-7 && h <= 1e-3)) throw PreconditionError("fd_gram_jacobian: h must lie in [1e-7, 1e-3]");
  const detail::PointFrame f = detail::frame_at(curve, q);
  detail::require_nondegenerate(map, q, f);
  const int n = curve.dim();
  const VecN& a = q.a;
  const VecN& b = q.b;
  auto F = [&](double s, const VecN& aa, const VecN& bb, double xi, double r) {
    return detail::apply_map(map, curve, s, aa, bb, xi, r);
  };
  std::vector<Eigen::VectorXd> cols;
  auto central = [&](const Eigen::VectorXd& plus, const Eigen::VectorXd& minus) {
    cols.push_back((plus - minus) / (2.0 * h));
  };

  const double ds = h / f.speed;
  central(F(q.s + ds, a, b, q.xi, q.r), F(q.s - ds, a, b, q.xi, q.r));
  for (const VecN& e : complement_basis(n, a, b)) {
    const double c = std::cos(h);
    const double sn = std::sin(h);
    central(F(q.s, c * a + sn * e, b, q.xi, q.r), F(q.s, c * a - sn * e, b, q.xi, q.r));
    central(F(q.s, a, c * b + sn * e, q.xi, q.r), F(q.s, a, c * b - sn * e, q.xi, q.r));
  }
  const double th = conv == MeasureConvention::product ? h : h / std::numbers::sqrt2;
  {
    const double c = std::cos(th);
    const double sn = std::sin(th);
    central(F(q.s, c * a + sn * b, c * b - sn * a, q.xi, q.r), F(q.s, c * a - sn * b, c * b + sn * a, q.xi, q.r));
  }
  if (map != MapId::Psi) central(F(q.s, a, b, q.xi + h, q.r), F(q.s, a, b, q.xi - h, q.r));
  if (map != MapId::Phi) central(F(q.s, a, b, q.xi, q.r + h), F(q.s, a, b, q.xi, q.r - h));

  Eigen::MatrixXd jac(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) jac.col(static_cast<Eigen::Index>(j)) = cols[j];
  const Eigen::MatrixXd gram = jac.transpose() * jac;
  const double det = gram.determinant();
  return std::sqrt(std::max(0.0, det));
}

/// The closed-form factors as published: ξ^{n−2}|b·t| for Φ and Ξ, and
/// (2r)^{n−2}√((a·t)² + (b·t)²) for Ψ.
inline double closed_form_jacobian(MapId map, const Curve& curve, const ManifoldPoint& q) {
  const detail::PointFrame f = detail::frame_at(curve, q);
  const int n = curve.dim();
  if (map == MapId::Psi) {
    detail::require_nondegenerate(map, q, f);
    return std::pow(2.0 * q.r, n - 2) * std::hypot(f.at, f.bt);
  }
  if (!(q.xi > 0.0)) throw PreconditionError("Phi/Xi: xi must be positive");
  return std::pow(q.xi, n - 2) * std::abs(f.bt);
}

/// Jacobian factors obtained by carrying out the Gram determinant by hand.
/// They agree with closed_form_jacobian for Φ and Ξ in the product convention
/// and differ for Ψ: r^{n−2}√((1 + r²)(a·t)² + 2(b·t)²).
inline double derived_jacobian(MapId map, const Curve& curve, const ManifoldPoint& q,
                               MeasureConvention conv = MeasureConvention::product) {
  const detail::PointFrame f = detail::frame_at(curve, q);
  const int n = curve.dim();
  double v = 0.0;
  if (map == MapId::Psi) {
    v = std::pow(q.r, n - 2) * std::sqrt((1.0 + q.r * q.r) * f.at * f.at + 2.0 * f.bt * f.bt);
  } else {
    v = std::pow(q.xi, n - 2) * std::abs(f.bt);
  }
  return conv == MeasureConvention::product ? v : v / std::numbers::sqrt2;
}

/// Random point satisfying the non-degeneracy preconditions of `map`, with
/// ξ and r in [0.2, 2].
inline ManifoldPoint random_manifold_point(MapId map, const Curve& curve, SampleStream& rng) {
  const int n = curve.dim();
  for (;;) {
    ManifoldPoint q;
    q.s = curve.s0() + rng.uniform() * curve.period();
    const PerpPair ab = sample_perp_pair(n, rng);
    q.a = ab.a().vec();
    q.b = ab.b().vec();
    q.xi = 0.2 + 1.8 * rng.uniform();
    q.r = 0.2 + 1.8 * rng.uniform();
    const detail::PointFrame f = detail::frame_at(curve, q);
    const bool ok = map == MapId::Psi ? f.at * f.at + f.bt * f.bt > 1e-6 : std::abs(f.bt) > 1e-3;
    if (ok) return q;
  }
}

inline JacobianReport jacobian_report(MapId map, const Curve& curve, const ManifoldPoint& q, double h,
                                      MeasureConvention conv = MeasureConvention::product) {
  JacobianReport rep;
  rep.map = map;
  rep.point = q;
  rep.fd_gram_sqrt = fd_gram_jacobian(map, curve, q, h, conv);
  rep.closed_form = closed_form_jacobian(map, curve, q);
  rep.rel_error = std::abs(rep.fd_gram_sqrt - rep.closed_form) / std::max(rep.closed_form, kJacobianFloor);
  return rep;
}

/// FNV-1a over the bit patterns of the point's coordinates.
inline std::uint64_t point_digest(const ManifoldPoint& q) {
  std::uint64_t hsh = 0xcbf29ce484222325ULL;
  auto feed = [&](double x) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      hsh ^= (bits >> (8 * i)) & 0xffU;
      hsh *= 0x100000001b3ULL;
    }
  };
  feed(q.s);
  for (Eigen::Index i = 0; i < q.a.size(); ++i) feed(q.a[i]);
  for (Eigen::Index i = 0; i < q.b.size(); ++i) feed(q.b[i]);
  feed(q.xi);
  feed(q.r);
  return hsh;
}

// ---------------------------------------------------------------------------
// Boundary normal of the odd-disc set.

/// (2n+1)-vector m(p, u, r) for a disc whose boundary passes through the curve
/// point z with unit tangent t. The caller flips the sign for even discs.
inline Eigen::VectorXd normal_vector_m(const VecN& p, const VecN& u, double r, const VecN& z, const VecN& t,
                                       double tol = 1e-9) {
  const int n = static_cast<int>(p.size());
  if (u.size() != n || z.size() != n || t.size() != n) throw DimensionError("normal_vector_m: dimension mismatch");
  if (!(r > 0.0)) throw PreconditionError("normal_vector_m: r must be positive");
  const VecN w = p - z;
  if (std::abs(w.dot(u)) > tol * std::max(1.0, r)) throw PreconditionError("normal_vector_m: z is off the disc plane");
  if (std::abs(w.norm() - r) > tol * std::max(1.0, r)) throw PreconditionError("normal_vector_m: z is off the boundary");
  const double ut = u.dot(t);
  if (!(std::abs(ut) >= 1e-9)) throw PreconditionError("normal_vector_m: disc is tangential to the curve");
  const double k = w.dot(t) / ut;
  Eigen::VectorXd m(2 * n + 1);
  m.head(n) = -w + k * u;
  m.segment(n, n) = k * w;
  m[2 * n] = r;
  const double w2 = w.squaredNorm();
  return m / std::sqrt(w2 + k * k * w2 + k * k + r * r);
}

/// The 2n − 1 spanning vectors (t,0,0), (c,0,0), (0,d,0), (a,0,1), (rb,−a,0)
/// of the tangent space of the boundary-disc set at Ψ(z, a, b, r); c and d run
/// over an orthonormal basis of {a, b}⊥.
inline std::vector<Eigen::VectorXd> tangent_space_basis(const VecN& a, const VecN& b, double r, const VecN& t) {
  const int n = static_cast<int>(a.size());
  auto pack = [n](const VecN& x, const VecN& y, double last) {
    Eigen::VectorXd v(2 * n + 1);
    v.head(n) = x;
    v.segment(n, n) = y;
    v[2 * n] = last;
    return v;
  };
  const VecN zero = VecN::Zero(n);
  std::vector<Eigen::VectorXd> out;
  out.push_back(pack(t, zero, 0.0));
  const std::vector<VecN> perp = complement_basis(n, a, b);
  for (const VecN& c : perp) out.push_back(pack(c, zero, 0.0));
  for (const VecN& d : perp) out.push_back(pack(zero, d, 0.0));
  out.push_back(pack(a, zero, 1.0));
  out.push_back(pack(r * b, -a, 0.0));
  return out;
}

// ---------------------------------------------------------------------------
// ∫_{U⊥²} |b·c|.

/// 4 α_{n−1} α_{n−2}, the published value.
inline double lemma_int_target(int n) {
  require_dimension(n, 3, "lemma_int_target");
  return 4.0 * ball_volume(n - 1) * ball_volume(n - 2);
}

/// 2(n − 1) α_{n−1}² = |U⊥²| · E|b₁|, the value under the product measure.
inline double lemma_int_exact(int n) {
  require_dimension(n, 3, "lemma_int_exact");
  const double a = ball_volume(n - 1);
  return 2.0 * (n - 1) * a * a;
}

struct LemmaIntResult {
  EstimatorResult estimate;
  double target = 0.0;
  double z_score = 0.0;  // (estimate − target) / std_error
  double exact_target = 0.0;
  double exact_z_score = 0.0;
};

inline LemmaIntResult verify_lemma_int(int n, const VecN& c, std::uint64_t n_samples, std::uint64_t seed,
                                       int workers = 1) {
  require_dimension(n, 3, "verify_lemma_int");
  if (c.size() != n) throw DimensionError("verify_lemma_int: c has the wrong dimension");
  if (n_samples < 2) throw PreconditionError("verify_lemma_int: need at least two samples");
  const UnitVec cu(c);
  const double mass = measure_uperp2(n);
  auto block = [&](std::uint64_t begin, std::uint64_t end) {
    Moments m;
    for (std::uint64_t i = begin; i < end; ++i) {
      SampleStream rng(seed, i);
      const PerpPair ab = sample_perp_pair(n, rng);
      m.add(mass * std::abs(ab.b().dot(cu.vec())));
    }
    return m;
  };
  const Moments total = reduce_blocks(n_samples, workers, block, Moments{});
  LemmaIntResult out;
  out.estimate.estimate = total.mean;
  out.estimate.std_error = total.std_error();
  out.estimate.n_samples = n_samples;
  out.estimate.seed = seed;
  out.estimate.proposal = {"(a,b): uniform product measure on U_perp^2", {{"n", n}, {"mass", mass}}};
  out.target = lemma_int_target(n);
  out.exact_target = lemma_int_exact(n);
  const double se = out.estimate.std_error;
  out.z_score = se > 0.0 ? (total.mean - out.target) / se : 0.0;
  out.exact_z_score = se > 0.0 ? (total.mean - out.exact_target) / se : 0.0;
  return out;
}

}  // namespace fraclen
