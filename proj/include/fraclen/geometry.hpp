#pragma once

// Ambient vector arithmetic in R^n, sphere and perpendicular-pair sampling,
// and the measure constants used by the estimators.

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fraclen/errors.hpp"
#include "fraclen/random.hpp"

namespace fraclen {

/// Largest ambient dimension supported without heap allocation.
inline constexpr int kMaxDim = 16;

/// Point or direction in R^n. Fixed capacity, runtime size.
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline void require_dimension(int n, int min_dim, const char* what) {
  if (n < min_dim || n > kMaxDim) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(n) +
                         " outside [" + std::to_string(min_dim) + ", " +
                         std::to_string(kMaxDim) + "]");
  }
}

inline bool all_finite(const VecN& v) { return v.allFinite(); }

inline VecN make_vec(std::initializer_list<double> xs) {
  VecN v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

/// Unit vector; renormalized on construction.
class UnitVec {
 public:
  explicit UnitVec(const VecN& v) : v_(v) {
    const double norm = v_.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
      throw PreconditionError("UnitVec: cannot normalize a zero or non-finite vector");
    }
    v_ /= norm;
  }

  const VecN& vec() const noexcept { return v_; }
  operator const VecN&() const noexcept { return v_; }  // NOLINT(google-explicit-constructor)
  double operator[](Eigen::Index i) const { return v_[i]; }
  int dim() const noexcept { return static_cast<int>(v_.size()); }
  double dot(const VecN& w) const { return v_.dot(w); }
  UnitVec operator-() const { return UnitVec(-v_); }

 private:
  VecN v_;
};

/// Ordered pair of orthonormal vectors, an element of U⊥².
/// `b` is re-orthogonalized against `a` (one Gram–Schmidt pass) on construction.
class PerpPair {
 public:
  PerpPair(const VecN& a, const VecN& b) : a_(a), b_(orthogonalized(a_, b)) {}

  const UnitVec& a() const noexcept { return a_; }
  const UnitVec& b() const noexcept { return b_; }
  int dim() const noexcept { return a_.dim(); }

 private:
  static UnitVec orthogonalized(const UnitVec& a, const VecN& b) {
    VecN w = b - a.dot(b) * a.vec();
    w -= a.dot(w) * a.vec();
    return UnitVec(w);
  }

  UnitVec a_;
  UnitVec b_;
};

/// Uniform direction on the unit sphere of R^n (normalized Gaussian vector).
inline UnitVec sample_unit_sphere(int n, SampleStream& rng) {
  require_dimension(n, 1, "sample_unit_sphere");
  VecN g(n);
  for (;;) {
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    if (g.squaredNorm() > 1e-200) return UnitVec(g);
  }
}

/// (a, b) with a uniform on the sphere and b uniform on the unit sphere of {a}⊥.
/// This is the iterated product measure on U⊥², whose total mass is
/// measure_uperp2(n).
inline PerpPair sample_perp_pair(int n, SampleStream& rng) {
  require_dimension(n, 3, "sample_perp_pair");
  const UnitVec a = sample_unit_sphere(n, rng);
  VecN g(n);
  for (;;) {
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    g -= a.dot(g) * a.vec();
    if (g.squaredNorm() > 1e-200) return PerpPair(a.vec(), g);
  }
}

struct Decomposition {
  VecN parallel;
  VecN perpendicular;
};

/// Split v into its component along u and the remainder.
inline Decomposition perp_decompose(const VecN& v, const UnitVec& u) {
  VecN par = u.dot(v) * u.vec();
  VecN perp = v - par;
  return {std::move(par), std::move(perp)};
}

/// Volume of the unit ball in R^k, π^{k/2} / Γ(k/2 + 1).
inline double ball_volume(int k) {
  if (k < 0) throw DimensionError("ball_volume: negative dimension " + std::to_string(k));
  const double half = 0.5 * k;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

/// Surface area of the unit sphere in R^k, 2π^{k/2} / Γ(k/2).
inline double sphere_area(int k) {
  if (k < 1) throw DimensionError("sphere_area: dimension must be >= 1, got " + std::to_string(k));
  const double half = 0.5 * k;
  return 2.0 * std::exp(half * std::log(std::numbers::pi) - std::lgamma(half));
}

/// Total mass of U⊥² ⊂ R^n × R^n under the iterated product measure
/// (sphere of R^n times the fiber sphere of {a}⊥).
inline double measure_uperp2(int n) {
  require_dimension(n, 3, "measure_uperp2");
  return sphere_area(n) * sphere_area(n - 1);
}

/// Orthonormal basis of the orthogonal complement of span(vs) in R^n.
template <class... Vs>
std::vector<VecN> complement_basis(int n, const Vs&... vs) {
  const std::vector<VecN> fixed{VecN(vs)...};
  const int k = static_cast<int>(fixed.size());
  Eigen::MatrixXd m(n, k);
  for (int j = 0; j < k; ++j) m.col(j) = fixed[static_cast<std::size_t>(j)];
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(m).householderQ();
  std::vector<VecN> out;
  for (int j = k; j < n; ++j) out.emplace_back(q.col(j));
  return out;
}

}  // namespace fraclen
