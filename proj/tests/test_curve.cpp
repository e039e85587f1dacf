#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclen/curve.hpp"
#include "fraclen/random.hpp"

using namespace fraclen;
using std::numbers::pi;

namespace {

Curve segment(double x0, double x1) {
  return make_curve({CurveKind::segment, 3, {{"start", {x0, 0, 0}}, {"end", {x1, 0, 0}}}, false});
}

Curve unit_circle() { return make_curve({CurveKind::circle_arc, 3, {{"radius", {1.0}}}, false}); }

Curve helix() { return make_curve({CurveKind::helix, 3, {{"radius", {1.0}}, {"pitch", {0.25}}}, false}); }

Curve fourier() {
  return make_curve({CurveKind::fourier,
                     3,
                     {{"center", {0.1, 0.0, 0.0}}, {"cos", {1.0, 0.0, 0.0, 0.0, 0.2, 0.1}},
                      {"sin", {0.0, 1.0, 0.3, 0.1, 0.0, 0.0}}},
                     true});
}

Curve open_spline() {
  return make_curve(
      {CurveKind::spline, 3, {{"nodes", {0, 0, 0, 1, 0.5, 0, 2, 0, 0.5, 3, -0.5, 0, 4, 0, 0}}}, false});
}

Curve closed_spline() {
  return make_curve({CurveKind::spline, 4, {{"nodes", {1, 0, 0, 0, 0, 1, 0, 0.2, -1, 0, 0.3, 0, 0, -1, 0, -0.2}}}, true});
}

std::vector<Curve> all_curves() { return {segment(-1, 1), unit_circle(), helix(), fourier(), open_spline(), closed_spline()}; }

Matrix random_rotation(int n, SampleStream& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  return q;
}

}  // namespace

TEST(MakeCurve, SegmentExample) {
  const Curve c = segment(-1, 1);
  EXPECT_TRUE(c.eval(0.5).isZero(1e-15));
  for (double s : {0.0, 0.3, 1.0}) EXPECT_TRUE(c.tangent(s).vec().isApprox(make_vec({1, 0, 0})));
  EXPECT_FALSE(c.closed());
}

TEST(MakeCurve, CircleExample) {
  const Curve c = unit_circle();
  EXPECT_TRUE(c.closed());
  for (double s : {0.0, 0.1, 0.37, 0.9}) {
    EXPECT_TRUE(c.eval(s).isApprox(make_vec({std::cos(2 * pi * s), std::sin(2 * pi * s), 0.0}), 1e-14));
  }
  EXPECT_LT((c.eval(c.s0()) - c.eval(c.s1())).norm(), 1e-10);
  EXPECT_LT((c.tangent(c.s0()).vec() - c.tangent(c.s1()).vec()).norm(), 1e-10);
}

TEST(MakeCurve, HelixTangentAtStart) {
  const VecN expected = make_vec({0.0, 1.0, 0.25}).normalized();
  EXPECT_LT((helix().tangent(0.0).vec() - expected).norm(), 1e-14);
}

TEST(MakeCurve, RejectsInvalidSpecs) {
  EXPECT_THROW(segment(1, 1), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::circle_arc, 3, {{"radius", {-1.0}}}, false}), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::spline, 3, {{"nodes", {0, 0, 0, 1, 0, 0, 2, 1, 0}}}, false}), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::segment, 2, {{"start", {0, 0}}, {"end", {1, 0}}}, false}), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::segment, 3, {{"start", {0, 0}}, {"end", {1, 0, 0}}}, false}), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::segment, 3, {{"end", {1, 0, 0}}}, false}), CurveSpecError);
  EXPECT_THROW(make_curve({CurveKind::circle_arc, 3, {{"e1", {1, 0, 0}}, {"e2", {1, 0, 0}}}, false}), CurveSpecError);
  EXPECT_THROW(curve_kind_from_string("ellipse"), CurveSpecError);
}

TEST(MakeCurve, PartialArcIsOpen) {
  const Curve c = make_curve({CurveKind::circle_arc, 3, {{"angles", {0.0, pi / 2}}}, false});
  EXPECT_FALSE(c.closed());
  EXPECT_LT((c.eval(c.s1()) - make_vec({0, 1, 0})).norm(), 1e-14);
  EXPECT_NEAR(arclength(c), pi / 2, 1e-10);
}

TEST(Arclength, Examples) {
  EXPECT_NEAR(arclength(segment(-1, 1)), 2.0, 1e-10);
  EXPECT_NEAR(arclength(unit_circle()), 2 * pi, 1e-10);
  EXPECT_NEAR(arclength(helix()), 2 * pi * std::sqrt(1.0 + 1.0 / 16.0), 1e-10);
  EXPECT_NEAR(arclength(helix()), 6.4766, 1e-4);
  EXPECT_THROW(arclength(helix(), -1.0), PreconditionError);
}

TEST(Arclength, RigidMotionInvariant) {
  SampleStream rng(4);
  for (const Curve& c : all_curves()) {
    const int n = c.dim();
    const Matrix q = random_rotation(n, rng);
    VecN v(n);
    for (int i = 0; i < n; ++i) v[i] = 3.0 * rng.normal();
    EXPECT_NEAR(arclength(c.transformed(q, v)), arclength(c), 1e-9);
    EXPECT_NEAR(arclength(c.transformed(q, v, 2.5)), 2.5 * arclength(c), 1e-9);
  }
}

TEST(Arclength, MapInvertsCumulativeLength) {
  const Curve c = helix();
  const ArclengthMap m(c);
  EXPECT_NEAR(m.length(), arclength(c), 1e-10);
  const Curve f = fourier();
  const ArclengthMap mf(f);
  for (double frac : {0.1, 0.25, 0.5, 0.8}) {
    const double s = mf.param_at(frac * mf.length());
    double len = 0.0;
    constexpr int k = 2000;
    for (int i = 0; i < k; ++i) len += f.speed(f.s0() + (i + 0.5) * (s - f.s0()) / k) * (s - f.s0()) / k;
    EXPECT_NEAR(len, frac * mf.length(), 1e-5);
  }
}

TEST(BoundingRadius, Examples) {
  const double rc = bounding_radius(unit_circle());
  EXPECT_GE(rc, 1.0);
  EXPECT_LE(rc, 1.01);
  const double rs = bounding_radius(segment(-1, 1));
  EXPECT_GE(rs, 1.0);
  EXPECT_LE(rs, 1.01);
  Matrix id = Matrix::Identity(3, 3);
  const double rt = bounding_radius(unit_circle().transformed(id, make_vec({10, 0, 0})));
  EXPECT_NEAR(rt - rc, 10.0, 0.01);
}

TEST(Tangent, FiniteDifferenceAgreement) {
  SampleStream rng(8);
  const double h = 1e-5;
  for (const Curve& c : all_curves()) {
    for (int i = 0; i < 200; ++i) {
      const double s = c.s0() + h + rng.uniform() * (c.period() - 2 * h);
      const VecN fd = (c.eval(s + h) - c.eval(s - h)) / (2 * h);
      const double speed = c.speed(s);
      EXPECT_LE((fd - speed * c.tangent(s).vec()).norm(), 1e-6 * speed);
    }
  }
}

TEST(Spline, InterpolatesNodesAndIsC1) {
  const std::vector<double> flat = {0, 0, 0, 1, 0.5, 0, 2, 0, 0.5, 3, -0.5, 0, 4, 0, 0};
  const Curve c = open_spline();
  // Knots sit at cumulative chord lengths.
  double s = 0.0;
  for (std::size_t k = 0; k < 5; ++k) {
    const VecN node = make_vec({flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]});
    if (k > 0) {
      const VecN prev = make_vec({flat[3 * k - 3], flat[3 * k - 2], flat[3 * k - 1]});
      s += (node - prev).norm();
    }
    EXPECT_LT((c.eval(s) - node).norm(), 1e-12);
    if (k > 0 && k < 4) {
      const double e = 1e-9;
      EXPECT_LT((c.derivative(s - e) - c.derivative(s + e)).norm(), 1e-7);
    }
  }
}

TEST(Spline, ClosedIsPeriodic) {
  const Curve c = closed_spline();
  EXPECT_TRUE(c.closed());
  EXPECT_LT((c.eval(c.s0()) - c.eval(c.s1())).norm(), 1e-10);
  EXPECT_LT((c.tangent(c.s0()).vec() - c.tangent(c.s1()).vec()).norm(), 1e-10);
  EXPECT_LT((c.eval(c.s0() - 0.1) - c.eval(c.s1() - 0.1)).norm(), 1e-12);
}

TEST(Curve, ClosedWrapsOpenClamps) {
  const Curve c = unit_circle();
  EXPECT_LT((c.eval(1.25) - c.eval(0.25)).norm(), 1e-14);
  EXPECT_LT((c.eval(-0.75) - c.eval(0.25)).norm(), 1e-14);
  const Curve s = segment(-1, 1);
  EXPECT_LT((s.eval(2.0) - s.eval(1.0)).norm(), 1e-15);
}
