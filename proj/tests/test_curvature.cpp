#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "fraclen/curvature.hpp"
#include "oracles/el_reference.hpp"

using namespace fraclen;
using std::numbers::pi;

namespace {

Curve segment() { return make_curve({CurveKind::segment, 3, {{"start", {-1, 0, 0}}, {"end", {1, 0, 0}}}, false}); }
Curve circle() { return make_curve({CurveKind::circle_arc, 3, {{"radius", {1.0}}}, false}); }
Curve helix() {
  return make_curve({CurveKind::helix, 3, {{"radius", {1.0}}, {"pitch", {0.25}}, {"range", {0.0, 2 * pi}}}, false});
}

std::vector<double> to_std(const VecN& v) { return {v.data(), v.data() + v.size()}; }

CurvatureResult run(const Curve& c, double s, std::uint64_t n, std::uint64_t seed, const CurvatureOptions& opt = {}) {
  const auto d = default_radii(c, s);
  return kappa_sigma(c, s, SigmaParam(0.5), d.r_min, d.r_max, n, seed, opt);
}

// |x_i − y_i| ≤ k·√(se_x² + se_y²) for every component.
void expect_close(const VecN& x, const VecN& y, const VecN& se_x, const VecN& se_y, double k) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(x[i] - y[i]), k * std::hypot(se_x[i], se_y[i]) + 1e-12) << "component " << i;
  }
}

}  // namespace

TEST(ElIntegrand, ZeroTangentialComponentOfA) {
  const VecN a = make_vec({0, 0, 1});
  const VecN b = make_vec({0.6, 0.8, 0});
  const VecN t = make_vec({1, 0, 0});
  const VecN v = el_integrand(a, b, t, 2.0, SigmaParam(0.5));
  const VecN expected = -a * 0.6 / (std::pow(2.0, 1.5) * std::sqrt(2.0));
  EXPECT_LT((v - expected).norm(), 1e-15);
}

TEST(ElIntegrand, OrthogonalToTangent) {
  SampleStream rng(3);
  for (int n : {3, 5}) {
    for (int i = 0; i < 1000; ++i) {
      const PerpPair ab = sample_perp_pair(n, rng);
      const UnitVec t = sample_unit_sphere(n, rng);
      if (std::abs(ab.b().dot(t.vec())) < 1e-3) continue;
      const VecN v = el_integrand(ab.a().vec(), ab.b().vec(), t.vec(), 0.1 + rng.uniform(), SigmaParam(0.3));
      EXPECT_LE(std::abs(v.dot(t.vec())), 1e-10 * v.norm());
    }
  }
}

TEST(ElIntegrand, MatchesIndependentTranscription) {
  const double h = 1.0 / std::sqrt(2.0);
  const VecN a = make_vec({1, 0, 0});
  const VecN b = make_vec({0, 1, 0});
  const VecN t = make_vec({0.3, h, std::sqrt(1.0 - 0.09 - 0.5)});
  for (bool doubled : {false, true}) {
    const VecN v = el_integrand(a, b, t, 0.7, SigmaParam(0.4), doubled ? Normalization::el : Normalization::kappa);
    const auto ref = oracle::el_reference(to_std(a), to_std(b), to_std(t), 0.7, 0.4, doubled);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(v[i], ref[static_cast<std::size_t>(i)], 1e-14 * v.norm());
  }
  SampleStream rng(4);
  for (int i = 0; i < 2000; ++i) {
    const PerpPair ab = sample_perp_pair(4, rng);
    const UnitVec tt = sample_unit_sphere(4, rng);
    const double r = std::exp(3 * rng.normal());
    if (std::abs(ab.b().dot(tt.vec())) < 1e-6) continue;
    const VecN v = el_integrand(ab.a().vec(), ab.b().vec(), tt.vec(), r, SigmaParam(0.7));
    const auto ref = oracle::el_reference(to_std(ab.a().vec()), to_std(ab.b().vec()), to_std(tt.vec()), r, 0.7, false);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(v[k], ref[static_cast<std::size_t>(k)], 1e-13 * v.norm());
  }
}

TEST(ElIntegrand, RejectsDegenerateInput) {
  const VecN a = make_vec({0, 1, 0});
  const VecN b = make_vec({0, 0, 1});
  const VecN t = make_vec({1, 0, 0});
  EXPECT_THROW(el_integrand(a, b, t, 1.0, SigmaParam(0.5)), DegenerateSampleError);
  EXPECT_THROW(el_integrand(b, a, t, 0.0, SigmaParam(0.5)), PreconditionError);
}

TEST(InversePowerRadius, StaysInRangeAndNormalizes) {
  const InversePowerRadius rad(0.5, 0.01, 4.0);
  EXPECT_NEAR(rad.sample(0.0), 0.01, 1e-15);
  EXPECT_NEAR(rad.sample(1.0), 4.0, 1e-12);
  EXPECT_NEAR(rad.normalizer(), (std::pow(0.01, -0.5) - std::pow(4.0, -0.5)) / 0.5, 1e-12);
  // Median of r^{−1−σ} on [r_min, r_max].
  const double med = rad.sample(0.5);
  EXPECT_NEAR((std::pow(0.01, -0.5) - std::pow(med, -0.5)) / 0.5, 0.5 * rad.normalizer(), 1e-10);
  EXPECT_THROW(InversePowerRadius(0.5, 0.0, 1.0), ConfigError);
  EXPECT_THROW(InversePowerRadius(0.5, 1.0, 1.0), ConfigError);
}

TEST(KappaSigma, Preconditions) {
  const Curve c = circle();
  EXPECT_THROW(kappa_sigma(c, 0.0, SigmaParam(0.5), 0.0, 1.0, 100, 1), ConfigError);
  EXPECT_THROW(kappa_sigma(c, 0.0, SigmaParam(0.5), 0.5, 0.4, 100, 1), ConfigError);
  CurvatureOptions bad;
  bad.sweep_factors = {0.5};
  EXPECT_THROW(kappa_sigma(c, 0.0, SigmaParam(0.5), 0.1, 1.0, 100, 1, bad), ConfigError);
}

TEST(KappaSigma, SegmentMidpointIsZero) {
  const CurvatureResult r = run(segment(), 0.5, 200000, 5);
  for (const auto& row : r.sweep) {
    for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(row.kappa_vector[i]), 3 * row.std_error_vector[i] + 1e-12);
  }
  EXPECT_LT(r.r_min, r.r_max);
  EXPECT_EQ(r.sweep.size(), 4u);
  EXPECT_DOUBLE_EQ(r.sweep[3].r_min, 8 * r.r_min);
}

// On a line the pair (a, b) ↦ (−a, −b) maps each disc to its mirror image
// through z, which has the same parity, while the integrand changes sign.
TEST(KappaSigma, AntitheticPairsCancelExactlyOnALine) {
  CurvatureOptions opt;
  opt.antithetic = true;
  const CurvatureResult r = run(segment(), 0.5, 20000, 6, opt);
  EXPECT_LT(r.kappa_vector.norm(), 1e-12);
}

// The parity of D(z + r a, b, r) counts crossings in the open disc, so z
// itself never counts. With that convention the vector at a point of a
// circle points away from the center.
TEST(KappaSigma, CircleVectorIsRadialAndOutward) {
  const CurvatureResult r = run(circle(), 0.0, 300000, 7);
  EXPECT_GT(r.kappa_vector[0], 5 * r.std_error_vector[0]);
  EXPECT_LE(std::abs(r.kappa_vector[1]), 1e-10);
  EXPECT_LE(std::abs(r.kappa_vector[2]), 3 * r.std_error_vector[2]);
  EXPECT_NEAR(r.kappa_scalar, r.kappa_vector.norm(), 1e-12);
}

TEST(KappaSigma, AntipodalPointsRelatedByRotation) {
  const CurvatureResult a = run(circle(), 0.0, 200000, 8);
  const CurvatureResult b = run(circle(), 0.5, 200000, 9);
  const Matrix rot = Eigen::AngleAxisd(pi, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  expect_close(b.kappa_vector, rot * a.kappa_vector, b.std_error_vector, a.std_error_vector, 3.0);
}

TEST(KappaSigma, EquivariantUnderRigidMotion) {
  const Curve c = helix();
  const Matrix q = Eigen::AngleAxisd(0.8, Eigen::Vector3d(1, -1, 2).normalized()).toRotationMatrix();
  const VecN shift = make_vec({1.0, 2.0, -3.0});
  const CurvatureResult a = run(c, 2.0, 200000, 10);
  const CurvatureResult b = run(c.transformed(q, shift), 2.0, 200000, 11);
  EXPECT_LT((b.z - (q * a.z + shift)).norm(), 1e-12);
  const VecN rotated_se = (q.cwiseAbs2() * a.std_error_vector.cwiseAbs2()).cwiseSqrt();
  expect_close(b.kappa_vector, q * a.kappa_vector, b.std_error_vector, rotated_se, 3.0);
}

TEST(KappaSigma, OrthogonalToTangent) {
  for (double s : {0.7, 2.0, 4.5}) {
    const CurvatureResult r = run(helix(), s, 100000, 12);
    const double proj = r.kappa_vector.dot(r.tangent);
    const double se = std::sqrt(r.tangent.cwiseAbs2().dot(r.std_error_vector.cwiseAbs2()));
    EXPECT_LE(std::abs(proj), 3 * se) << "s = " << s;
  }
}

TEST(KappaSigma, DeterministicAndWorkerIndependent) {
  CurvatureOptions two;
  two.workers = 2;
  const CurvatureResult a = run(helix(), 1.0, 10000, 13);
  const CurvatureResult b = run(helix(), 1.0, 10000, 13, two);
  EXPECT_EQ(a.kappa_vector, b.kappa_vector);
  EXPECT_EQ(a.std_error_vector, b.std_error_vector);
}

TEST(ElResidual, ExactMultipleOfKappa) {
  const Curve c = helix();
  const auto d = default_radii(c, 1.0);
  const CurvatureResult k = kappa_sigma(c, 1.0, SigmaParam(0.5), d.r_min, d.r_max, 20000, 14);
  const CurvatureResult e = el_residual(c, 1.0, SigmaParam(0.5), d.r_min, d.r_max, 20000, 14);
  EXPECT_EQ(e.normalization, Normalization::el);
  const double f = std::pow(2.0, -1.5);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.kappa_vector[i], f * k.kappa_vector[i], 1e-14 * k.kappa_vector.norm());
}

TEST(ElResidual, SegmentZeroCircleNonzero) {
  const auto ds = default_radii(segment(), 0.5);
  const CurvatureResult seg = el_residual(segment(), 0.5, SigmaParam(0.5), ds.r_min, ds.r_max, 200000, 15);
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(seg.kappa_vector[i]), 3 * seg.std_error_vector[i] + 1e-12);
  const auto dc = default_radii(circle(), 0.25);
  const CurvatureResult circ = el_residual(circle(), 0.25, SigmaParam(0.5), dc.r_min, dc.r_max, 300000, 16);
  EXPECT_GT(circ.kappa_scalar, 5 * circ.std_error_vector.norm());
}

// One signed integral over shared samples against odd and even parts
// estimated separately from the same total budget. Every sample lands in one
// class, so all three estimators share the second moment E[f²]; the split
// halves each part's sample count and the two variances add.
TEST(KappaSigma, SignedEstimatorVarianceNoLargerThanSeparate) {
  for (double s : {0.0, 0.3}) {
    CurvatureOptions odd;
    odd.filter = ParityFilter::odd_only;
    CurvatureOptions even;
    even.filter = ParityFilter::even_only;
    const CurvatureResult both = run(circle(), s, 100000, 17);
    const CurvatureResult o = run(circle(), s, 50000, 18, odd);
    const CurvatureResult e = run(circle(), s, 50000, 19, even);
    const double var_signed = both.std_error_vector.squaredNorm();
    const double var_separate = o.std_error_vector.squaredNorm() + e.std_error_vector.squaredNorm();
    EXPECT_LE(var_signed, var_separate) << "s = " << s;
    expect_close(both.kappa_vector, o.kappa_vector + e.kappa_vector, both.std_error_vector,
                 (o.std_error_vector.cwiseAbs2() + e.std_error_vector.cwiseAbs2()).cwiseSqrt(), 4.0);
  }
}

TEST(KappaSigma, SignedEqualsOddPlusEvenOnSharedSamples) {
  CurvatureOptions odd;
  odd.filter = ParityFilter::odd_only;
  CurvatureOptions even;
  even.filter = ParityFilter::even_only;
  const CurvatureResult both = run(circle(), 0.1, 20000, 20);
  const CurvatureResult o = run(circle(), 0.1, 20000, 20, odd);
  const CurvatureResult e = run(circle(), 0.1, 20000, 20, even);
  EXPECT_LT((both.kappa_vector - o.kappa_vector - e.kappa_vector).norm(), 1e-9 * o.kappa_vector.norm());
  // V(−a, −b) = −V(a, b) makes the unsigned integral over all pairs vanish,
  // so the odd-minus-even difference is twice the odd part.
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(both.kappa_vector[i] - 2 * o.kappa_vector[i]), 4 * both.std_error_vector[i]);
  }
}
