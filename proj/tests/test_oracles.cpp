#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fraclen/verify.hpp"
#include "oracles/el_reference.hpp"
#include "oracles/frozen.hpp"
#include "oracles/lemma_quadrature.hpp"
#include "oracles/segment_quadrature.hpp"

using std::numbers::pi;

TEST(SegmentQuadrature, ReproducesFrozenValues) {
  for (const auto& ref : oracle::frozen::kSegment) {
    const double v = oracle::segment_len<32>(ref.sigma, oracle::frozen::kSegmentHalfLength,
                                             oracle::frozen::kSegmentWindowRadius);
    EXPECT_NEAR(v, ref.len, 1e-6 * ref.len) << "sigma " << ref.sigma;
  }
}

TEST(SegmentQuadrature, ConvergedInNodeCount) {
  const double coarse = oracle::segment_len<20>(0.7, 0.5, 2.0);
  const double fine = oracle::segment_len<32>(0.7, 0.5, 2.0);
  EXPECT_NEAR(coarse, fine, 1e-4 * fine);
}

TEST(SegmentQuadrature, ScalesAsTwoMinusSigma) {
  for (double sigma : {0.5, 0.9}) {
    const double base = oracle::segment_len<24>(sigma, 0.5, 2.0);
    const double big = oracle::segment_len<24>(sigma, 1.0, 4.0);
    EXPECT_NEAR(big / base, std::pow(2.0, 2.0 - sigma), 1e-6);
  }
}

TEST(LemmaQuadrature, AbsProjectionIntegral) {
  EXPECT_NEAR(oracle::abs_projection_integral(3), oracle::frozen::kAbsProjectionIntegralN3, 1e-12);
  EXPECT_NEAR(oracle::frozen::kAbsProjectionIntegralN3, 4 * pi * pi, 1e-12);
  for (int n : {3, 4, 5, 6}) {
    EXPECT_NEAR(oracle::abs_projection_integral(n), fraclen::lemma_int_exact(n), 1e-10 * fraclen::lemma_int_exact(n));
    EXPECT_GT(std::abs(oracle::abs_projection_integral(n) - fraclen::lemma_int_target(n)), 1.0);
  }
}

TEST(LemmaQuadrature, SphereAreasAgreeWithLibrary) {
  for (int k = 1; k < 10; ++k) EXPECT_NEAR(oracle::sphere_surface(k), fraclen::sphere_area(k), 1e-12 * fraclen::sphere_area(k));
}

TEST(ElReference, HandEvaluatedValue) {
  const auto v = oracle::el_reference({0, 0, 1}, {0.6, 0.8, 0}, {1, 0, 0}, 2.0, 0.5, false);
  EXPECT_NEAR(v[0], 0.0, 1e-16);
  EXPECT_NEAR(v[1], 0.0, 1e-16);
  EXPECT_NEAR(v[2], -0.15, 1e-15);
  const auto d = oracle::el_reference({0, 0, 1}, {0.6, 0.8, 0}, {1, 0, 0}, 2.0, 0.5, true);
  EXPECT_NEAR(d[2], -0.15 / std::pow(2.0, 1.5), 1e-15);
}
