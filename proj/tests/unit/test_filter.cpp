#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ddopt/filter.hpp"
#include "oracles.hpp"

using namespace ddopt;

TEST(FilterValue, VanishesAtZeroFrequency) {
  std::mt19937_64 rng(21);
  for (int n = 0; n <= 12; ++n) {
    const auto v = filter_value(oracle::random_sequence(rng, n), 0.0);
    EXPECT_EQ(v.value, std::complex<double>(0.0, 0.0));
    EXPECT_EQ(v.magnitude_squared, 0.0);
  }
}

TEST(FilterValue, FreeEvolutionAtPi) {
  const auto v = filter_value(PulseSequence(), std::numbers::pi);
  EXPECT_NEAR(v.value.real(), 2.0, 1e-15);
  EXPECT_NEAR(v.value.imag(), 0.0, 1e-15);
  EXPECT_NEAR(v.magnitude_squared, 4.0, 1e-15);
}

TEST(FilterValue, SinglePulseAtTwoPi) {
  EXPECT_NEAR(filter_value(make_sequence({0.5}), 2 * std::numbers::pi).magnitude_squared, 16.0, 1e-13);
}

TEST(FilterValue, MatchesLongDoubleOracle) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_sequence(rng, trial % 16);
    const double z = 0.37 * trial;
    const auto v = filter_value(s, z);
    const auto ref = oracle::filter_long_double(s, z);
    const double scale = 2.0 * s.n() + 2.0;
    EXPECT_NEAR(v.value.real(), static_cast<double>(ref.real()), 1e-14 * scale);
    EXPECT_NEAR(v.value.imag(), static_cast<double>(ref.imag()), 1e-14 * scale);
  }
}

TEST(FilterValue, MagnitudeConsistentAndBounded) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = trial % 20;
    const auto v = filter_value(oracle::random_sequence(rng, n), 0.731 * trial);
    EXPECT_NEAR(v.magnitude_squared, std::norm(v.value), 4 * std::numeric_limits<double>::epsilon() * v.magnitude_squared);
    EXPECT_LE(v.magnitude_squared, (2.0 * n + 2) * (2.0 * n + 2));
  }
}

TEST(SumForm, ZeroAtOriginAndFreeEvolution) {
  EXPECT_EQ(magnitude_squared_sumform(udd(4), 0.0), 0.0);
  EXPECT_NEAR(magnitude_squared_sumform(PulseSequence(), std::numbers::pi), 4.0, 1e-14);
}

TEST(SumForm, AgreesWithDirectForm) {
  EXPECT_NEAR(magnitude_squared_sumform(udd(2), 1.0), filter_value(udd(2), 1.0).magnitude_squared,
              1e-12 * filter_value(udd(2), 1.0).magnitude_squared);
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 300; ++trial) {
    const auto s = oracle::random_sequence(rng, trial % 12);
    // Away from near-zeros of y, where relative comparison is meaningful.
    const double z = 3.0 + 0.05 * trial;
    const double direct = filter_value(s, z).magnitude_squared;
    if (direct < 1e-2) continue;
    EXPECT_NEAR(magnitude_squared_sumform(s, z), direct, 1e-12 * direct) << "trial " << trial;
  }
}

TEST(DcIdentity, ExactForAllSmallN) {
  for (int n = 0; n <= 32; ++n) EXPECT_EQ(dc_identity_check(n), 0) << n;
}

TEST(FilterValue, ReversalPreservesMagnitude) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_sequence(rng, 1 + trial % 10);
    const double z = 0.5 + 0.1 * trial;
    const double a = filter_value(s, z).magnitude_squared;
    if (a < 1e-3) continue;
    EXPECT_NEAR(filter_value(reverse(s), z).magnitude_squared, a, 1e-12 * a);
  }
}

TEST(FilterValue, QuadraticZeroAtOrigin) {
  std::mt19937_64 rng(26);
  for (int n = 0; n <= 8; ++n) {
    const auto s = oracle::random_sequence(rng, n);
    // |y|² / z² → (Σ_j w_j δ_j)², at most (2n + 2)².
    for (double z : {1e-2, 1e-4, 1e-6}) {
      EXPECT_LE(filter_value(s, z).magnitude_squared / (z * z), (2.0 * n + 2) * (2.0 * n + 2));
    }
  }
}
