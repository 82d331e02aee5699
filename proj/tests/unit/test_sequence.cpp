#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ddopt/sequence.hpp"
#include "oracles.hpp"

using namespace ddopt;

namespace {

SequenceErrorKind kind_of(std::vector<double> deltas) {
  try {
    PulseSequence s(std::move(deltas));
  } catch (const SequenceError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no SequenceError thrown";
  return SequenceErrorKind::OutOfRange;
}

}  // namespace

TEST(PulseSequence, AcceptsOrderedInput) {
  const auto s = make_sequence({0.25, 0.75});
  EXPECT_EQ(s.n(), 2u);
  EXPECT_EQ(s.time(0), 0.0);
  EXPECT_EQ(s.time(1), 0.25);
  EXPECT_EQ(s.time(3), 1.0);
  EXPECT_EQ(s.times().size(), 4u);
}

TEST(PulseSequence, RejectsInvalidInput) {
  EXPECT_EQ(kind_of({0.75, 0.25}), SequenceErrorKind::NonMonotonic);
  EXPECT_EQ(kind_of({0.3, 0.3}), SequenceErrorKind::NonMonotonic);
  EXPECT_EQ(kind_of({0.3, 0.3 + kMinSeparation / 2}), SequenceErrorKind::TooClose);
  EXPECT_EQ(kind_of({0.0, 0.5}), SequenceErrorKind::OutOfRange);
  EXPECT_EQ(kind_of({0.5, 1.0}), SequenceErrorKind::OutOfRange);
  EXPECT_EQ(kind_of({-0.1}), SequenceErrorKind::OutOfRange);
  EXPECT_EQ(kind_of({NAN}), SequenceErrorKind::OutOfRange);
  EXPECT_EQ(kind_of({kMinSeparation / 2}), SequenceErrorKind::TooClose);
  EXPECT_EQ(kind_of({1.0 - kMinSeparation / 2}), SequenceErrorKind::TooClose);
}

TEST(PulseSequence, ErrorReportsIndex) {
  try {
    make_sequence({0.1, 0.5, 0.4});
    FAIL();
  } catch (const SequenceError& e) {
    EXPECT_EQ(e.index(), 2u);
    EXPECT_NE(std::string(e.what()).find("NonMonotonic"), std::string::npos);
  }
}

TEST(PulseSequence, WeightsFollowBoundaryRule) {
  const auto s = udd(3);
  EXPECT_EQ(s.q(0), 0);
  EXPECT_EQ(s.q(4), 0);
  for (std::size_t j = 1; j <= 3; ++j) EXPECT_EQ(s.q(j), 1);
  EXPECT_EQ(s.weight(0), 1);
  EXPECT_EQ(s.weight(1), -2);
  EXPECT_EQ(s.weight(2), 2);
  EXPECT_EQ(s.weight(3), -2);
  EXPECT_EQ(s.weight(4), 1);
  EXPECT_EQ(pulse_weight(3, 2), -1);
}

TEST(Udd, KnownValues) {
  EXPECT_EQ(udd(1).deltas()[0], 0.5);
  EXPECT_EQ(udd(2), make_sequence({0.25, 0.75}));
  const auto u3 = udd(3);
  EXPECT_NEAR(u3.deltas()[0], 0.1464466094067262, 1e-15);
  EXPECT_EQ(u3.deltas()[1], 0.5);
  EXPECT_NEAR(u3.deltas()[2], 0.8535533905932738, 1e-15);
  EXPECT_TRUE(udd(0).empty());
  EXPECT_THROW(udd(-1), std::invalid_argument);
}

TEST(Udd, MatchesFormula) {
  for (int n = 1; n <= 40; ++n) {
    const auto s = udd(n);
    for (int j = 1; j <= n; ++j) {
      const double x = std::sin(j * M_PI / (2.0 * (n + 1)));
      EXPECT_NEAR(s.time(j), x * x, 4e-16) << "n=" << n << " j=" << j;
    }
  }
}

TEST(Pdd, KnownValues) {
  EXPECT_EQ(pdd(1), make_sequence({0.5}));
  EXPECT_EQ(pdd(3), make_sequence({0.25, 0.5, 0.75}));
  EXPECT_EQ(pdd(4), make_sequence({0.2, 0.4, 0.6, 0.8}));
  EXPECT_TRUE(pdd(0).empty());
}

TEST(Reverse, Examples) {
  const auto r = reverse(make_sequence({0.2, 0.6}));
  EXPECT_NEAR(r.deltas()[0], 0.4, 1e-16);
  EXPECT_NEAR(r.deltas()[1], 0.8, 1e-16);
  EXPECT_EQ(reverse(make_sequence({0.5})), make_sequence({0.5}));
  EXPECT_TRUE(reverse(PulseSequence()).empty());
}

TEST(Reverse, StandardSequencesAreSymmetric) {
  for (int n = 1; n <= 32; ++n) {
    for (const auto& s : {udd(n), pdd(n)}) {
      const auto r = reverse(s);
      for (std::size_t j = 0; j < s.n(); ++j) {
        EXPECT_NEAR(r.deltas()[j], s.deltas()[j], 2.3e-16) << "n=" << n;
      }
    }
  }
}

TEST(Reverse, InvolutionOnRandomSequences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_sequence(rng, 1 + trial % 12);
    const auto rr = reverse(reverse(s));
    for (std::size_t j = 0; j < s.n(); ++j) EXPECT_NEAR(rr.deltas()[j], s.deltas()[j], 2.3e-16);
  }
}

TEST(PairwiseDelta, AntisymmetricAndZeroDiagonal) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_sequence(rng, 1 + trial % 8);
    for (std::size_t i = 0; i < s.times().size(); ++i) {
      EXPECT_EQ(s.pairwise_delta(i, i), std::complex<double>(0.0, 0.0));
      for (std::size_t j = 0; j < s.times().size(); ++j) {
        EXPECT_EQ(s.pairwise_delta(i, j), -s.pairwise_delta(j, i));
        EXPECT_EQ(s.pairwise_delta(i, j).real(), 0.0);
        EXPECT_EQ(s.pairwise_delta(i, j).imag(), s.time(i) - s.time(j));
      }
    }
  }
}

TEST(Serialization, JsonRoundTripIsExact) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = oracle::random_sequence(rng, trial % 10);
    EXPECT_EQ(sequence_from_json(to_json(s)), s);
  }
  EXPECT_EQ(to_json(make_sequence({0.25, 0.75})), "[0.25,0.75]");
  EXPECT_EQ(to_json(PulseSequence()), "[]");
}

TEST(Serialization, JsonErrors) {
  try {
    sequence_from_json("[0.5,");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("at byte"), std::string::npos);
  }
  EXPECT_THROW(sequence_from_json("{\"a\":1}"), std::invalid_argument);
  EXPECT_THROW(sequence_from_json("[\"x\"]"), std::invalid_argument);
  EXPECT_THROW(sequence_from_json("[0.75,0.25]"), SequenceError);
}

TEST(Serialization, CsvRoundTripIsExact) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = oracle::random_sequence(rng, trial % 10);
    EXPECT_EQ(sequence_from_csv(to_csv(s)), s);
  }
  EXPECT_EQ(to_csv(make_sequence({0.25, 0.75})), "j,delta_j\n1,0.25\n2,0.75\n");
}

TEST(Serialization, CsvErrors) {
  EXPECT_THROW(sequence_from_csv("j,delta_j\n1,abc\n"), std::invalid_argument);
  EXPECT_THROW(sequence_from_csv("j,delta_j\n1,0.75\n2,0.25\n"), SequenceError);
}

TEST(Serialization, FormatRealUsesSeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(0.5), "0.5");
  std::ostringstream os;
  os << make_sequence({0.5});
  EXPECT_EQ(os.str(), "[0.5]");
}
