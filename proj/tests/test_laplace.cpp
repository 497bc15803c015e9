#include <gtest/gtest.h>

#include "support.hpp"
#include "tailcalc/laplace.hpp"

using namespace tailcalc;
using support::Rng;

namespace {

using Char = LaplaceCharacter<Rational>;
using MV = MomentVector<Rational>;

Rational fact(long n) { return cas::factorial(n); }

}  // namespace

TEST(LaplaceCharacter, CoefficientsAlternateOverFactorials) {
  MV mu({Rational(1), Rational(2), Rational(6), Rational(24)});
  Char c = character_from_moments(mu);
  EXPECT_EQ(c[0], 1);
  EXPECT_EQ(c[1], -2);
  EXPECT_EQ(c[2], 3);
  EXPECT_EQ(c[3], -4);
  EXPECT_EQ(moments_of(c).mu, mu.mu);
}

TEST(LaplaceCharacter, PointMassAtZeroIsIdentity) {
  EXPECT_EQ(character_from_moments(MV::point_mass(5, Rational(0))), Char::identity(5));
}

TEST(LaplaceCharacter, RejectsInvalidMomentVectors) {
  EXPECT_THROW(MV({Rational(2), Rational(1)}), LaplaceError);
  EXPECT_THROW(MV({Rational(1), Rational(3), Rational(1)}), LaplaceError);  // variance -8
  EXPECT_THROW(MV(std::vector<Rational>{}), LaplaceError);
  EXPECT_THROW(compose(Char::identity(2), Char::identity(3)), LaplaceError);
}

// Convolution of two three-point laws enumerated pair by pair.
TEST(LaplaceCharacter, CompositionMatchesEnumeratedConvolution) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = rng.atoms(3), g = rng.atoms(3);
    auto sum = support::combine(f, g, [](const Rational& x, const Rational& y) { return Rational(x + y); });
    const int m = 4;
    Char lhs = compose(character_from_moments(support::atom_moments(f, m)),
                       character_from_moments(support::atom_moments(g, m)));
    EXPECT_EQ(lhs, character_from_moments(support::atom_moments(sum, m)));
  }
}

TEST(LaplaceCharacter, MellinCharacterMatchesEnumeratedProduct) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = rng.atoms(3), g = rng.atoms(3);
    auto prod = support::combine(f, g, [](const Rational& x, const Rational& y) { return Rational(x * y); });
    const int m = 4;
    EXPECT_EQ(mellin_character(support::atom_moments(f, m), support::atom_moments(g, m)),
              character_from_moments(support::atom_moments(prod, m)));
  }
}

TEST(LaplaceCharacter, InversionFormulasAgree) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = static_cast<int>(rng.integer(0, 6));
    Char c = character_from_moments(rng.moments(m));
    EXPECT_EQ(invert_partitions(c), invert_nilpotent(c));
  }
}

TEST(LaplaceCharacter, InverseOfPointMassIsReflectedPointMass) {
  Char c = character_from_moments(MV::point_mass(6, Rational(3, 2)));
  EXPECT_EQ(invert_partitions(c), character_from_moments(MV::point_mass(6, Rational(-3, 2))));
}

TEST(LaplaceCharacter, PartitionInversionHandlesGeneralConstantTerm) {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    Char c = rng.character(static_cast<int>(rng.integer(0, 6)));
    Char inv = invert_partitions(c);
    EXPECT_EQ(compose(c, inv), Char::identity(c.order()));
  }
  EXPECT_THROW(invert_nilpotent(Char::from_coefficients({Rational(2), Rational(1)})), LaplaceError);
  EXPECT_THROW(invert_partitions(Char::from_coefficients({Rational(0), Rational(1)})), LaplaceError);
}

// The equilibrium law of an exponential law is the same exponential law.
TEST(LaplaceCharacter, EquilibriumOfExponentialIsItself) {
  std::vector<Rational> b, h;
  for (int k = 0; k <= 6; ++k) b.push_back(fact(k) * power(Rational(2), k));  // mean 2
  for (int k = 0; k <= 5; ++k) h.push_back(b[k]);
  EXPECT_EQ(equilibrium_character(MV(b)), character_from_moments(MV(h)));
}

TEST(LaplaceCharacter, EquilibriumOfUniformMatchesDirectIntegral) {
  // B uniform on [0,2]: H has density 1 - t/2, so E H^k = 2^{k+1} / ((k+1)(k+2)).
  std::vector<Rational> b, h;
  for (int k = 0; k <= 5; ++k) b.push_back(power(Rational(2), k) / (k + 1));
  for (int k = 0; k <= 4; ++k) h.push_back(power(Rational(2), k + 1) / ((k + 1) * (k + 2)));
  EXPECT_EQ(equilibrium_character(MV(b)), character_from_moments(MV(h)));
}

TEST(LaplaceCharacter, ScaledMomentsAreMomentsOfScaledLaw) {
  MV mu({Rational(1), Rational(1, 2), Rational(1, 3)});
  MV s = scale_moments(mu, Rational(-2));
  EXPECT_EQ(s.mu, (std::vector<Rational>{1, -1, Rational(4, 3)}));
}

TEST(LaplaceCharacter, BinomialSplitEqualsComposition) {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = static_cast<int>(rng.integer(0, 6));
    MV k = rng.moments(m), h = rng.moments(m);
    EXPECT_EQ(laplace_binomial(k, h), compose(character_from_moments(k), character_from_moments(h)));
  }
}

TEST(LaplaceCharacter, CentralMoments) {
  // Bernoulli(1/2) on {0, 2}: mean 1, variance 1, kappa3 0, kappa4 1.
  MV mu({Rational(1), Rational(1), Rational(2), Rational(4), Rational(8)});
  EXPECT_EQ(mu.variance(), 1);
  EXPECT_EQ(mu.kappa3(), 0);
  EXPECT_EQ(mu.kappa4(), 1);
}

TEST(SeriesPoly, LogExpRoundTrip) {
  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Rational> c{Rational(1)};
    for (int j = 1; j <= 6; ++j) c.push_back(rng.rational());
    SeriesPoly<Rational> s(6, c);
    EXPECT_EQ(s.log().exp(), s);
    EXPECT_EQ(s * s.reciprocal(), SeriesPoly<Rational>::constant(6, Rational(1)));
  }
}
