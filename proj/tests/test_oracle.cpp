#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"
#include "tailcalc/oracle.hpp"

using namespace tailcalc;
using support::Rng;

namespace {

WeightSequence list(std::initializer_list<Rational> v) {
  std::vector<Expr> e;
  for (const auto& x : v) e.emplace_back(x);
  return WeightSequence::explicit_list(std::move(e));
}

}  // namespace

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitIntervalIsOpen) {
  EXPECT_GT(Philox4x32::to_unit(0, 0), 0.0);
  EXPECT_LT(Philox4x32::to_unit(0xffffffff, 0xffffffff), 1.0);
}

TEST(ClopperPearson, BracketsTheEstimateAndHandlesEdges) {
  auto [lo, hi] = clopper_pearson(50, 1000);
  EXPECT_LT(lo, 0.05);
  EXPECT_GT(hi, 0.05);
  EXPECT_EQ(clopper_pearson(0, 100).first, 0.0);
  EXPECT_EQ(clopper_pearson(100, 100).second, 1.0);
  // Exact upper bound for k = 0: 1 - (0.005)^{1/n}.
  EXPECT_NEAR(clopper_pearson(0, 100).second, 1 - std::pow(0.005, 0.01), 1e-12);
}

TEST(Samplers, InvertTheSurvivalFunction) {
  for (const auto& spec :
       {DistributionSpec::pareto(Expr(3)), DistributionSpec::burr(Expr(2), Expr(Rational(3, 2)), Expr(2)),
        DistributionSpec::frechet(Expr(2)), DistributionSpec::exponential(Expr(2)), DistributionSpec::student(Expr(3)),
        DistributionSpec::log_gamma(Expr(2), Expr(3))}) {
    auto draw = make_sampler(spec);
    for (double u : {0.9, 0.5, 0.1, 1e-3, 1e-6}) {
      EXPECT_NEAR(survival(spec, draw(u, 0.5)) / u, 1.0, 1e-8) << family_name(spec.family) << " u=" << u;
    }
  }
  EXPECT_THROW(make_sampler(DistributionSpec::power_series({}, {Expr(1)})), OracleError);
}

TEST(Samplers, HallWeissmanMixture) {
  auto spec = DistributionSpec::hall_weissman(Expr(1), Expr(3), Expr(2), Expr(4));
  auto draw = make_sampler(spec);
  EXPECT_DOUBLE_EQ(draw(0.1, 0.25), 2.0);                  // first component: 0.25^{-1/2}
  EXPECT_DOUBLE_EQ(draw(0.9, 1.0 / 16), 2.0);              // second component: 16^{-1/4}
}

TEST(BruteMoments, TwoUnitWeights) {
  MomentVector<Rational> fm({Rational(1), Rational(2), Rational(7)});
  std::vector<Rational> c{1, 1};
  EXPECT_EQ(brute_moments(c, fm, 1), 4);
  EXPECT_EQ(brute_moments(c, fm, 2), 22);
  EXPECT_THROW(brute_moments(std::vector<Rational>(7, Rational(1)), fm, 2), OracleError);
}

// Two unit exponentials: P(X + Y > t) = (1 + t) e^{-t}.
TEST(NumericConvolution, ExponentialPair) {
  const double h = 1e-3;
  auto g = tail_grid(DistributionSpec::exponential(Expr(1)), h, 8001);
  auto conv = numeric_convolution(g, g);
  for (std::size_t k : {1000u, 3000u, 8000u}) {
    const double t = h * static_cast<double>(k);
    EXPECT_NEAR(conv.tail[k], (1 + t) * std::exp(-t), 1e-6) << t;
  }
}

// Adding an atom at 0 leaves the tail unchanged.
TEST(NumericConvolution, PointMassAtZeroIsNeutral) {
  auto x = tail_grid(DistributionSpec::point_mass(Expr(0)), 0.01, 500);
  auto y = tail_grid(DistributionSpec::pareto(Expr(2)), 0.01, 500);
  auto conv = numeric_convolution(x, y);
  for (std::size_t k = 0; k < 500; k += 37) EXPECT_NEAR(conv.tail[k], y.tail[k], 1e-15);
  EXPECT_THROW(convolved_tail_at(x, tail_grid(DistributionSpec::pareto(Expr(2)), 0.02, 500), 3), OracleError);
}

TEST(MonteCarlo, SingleParetoWithinInterval) {
  McConfig cfg;
  cfg.samples = 200000;
  cfg.thresholds = {1, 3, 9};
  cfg.seed = 7;
  auto pts = mc_tail(list({1}), DistributionSpec::pareto(Expr(2)), cfg);
  for (const auto& p : pts) {
    const double exact = std::pow(1 + p.threshold, -2.0);
    EXPECT_LE(p.ci_lo, exact) << p.threshold;
    EXPECT_GE(p.ci_hi, exact) << p.threshold;
    EXPECT_EQ(p.bias_bound, 0.0);
  }
}

TEST(MonteCarlo, WeightedPairAgreesWithNumericalConvolution) {
  McConfig cfg;
  cfg.samples = 200000;
  cfg.thresholds = {2, 6};
  cfg.seed = 8;
  auto spec = DistributionSpec::pareto(Expr(3));
  auto pts = mc_tail(list({1, 1}), spec, cfg);
  const double h = 1e-3;
  auto g = tail_grid(spec, h, 6001);
  for (const auto& p : pts) {
    const double conv = convolved_tail_at(g, g, static_cast<std::size_t>(std::lround(p.threshold / h)));
    EXPECT_LE(p.ci_lo, conv) << p.threshold;
    EXPECT_GE(p.ci_hi, conv) << p.threshold;
  }
}

// The same seed gives the same counts whatever the shard-to-thread layout.
TEST(MonteCarlo, DeterministicAcrossThreadLayouts) {
  McConfig cfg;
  cfg.samples = 20000;
  cfg.thresholds = {1, 4};
  cfg.shards = 8;
  auto spec = DistributionSpec::pareto(Expr(3));
  auto w = WeightSequence::ar1(Expr(Rational(1, 2)));
  setenv("TAILCALC_THREADS", "1", 1);
  auto one = mc_tail(w, spec, cfg);
  unsetenv("TAILCALC_THREADS");
  auto many = mc_tail(w, spec, cfg);
  // Shards replayed back to front.
  std::vector<std::uint64_t> hits(cfg.thresholds.size(), 0), part;
  for (unsigned sh = cfg.shards; sh-- > 0;) {
    detail::run_shard(numeric_weights(w, cfg.truncation), make_sampler(spec), cfg.thresholds, cfg.seed, sh,
                      cfg.samples * sh / cfg.shards, cfg.samples * (sh + 1) / cfg.shards, part);
    for (std::size_t k = 0; k < hits.size(); ++k) hits[k] += part[k];
  }
  for (std::size_t k = 0; k < cfg.thresholds.size(); ++k) {
    EXPECT_EQ(one[k].hits, many[k].hits);
    EXPECT_EQ(one[k].hits, hits[k]);
  }
  EXPECT_GT(one[0].bias_bound, 0.0);
}

// At least 95 of 100 independent 99% intervals cover the true value.
TEST(MonteCarlo, IntervalCoverage) {
  auto spec = DistributionSpec::pareto(Expr(2));
  const double exact = std::pow(1 + 4.0, -2.0);
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    McConfig cfg;
    cfg.samples = 4000;
    cfg.thresholds = {4};
    cfg.seed = seed;
    cfg.shards = 4;
    auto p = mc_tail(list({1}), spec, cfg).front();
    if (p.ci_lo <= exact && exact <= p.ci_hi) ++covered;
  }
  EXPECT_GE(covered, 95);
}

TEST(MonteCarlo, RejectsBadConfiguration) {
  McConfig cfg;
  cfg.thresholds = {3, 1};
  EXPECT_THROW(mc_tail(list({1}), DistributionSpec::pareto(Expr(2)), cfg), OracleError);
  cfg.thresholds = {1};
  cfg.samples = 0;
  EXPECT_THROW(mc_tail(list({1}), DistributionSpec::pareto(Expr(2)), cfg), OracleError);
}

TEST(MonteCarlo, CsvHasOneColumnPerExpansion) {
  std::vector<McPoint> pts(2);
  pts[0].threshold = 1;
  pts[1].threshold = 2;
  std::ostringstream os;
  write_mc_csv(os, pts, {{0.1, 0.2}, {0.3, 0.4}});
  std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "threshold,estimate,ci_lo,ci_hi,expansion_1term,expansion_2term");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}
