#include <random>

#include <gtest/gtest.h>

#include "fdlab/population.hpp"

namespace fdlab {
namespace {

TEST(Pite, WorkedExamples) {
  EXPECT_DOUBLE_EQ(pite(UnitPotentials::mediated(0, 1, 0.0, 1.0)), 1.0);
  EXPECT_DOUBLE_EQ(pite(UnitPotentials::mediated(1, 1, 3.0, -7.0)), 0.0);
  EXPECT_DOUBLE_EQ(pite(UnitPotentials::mediated(1, 0, 0.5, 2.0)), -1.5);
}

TEST(Pite, RejectsDirectUnits) {
  EXPECT_THROW(pite(UnitPotentials::direct(0, 1, 0.0, 2.3)), precondition_error);
}

TEST(Pite, MatchesDirectEvaluationForEveryMediatorPattern) {
  // Y(M(1)) - Y(M(0)) evaluated by looking up the schedule, for all (M(0), M(1)).
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double y0 = normal(rng), y1 = normal(rng);
    for (int m0 = 0; m0 <= 1; ++m0)
      for (int m1 = 0; m1 <= 1; ++m1) {
        auto schedule = [&](int m) { return m == 1 ? y1 : y0; };
        const auto unit = UnitPotentials::mediated(m0, m1, y0, y1);
        EXPECT_DOUBLE_EQ(pite(unit), schedule(m1) - schedule(m0));
      }
  }
}

TEST(UnitPotentials, RejectsNonBinaryMediator) {
  EXPECT_THROW(UnitPotentials::mediated(2, 1, 0, 1), precondition_error);
  EXPECT_THROW(UnitPotentials::direct(0, -1, 0, 1), precondition_error);
}

TEST(BinaryPopulation, Invariants) {
  EXPECT_THROW(BinaryPopulation({}), precondition_error);
  EXPECT_THROW(BinaryPopulation({{0.5, UnitPotentials::mediated(0, 1, 0, 1)}}),
               precondition_error);
  EXPECT_THROW(BinaryPopulation({{0.0, UnitPotentials::mediated(0, 1, 0, 1)},
                                 {1.0, UnitPotentials::mediated(0, 1, 0, 1)}}),
               precondition_error);
  EXPECT_NO_THROW(BinaryPopulation({{0.3, UnitPotentials::mediated(0, 1, 0, 1)},
                                    {0.7, UnitPotentials::mediated(0, 0, 0, 1)}}));
}

BinaryPopulation pn_null(double p, double n, double null_share, double ep = 1.0,
                         double en = 1.0) {
  std::vector<SubgroupSpec> g;
  if (p > 0) g.push_back({p, UnitPotentials::mediated(0, 1, 0.0, ep)});
  if (n > 0) g.push_back({n, UnitPotentials::mediated(1, 0, 0.0, en)});
  if (null_share > 0) g.push_back({null_share, UnitPotentials::mediated(1, 1, 0.0, 1.0)});
  return BinaryPopulation(std::move(g));
}

TEST(Classify, WorkedExamples) {
  auto c = classify(pn_null(0.6, 0.3, 0.1));
  EXPECT_NEAR(c.p_frac, 0.6, 1e-15);
  EXPECT_NEAR(c.n_frac, 0.3, 1e-15);
  EXPECT_NEAR(c.null_frac, 0.1, 1e-15);
  EXPECT_NEAR(c.omega, 0.3, 1e-15);

  c = classify(pn_null(0, 0, 1.0));
  EXPECT_EQ(c.omega, 0.0);

  c = classify(pn_null(0.5, 0.5, 0));
  EXPECT_EQ(c.omega, 0.0);
  EXPECT_EQ(c.p_frac, 0.5);
  EXPECT_EQ(c.n_frac, 0.5);
}

TEST(Classify, RejectsDirectSubgroups) {
  BinaryPopulation pop({{0.5, UnitPotentials::mediated(0, 1, 0, 1)},
                        {0.5, UnitPotentials::direct(0, 1, 0, 1)}});
  EXPECT_THROW(classify(pop), precondition_error);
  EXPECT_THROW(true_pate(pop), precondition_error);
  EXPECT_THROW(true_late(pop), precondition_error);
}

TEST(TruePate, WorkedExamples) {
  // 0.6 * 1.0 - 0.4 * 0.5
  EXPECT_NEAR(true_pate(pn_null(0.6, 0.4, 0, 1.0, 0.5)), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(true_pate(BinaryPopulation({{1.0, UnitPotentials::mediated(0, 1, 1.0, 3.25)}})),
                   2.25);
  EXPECT_EQ(true_pate(pn_null(0, 0, 1.0)), 0.0);
}

TEST(TruePate, EqualsWeightedDifferenceForm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> share(0.01, 0.99), effect(-4, 4);
  for (int rep = 0; rep < 1000; ++rep) {
    const double pp = share(rng), ep = effect(rng), en = effect(rng);
    const auto pop = pn_null(pp, 1.0 - pp, 0, ep, en);
    EXPECT_NEAR(true_pate(pop), ep * pp - en * (1.0 - pp), 1e-12);
  }
}

TEST(TrueAte, WorkedExamples) {
  const auto mediated = pn_null(0.6, 0.3, 0.1, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(true_ate(mediated), true_pate(mediated));

  BinaryPopulation mixed({{0.75, UnitPotentials::mediated(0, 1, 0.0, 0.595)},
                          {0.25, UnitPotentials::direct(0, 1, 0.0, 2.3)}});
  EXPECT_NEAR(true_ate(mixed), 1.02125, 1e-12);

  EXPECT_DOUBLE_EQ(true_ate(BinaryPopulation({{1.0, UnitPotentials::direct(1, 1, 1.0, 3.3)}})),
                   3.3 - 1.0);
}

TEST(TrueLate, WorkedExamples) {
  const auto no_nulls = pn_null(0.7, 0.3, 0, 1.5, 0.5);
  EXPECT_DOUBLE_EQ(true_late(no_nulls), true_pate(no_nulls));
  EXPECT_NEAR(true_late(pn_null(0.3, 0, 0.7)), 1.0, 1e-12);
  EXPECT_NEAR(true_late(pn_null(0.3, 0.2, 0.5)), 0.2, 1e-12);
  EXPECT_THROW(true_late(pn_null(0, 0, 1.0)), precondition_error);
}

TEST(Properties, FractionsAndLateInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0), effect(-3, 3);
  for (int rep = 0; rep < 500; ++rep) {
    const double resp = 0.05 + 0.9 * u(rng);
    const double p = resp * u(rng);
    const double n = resp - p;
    const double ep = effect(rng), en = effect(rng);
    const auto pop = pn_null(p, n, 1.0 - resp, ep, en);
    const auto c = classify(pop);
    for (double f : {c.p_frac, c.n_frac, c.null_frac}) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
    }
    EXPECT_NEAR(c.p_frac + c.n_frac + c.null_frac, 1.0, 1e-12);
    EXPECT_GE(c.omega, -1.0);
    EXPECT_LE(c.omega, 1.0);

    // Removing the null share and renormalizing leaves the LATE unchanged.
    if (p > 0 && n > 0) {
      const auto responsive = pn_null(p / resp, n / resp, 0, ep, en);
      EXPECT_NEAR(true_late(pop), true_late(responsive), 1e-12);
    }
  }
}

}  // namespace
}  // namespace fdlab
