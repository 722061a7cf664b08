#include <gtest/gtest.h>

#include <cmath>

#include "greenp2/invariants.hpp"
#include "greenp2/multiplicity.hpp"
#include "support.hpp"

using namespace greenp2;
using namespace greenp2::testing;

namespace {

const ProjPoint kCorner = ProjPoint::from({0.0, 0.0, 1.0});
const ProjPoint kCentre = ProjPoint::from({1.0, 1.0, 1.0});

std::vector<int> ints(std::initializer_list<int> v) { return v; }

/// Maps with nontrivial local structure: configuration rows and the example map.
std::vector<ProjMap> corpus() {
  std::vector<ProjMap> out{power_map(2), example_map()};
  for (const char* row : {"1-0", "1-2", "2-1", "2-3"}) out.push_back(gen_table1(row, 2, 3));
  return out;
}

std::vector<ProjPoint> corpus_points(const ProjMap& f, Rng& rng) {
  std::vector<ProjPoint> pts{kCorner, ProjPoint::from({1.0, 0.0, 0.0}), ProjPoint::from({0.0, 1.0, 0.0})};
  for (const auto& p : critical_samples(f, 2, rng)) pts.push_back(p);
  pts.push_back(ProjPoint::from(rng.fs_point()));
  std::erase_if(pts, [&](const ProjPoint& p) { return !orbit_well_separated(f, p, 4); });
  return pts;
}

}  // namespace

TEST(MuOrder, NoncriticalPoint) { EXPECT_EQ(mu_order(power_map(2), kCentre, 1), 0); }

TEST(MuOrder, PointOnInvariantLine) { EXPECT_EQ(mu_order(power_map(2), ProjPoint::from({1.0, 0.0, 1.0}), 1), 1); }

TEST(MuOrder, ExampleCorner) { EXPECT_EQ(mu_order(example_map(), kCorner, 1), 2); }

TEST(MuOrder, PowerMapIteratesOnLine) {
  // Jf^n = const * (zwt)^{d^n - 1}; on {w = 0} away from the corners only w vanishes.
  const ProjPoint p = ProjPoint::from({1.0, 0.0, 1.0});
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(mu_order(power_map(2), p, n), (1 << n) - 1);
}

TEST(COrder, Examples) {
  EXPECT_EQ(c_order(power_map(2), kCorner, 1), 2);
  EXPECT_EQ(c_order(power_map(2), kCentre, 1), 1);
  EXPECT_EQ(c_order(example_map(), kCorner, 1), 1);
  EXPECT_EQ(c_order(power_map(3), kCorner, 2), 9);
}

TEST(ELocal, Examples) {
  EXPECT_EQ(e_local(power_map(2), kCorner, 1), 4);
  EXPECT_EQ(e_local(power_map(2), kCentre, 1), 1);
  EXPECT_EQ(e_local(power_map(2), ProjPoint::from({1.0, 0.0, 1.0}), 1), 2);
  EXPECT_EQ(e_local(power_map(3), kCorner, 1), 9);
}

TEST(ELocal, DirectCountAgreesWithProduct) {
  EXPECT_EQ(e_local_direct(power_map(2), kCorner, 2), 16);
  EXPECT_EQ(e_local_direct(example_map(), kCorner, 2), e_local(example_map(), kCorner, 2));
}

TEST(Asymptotics, PowerMapCorner) {
  const MultiplicityReport r = asymptotics(power_map(2), kCorner, 3);
  EXPECT_EQ(r.e_series, ints({4, 16, 64}));
  EXPECT_EQ(r.c_series, ints({2, 4, 8}));
  EXPECT_NEAR(r.e_inf_est, 4.0, 1e-12);
  EXPECT_NEAR(r.c_inf_est, 2.0, 1e-12);
}

TEST(Asymptotics, PowerMapCentreIsTrivial) {
  const MultiplicityReport r = asymptotics(power_map(2), kCentre, 3);
  EXPECT_EQ(r.mu_series, ints({0, 0, 0}));
  EXPECT_EQ(r.e_series, ints({1, 1, 1}));
  EXPECT_EQ(r.c_series, ints({1, 1, 1}));
}

TEST(Asymptotics, ExampleCorner) {
  const MultiplicityReport r = asymptotics(example_map(), kCorner, 4);
  EXPECT_EQ(r.e_series, ints({4, 16, 64, 256}));
  EXPECT_EQ(r.c_series, ints({1, 1, 1, 1}));
}

TEST(Asymptotics, ExampleCornerContractionStaysOne) {
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(c_order(example_map(), kCorner, n), 1) << "n = " << n;
}

TEST(InequalityReport, AllPassOnExamples) {
  for (const auto& [f, p] : {std::pair{power_map(2), kCorner}, std::pair{power_map(2), kCentre},
                             std::pair{example_map(), kCorner}}) {
    const auto verdicts = inequality_report(asymptotics(f, p, 2), f.degree());
    EXPECT_FALSE(verdicts.empty());
    for (const auto& [name, ok] : verdicts) EXPECT_TRUE(ok) << name;
  }
}

TEST(Inequalities, CriticalPointsOfRandomMaps) {
  Rng rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 2 + trial % 2;
    const ProjMap f = random_map(d, rng);
    for (const ProjPoint& p : critical_samples(f, 4, rng)) {
      const int mu = mu_order(f, p, 1), e = e_local(f, p, 1), c = c_order(f, p, 1);
      EXPECT_LE(2 * (c - 1), mu);
      EXPECT_LE(mu, 2 * (e - 1));
      EXPECT_LE(c * c, e);
      EXPECT_LE(mu, 3 * (d - 1));
      EXPECT_LE(e, d * d);
      EXPECT_LE(c, d);
      EXPECT_GE(mu, 1);
    }
  }
}

TEST(Cocycle, LawsHoldOnCorpus) {
  Rng rng(77);
  for (const ProjMap& f : corpus()) {
    for (const ProjPoint& p : corpus_points(f, rng)) {
      for (int n = 1; n <= 2; ++n)
        for (int k = 1; n + k <= 4; ++k) {
          const ProjPoint q = [&] {
            ProjPoint x = p;
            for (int j = 0; j < n; ++j) x = apply(f, x);
            return x;
          }();
          EXPECT_EQ(mu_order(f, p, n + k), mu_order(f, p, n) + mu_after(f, p, n, k));
          EXPECT_EQ(e_local(f, p, n + k), e_local(f, p, n) * e_local(f, q, k));
          EXPECT_GE(c_order(f, p, n + k), c_order(f, p, n) * c_order(f, q, k));
          EXPECT_LE(3 + 2 * mu_order(f, p, n + k), (3 + 2 * mu_order(f, p, n)) * (3 + 2 * mu_order(f, q, k)));
        }
    }
  }
}

TEST(Cocycle, DirectJacobianOrderMatchesSum) {
  for (int n = 1; n <= 3; ++n) {
    EXPECT_EQ(mu_direct(power_map(2), kCorner, n), mu_order(power_map(2), kCorner, n));
    EXPECT_EQ(mu_direct(example_map(), kCorner, n), mu_order(example_map(), kCorner, n));
  }
}

TEST(ChartIndependence, SameValuesInEveryChart) {
  const ProjMap f = power_map(2);
  const ProjPoint p = ProjPoint::from({1.0, 0.0, 1.0});
  const ProjPoint corner = ProjPoint::from({1.0, 0.0, 0.0});
  for (int chart : {0, 2}) {
    MultiplicityOptions o;
    o.first_chart = chart;
    EXPECT_EQ(mu_order(f, p, 2, o), 3);
    EXPECT_EQ(c_order(f, p, 2, o), 1);
  }
  Rng rng(9);
  const ProjMap g = random_map(2, rng);
  for (const ProjPoint& q : critical_samples(g, 3, rng)) {
    MultiplicityOptions a, b;
    a.first_chart = 0;
    b.first_chart = 1;
    EXPECT_EQ(mu_order(g, q, 1, a), mu_order(g, q, 1, b));
    EXPECT_EQ(c_order(g, q, 1, a), c_order(g, q, 1, b));
  }
  MultiplicityOptions o;
  o.first_chart = 0;
  EXPECT_EQ(c_order(f, corner, 2, o), 4);
}

TEST(SeriesBounds, ReportRanges) {
  Rng rng(5);
  const ProjMap f = random_map(2, rng);
  for (const ProjPoint& p : critical_samples(f, 3, rng)) {
    const MultiplicityReport r = asymptotics(f, p, 3);
    for (int n = 1; n <= 3; ++n) {
      EXPECT_GE(r.e_series[n - 1], 1);
      EXPECT_LE(r.e_series[n - 1], 1 << (2 * n));
      EXPECT_GE(r.c_series[n - 1], 1);
      EXPECT_LE(r.c_series[n - 1], 1 << n);
      if (n > 1) {
        EXPECT_GE(r.e_series[n - 1], r.e_series[n - 2]);
        EXPECT_GE(r.mu_series[n - 1], r.mu_series[n - 2]);
      }
    }
    EXPECT_LE(r.mu_series[0], 3);
  }
}
