#include <gtest/gtest.h>

#include <random>

#include "capmkt/auction.hpp"
#include "instances.hpp"

using namespace capmkt;

namespace {

// W = 100/200/300, 50 MW each, demand P = 260 - Q.
std::vector<CapacityBid> golden_bids() { return {{"g1", 100, 50}, {"g2", 200, 50}, {"g3", 300, 50}}; }
DemandCurve golden_curve() { return DemandCurve::from_line(1.0, 260.0); }

void expect_same(const ClearingResult& a, const ClearingResult& b, double tol = 1e-9) {
  ASSERT_EQ(a.cleared, b.cleared);
  EXPECT_NEAR(a.price, b.price, tol);
  EXPECT_NEAR(a.quantity, b.quantity, tol);
  ASSERT_EQ(a.sold.size(), b.sold.size());
  for (std::size_t i = 0; i < a.sold.size(); ++i) EXPECT_NEAR(a.sold[i], b.sold[i], tol);
  EXPECT_EQ(a.marginal, b.marginal);
}

}  // namespace

TEST(Clearing, GoldenThreeGenerators) {
  const auto bids = golden_bids();
  const auto curve = golden_curve();
  for (const auto& res : {clear_greedy(bids, curve), clear_qc(bids, curve), clear_mip(bids, curve)}) {
    ASSERT_TRUE(res.cleared);
    EXPECT_DOUBLE_EQ(res.price, 200.0);
    EXPECT_DOUBLE_EQ(res.quantity, 60.0);
    EXPECT_DOUBLE_EQ(res.sold[0], 50.0);
    EXPECT_DOUBLE_EQ(res.sold[1], 10.0);
    EXPECT_DOUBLE_EQ(res.sold[2], 0.0);
    EXPECT_EQ(res.marginal, std::optional<std::size_t>(1));
    EXPECT_EQ(res.allocated, (std::vector<std::size_t>{0, 1}));
  }
  const auto res = clear_greedy(bids, curve);
  EXPECT_DOUBLE_EQ(social_welfare(res, bids, curve), 6800.0);
  EXPECT_DOUBLE_EQ(consumer_surplus(res, curve), 1800.0);
  EXPECT_DOUBLE_EQ(producer_surplus(res, bids) + consumer_surplus(res, curve), 6800.0);

  const auto closed = supplier_profit(res, bids);
  const auto sim = simulated_profit(res, bids);
  const std::vector<double> expect{5000.0, -8000.0, -15000.0};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(closed[i], expect[i]);
    EXPECT_DOUBLE_EQ(sim[i], expect[i]);
  }
}

TEST(Clearing, MipEnumerationOnGolden) {
  const auto cands = enumerate_mip(golden_bids(), golden_curve());
  ASSERT_EQ(cands.size(), 3u);
  const std::vector<double> caps{50, 50, 50};
  EXPECT_FALSE(mip_feasible(caps, cands[0]));  // 160 MW demanded at 100, only 50 offered
  EXPECT_TRUE(mip_feasible(caps, cands[1]));
  EXPECT_FALSE(mip_feasible(caps, cands[2]));  // negative residual at 300
  EXPECT_DOUBLE_EQ(cands[1].big_m, 160.0);
  EXPECT_EQ(cands[1].x, (std::vector<int>{1, 1, 0}));
  EXPECT_EQ(cands[1].z, (std::vector<int>{0, 1, 0}));
  EXPECT_DOUBLE_EQ(cands[1].objective, 200.0);
}

TEST(Clearing, SinglePeakerClearsAtRequirement) {
  const DemandCurve c = build_demand_curve(1246.5, 10000.0, 0.2070, 0.0856, 0.18, 2000.0);
  const std::vector<CapacityBid> bids{{"rfo", c.c_cone, c.q_cap}};
  for (const auto& res : {clear_greedy(bids, c), clear_qc(bids, c), clear_mip(bids, c)}) {
    ASSERT_TRUE(res.cleared);
    EXPECT_NEAR(res.quantity, c.q_cap, 1e-9);
    EXPECT_NEAR(excess_capacity_ratio(res, bids, c).ratio, 0.0, 1e-12);
  }
}

TEST(Clearing, AllOffersAboveIntercept) {
  const std::vector<CapacityBid> bids{{"a", 300, 10}, {"b", 400, 10}};
  const auto curve = golden_curve();
  const auto g = clear_greedy(bids, curve);
  const auto q = solve_qc(bids, curve);
  const auto m = clear_mip(bids, curve);
  EXPECT_FALSE(g.cleared);
  EXPECT_FALSE(q.clearing.cleared);
  EXPECT_FALSE(m.cleared);
  EXPECT_EQ(m.status, ClearingStatus::Infeasible);
  EXPECT_DOUBLE_EQ(g.quantity, 0.0);
  EXPECT_DOUBLE_EQ(q.clearing.quantity, 0.0);
  EXPECT_DOUBLE_EQ(q.welfare, 0.0);
}

TEST(Clearing, ShortSupplyFailsOnAllPaths) {
  const std::vector<CapacityBid> bids{{"a", 10, 20}, {"b", 20, 20}};
  const auto curve = golden_curve();
  const auto g = clear_greedy(bids, curve);
  const auto q = clear_qc(bids, curve);
  EXPECT_FALSE(g.cleared);
  EXPECT_FALSE(q.cleared);
  EXPECT_FALSE(clear_mip(bids, curve).cleared);
  EXPECT_EQ(g.status, ClearingStatus::DemandSetPrice);
  EXPECT_DOUBLE_EQ(g.quantity, 40.0);
  EXPECT_DOUBLE_EQ(g.price, 220.0);
  expect_same(g, q);
}

// Demand crosses the vertical step between offers at 100 and 300.
TEST(Clearing, VerticalCrossing) {
  const std::vector<CapacityBid> bids{{"a", 100, 50}, {"b", 300, 50}};
  const auto curve = golden_curve();
  const auto g = clear_greedy(bids, curve);
  const auto q = clear_qc(bids, curve);
  EXPECT_EQ(g.status, ClearingStatus::DemandSetPrice);
  EXPECT_DOUBLE_EQ(g.price, 210.0);
  EXPECT_DOUBLE_EQ(g.quantity, 50.0);
  expect_same(g, q);
  EXPECT_FALSE(clear_mip(bids, curve).cleared);
}

TEST(Clearing, TiesResolvedById) {
  const std::vector<CapacityBid> bids{{"b", 100, 50}, {"a", 100, 50}, {"c", 50, 120}};
  const auto curve = golden_curve();  // 160 MW demanded at 100
  const auto g = clear_greedy(bids, curve);
  ASSERT_TRUE(g.cleared);
  EXPECT_EQ(g.marginal, std::optional<std::size_t>(1));  // "a" fills before "b"
  EXPECT_DOUBLE_EQ(g.sold[1], 40.0);
  EXPECT_DOUBLE_EQ(g.sold[0], 0.0);
  expect_same(g, clear_qc(bids, curve));
  expect_same(g, clear_mip(bids, curve));
}

TEST(Clearing, RejectsBadBids) {
  EXPECT_THROW(clear_greedy({}, golden_curve()), ValidationError);
  EXPECT_THROW(clear_qc({{"a", -1, 10}}, golden_curve()), ValidationError);
  EXPECT_THROW(clear_mip({{"a", 1, -10}}, golden_curve()), ValidationError);
}

TEST(Clearing, RandomThreeWayEquivalence) {
  std::mt19937_64 rng(7);
  int cleared = 0;
  for (int t = 0; t < 200; ++t) {
    const auto inst = fixtures::random_auction(rng, 3, 50);
    const auto g = clear_greedy(inst.bids, inst.curve);
    const auto q = clear_qc(inst.bids, inst.curve);
    const auto m = clear_mip(inst.bids, inst.curve);
    EXPECT_EQ(g.cleared, m.cleared);
    expect_same(g, q);
    if (m.cleared) {
      expect_same(g, m);
      ++cleared;
    }
  }
  EXPECT_GT(cleared, 150);
}

TEST(Analytics, QcCertificateAndIdentities) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto inst = fixtures::random_auction(rng, 3, 30);
    const auto sol = solve_qc(inst.bids, inst.curve);
    EXPECT_LE(sol.certificate.max(), 1e-9);
    const auto& res = sol.clearing;
    if (!res.cleared) continue;
    const double w = social_welfare(res, inst.bids, inst.curve);
    const double split = producer_surplus(res, inst.bids) + consumer_surplus(res, inst.curve);
    EXPECT_NEAR(w, split, 1e-9 * std::max(1.0, std::abs(w)));
    const auto e = excess_capacity_ratio(res, inst.bids, inst.curve);
    EXPECT_LE(e.residual, 1e-9);
    EXPECT_GE(e.ratio, -1e-12);
  }
}

TEST(Analytics, ExcessRatioEndpoints) {
  const DemandCurve c = DemandCurve::from_line(0.5, 900.0);
  const std::vector<CapacityBid> free_bid{{"hydro", 0.0, 1e6}};
  const auto res = clear_greedy(free_bid, c);
  ASSERT_TRUE(res.cleared);
  EXPECT_NEAR(excess_capacity_ratio(res, free_bid, c).ratio, c.f_excess, 1e-12);
}

TEST(Analytics, ConsumerSurplusFallsWithPrice) {
  const auto curve = golden_curve();
  double prev = 1e300;
  for (double w : {0.0, 50.0, 100.0, 200.0, 259.0, 260.0}) {
    const std::vector<CapacityBid> bids{{"a", w, 1000}};
    const auto res = clear_greedy(bids, curve);
    const double cs = consumer_surplus(res, curve);
    EXPECT_LT(cs, prev);
    prev = cs;
  }
  EXPECT_DOUBLE_EQ(prev, 0.0);
}

TEST(Analytics, FullOffersMaximizeWelfare) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto inst = fixtures::random_auction(rng, 3, 20);
    const double full = solve_qc(inst.bids, inst.curve).welfare;
    for (int k = 0; k < 100; ++k) {
      auto reduced = inst.bids;
      for (auto& b : reduced) b.offer_qty *= frac(rng);
      EXPECT_GE(full, solve_qc(reduced, inst.curve).welfare - 1e-9 * std::abs(full));
    }
  }
}

TEST(Analytics, ProfitClosedFormsAndSigns) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto inst = fixtures::random_auction(rng, 3, 40);
    const auto res = clear_greedy(inst.bids, inst.curve);
    if (!res.cleared) continue;
    const auto closed = supplier_profit(res, inst.bids);
    const auto sim = simulated_profit(res, inst.bids);
    for (std::size_t i = 0; i < closed.size(); ++i) {
      EXPECT_NEAR(closed[i], sim[i], 1e-6 * std::max(1.0, std::abs(sim[i])));
      const bool in_set = std::find(res.allocated.begin(), res.allocated.end(), i) != res.allocated.end();
      if (res.marginal == i) {
        EXPECT_LE(closed[i], 1e-6);
      } else if (in_set) {
        EXPECT_GT(closed[i], 0.0);
      } else if (inst.bids[i].offer_price > 0) {
        EXPECT_LT(closed[i], 0.0);
      }
    }
  }
}

// Peaker marginal and the requirement equal to total qualified capacity:
// the peaker exactly recovers its net CONE.
TEST(Analytics, MarginalPeakerBreaksEven) {
  const std::vector<double> caps{400.0, 350.0, 250.0};
  const double q_cap = 1000.0, cone = 500.0;
  const double gamma = 0.2070, ftf = 0.0856;
  const auto curve = build_demand_curve(cone, q_cap / ((1 - ftf) * (1 + gamma)), gamma, ftf, 0.18, cone);
  const std::vector<CapacityBid> bids{{"ng", 100, caps[0]}, {"coal", 200, caps[1]}, {"rfo", cone, caps[2]}};
  const auto res = clear_greedy(bids, curve);
  ASSERT_TRUE(res.cleared);
  EXPECT_EQ(res.marginal, std::optional<std::size_t>(2));
  const auto profit = supplier_profit(res, bids);
  EXPECT_LE(std::abs(profit[2]), 1e-6);
  EXPECT_LE(std::abs(simulated_profit(res, bids)[2]), 1e-6);
}

TEST(Analytics, UnclearedAnalyticsThrow) {
  const std::vector<CapacityBid> bids{{"a", 300, 10}};
  const auto res = clear_greedy(bids, golden_curve());
  EXPECT_THROW(social_welfare(res, bids, golden_curve()), ComputationError);
  EXPECT_THROW(excess_capacity_ratio(res, bids, golden_curve()), ComputationError);
  EXPECT_THROW(supplier_profit(res, bids), ComputationError);
}
