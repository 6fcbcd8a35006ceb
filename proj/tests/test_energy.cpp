#include <gtest/gtest.h>

#include "capmkt/energy.hpp"

using namespace capmkt;

namespace {

Generator thermal(std::string id, std::string zone, double p_max, double cv, double inv = 100.0) {
  Generator g;
  g.id = std::move(id);
  g.zone = std::move(zone);
  g.fuel = "ng";
  g.p_max = p_max;
  g.var_cost = cv;
  g.invest_cost = inv;
  return g;
}

Generator wind(std::string id, std::string zone, double p_max, double inv = 10.0) {
  Generator g = thermal(std::move(id), std::move(zone), p_max, 0.0, inv);
  g.fuel = "wind";
  g.dispatchable = false;
  g.unforced_pct = 0.24;
  return g;
}

struct Case {
  SystemNetwork net;
  TimeSeries ts;
};

// One bus, one 621 MW unit at 21.1 $/MWh.
Case single_bus(std::vector<double> loads) {
  Case c;
  c.net.buses = {"A"};
  c.net.generators = {thermal("ng", "A", 621.0, 21.1)};
  for (std::size_t k = 0; k < loads.size(); ++k) c.ts.hours.push_back(static_cast<int>(k));
  c.ts.loads = {loads};
  c.ts.capacity_factors = {{}};
  return c;
}

// Two buses: cheap unit at A, expensive unit at B, load at B.
Case two_bus(double limit, double load_b) {
  Case c;
  c.net.buses = {"A", "B"};
  c.net.lines = {{"A", "B", 50.0, -limit, limit}};
  c.net.generators = {thermal("cheap", "A", 500.0, 10.0), thermal("dear", "B", 500.0, 40.0)};
  c.ts.hours = {0};
  c.ts.loads = {{0.0}, {load_b}};
  c.ts.capacity_factors = {{}, {}};
  return c;
}

}  // namespace

TEST(EnergyMarket, SingleBusBelowCapacity) {
  auto c = single_bus({400.0});
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto& h = res.hours[0];
  EXPECT_NEAR(h.production[0], 400.0, 1e-9);
  EXPECT_NEAR(h.unmet[0], 0.0, 1e-9);
  EXPECT_NEAR(h.lmp[0], 21.1, 1e-9);
  EXPECT_NEAR(res.total_cost, 400.0 * 21.1, 1e-6);
  EXPECT_DOUBLE_EQ(res.profit[0], 0.0);
  EXPECT_TRUE(h.kkt.passes(1e-6));
}

TEST(EnergyMarket, SingleBusShedsLoad) {
  auto c = single_bus({700.0});
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto& h = res.hours[0];
  EXPECT_NEAR(h.production[0], 621.0, 1e-9);
  EXPECT_NEAR(h.unmet[0], 79.0, 1e-9);
  EXPECT_NEAR(h.lmp[0], 1000.0, 1e-9);
  EXPECT_NEAR(h.alpha[0], 1000.0 - 21.1, 1e-9);
  EXPECT_NEAR(res.profit[0], (1000.0 - 21.1) * 621.0, 1e-6);
  EXPECT_NEAR(res.shed_energy[0], 79.0, 1e-9);
  EXPECT_TRUE(h.kkt.passes(1e-6));
}

TEST(EnergyMarket, ZeroLoad) {
  auto c = single_bus({0.0, 0.0});
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  EXPECT_DOUBLE_EQ(res.total_cost, 0.0);
  for (const auto& h : res.hours) EXPECT_DOUBLE_EQ(h.production[0], 0.0);
}

TEST(EnergyMarket, UncongestedLineGivesUniformPrice) {
  auto c = two_bus(1000.0, 300.0);
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto& h = res.hours[0];
  EXPECT_NEAR(h.lmp[0], 10.0, 1e-9);
  EXPECT_NEAR(h.lmp[1], 10.0, 1e-9);
  EXPECT_NEAR(h.flows[0], 300.0, 1e-9);
  const auto u = uniform_lmp_check(c.net, res);
  EXPECT_FALSE(u[0].congested);
  EXPECT_TRUE(u[0].ok);
}

TEST(EnergyMarket, CongestedLineSeparatesPrices) {
  auto c = two_bus(200.0, 300.0);
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto& h = res.hours[0];
  EXPECT_NEAR(h.flows[0], 200.0, 1e-9);
  EXPECT_NEAR(h.lmp[0], 10.0, 1e-9);
  EXPECT_NEAR(h.lmp[1], 40.0, 1e-9);
  EXPECT_NEAR(h.zeta[0], 30.0, 1e-9);  // value of one more MW of transfer
  const auto u = uniform_lmp_check(c.net, res);
  EXPECT_TRUE(u[0].congested);
  EXPECT_TRUE(h.kkt.passes(1e-6));
}

TEST(EnergyMarket, PricesIgnoreReferenceBus) {
  auto c = two_bus(200.0, 300.0);
  auto flipped = c;
  flipped.net.buses = {"Z", "B"};
  flipped.net.lines[0].from = "Z";
  flipped.net.generators[0].zone = "Z";
  // reference is now B (sorted first) instead of A
  const auto a = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto b = dispatch(flipped.net, flipped.ts, truthful_offers(flipped.net));
  EXPECT_NEAR(a.hours[0].lmp[0], b.hours[0].lmp[0], 1e-9);
  EXPECT_NEAR(a.hours[0].lmp[1], b.hours[0].lmp[1], 1e-9);
  EXPECT_NEAR(a.total_cost, b.total_cost, 1e-9);
}

TEST(EnergyMarket, CapacitySplitDoesNotMatter) {
  auto c = two_bus(200.0, 450.0);
  const auto a = dispatch(c.net, c.ts, truthful_offers(c.net));
  const auto b = dispatch(c.net, c.ts, truthful_offers(c.net, {320.0, 75.0}));
  EXPECT_NEAR(a.total_cost, b.total_cost, 1e-6);
  EXPECT_EQ(a.hours[0].lmp, b.hours[0].lmp);
}

TEST(EnergyMarket, RenewableOutputFollowsCapacityFactor) {
  Case c = single_bus({50.0, 10.0});
  c.net.generators.push_back(wind("w", "A", 100.0));
  c.ts.capacity_factors.push_back({0.3, 0.5});
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  EXPECT_NEAR(res.hours[0].production[1], 30.0, 1e-9);
  EXPECT_NEAR(res.hours[0].production[0], 20.0, 1e-9);
  EXPECT_NEAR(res.hours[0].rho[1], 21.1, 1e-9);
  // hour 1: 50 MW of wind against 10 MW of load, wind is curtailed and sets a zero price
  EXPECT_NEAR(res.hours[1].production[1], 10.0, 1e-9);
  EXPECT_NEAR(res.hours[1].production[0], 0.0, 1e-9);
  EXPECT_NEAR(res.hours[1].lmp[0], 0.0, 1e-9);
  EXPECT_TRUE(res.hours[1].kkt.passes(1e-6));
}

TEST(EnergyMarket, MissingCapacityFactorRejected) {
  Case c = single_bus({50.0});
  c.net.generators.push_back(wind("w", "A", 100.0));
  c.ts.capacity_factors.push_back({});
  EXPECT_THROW(build_hourly_lp(c.net, c.ts, truthful_offers(c.net), 0), ValidationError);
}

TEST(EnergyMarket, ProfitClosedForms) {
  Case c = single_bus({300.0, 640.0, 100.0});
  c.net.generators.push_back(thermal("peak", "A", 200.0, 60.0));
  c.net.generators.push_back(wind("w", "A", 100.0));
  c.ts.capacity_factors = {{}, {}, {0.2, 0.1, 0.4}};
  const auto res = dispatch(c.net, c.ts, truthful_offers(c.net));
  for (std::size_t g = 0; g < 3; ++g) {
    const double sim = generator_energy_profit(c.net, res, g);
    EXPECT_NEAR(sim, closed_form_energy_profit(c.net, c.ts, res, g), 1e-6 * std::max(1.0, std::abs(sim)));
    EXPECT_NEAR(sim, res.profit[g], 1e-6 * std::max(1.0, std::abs(sim)));
  }
  EXPECT_TRUE(equilibrium_violations(c.net, res).empty());
  // hour 1: 640 = 621 ng + 10 wind + 9 peak, price 60
  EXPECT_NEAR(res.hours[1].lmp[0], 60.0, 1e-9);
  EXPECT_NEAR(res.profit[0], (60.0 - 21.1) * 621.0, 1e-6);
}

TEST(NetCone, NeverFullUnitKeepsInvestCost) {
  Case c = single_bus({300.0, 640.0});
  c.net.generators.push_back(thermal("peak", "A", 200.0, 60.0, 900.0));
  c.net.generators.push_back(wind("w", "A", 100.0, 5.0));
  c.ts.capacity_factors = {{}, {}, {0.2, 0.1}};
  const auto t = compute_net_cone(c.net, c.ts, 1000.0, 1.0);
  EXPECT_FALSE(t.reached_capacity[1]);
  EXPECT_EQ(t.net_cone[1], 900.0);
  EXPECT_EQ(t.peaker, 1u);
  EXPECT_EQ(t.c_cone, 900.0);
  // wind earns 21.1*20 + 60*10 = 1022 $ over one day on 100 MW: 10.22 $/MW-day > 5
  EXPECT_EQ(t.net_cone[2], 0.0);
  EXPECT_NEAR(t.energy_profit[2], 1022.0, 1e-6);
  EXPECT_THROW(compute_net_cone(c.net, c.ts, 1000.0, 0.0), ValidationError);
}
