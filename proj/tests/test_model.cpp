#include <gtest/gtest.h>

#include "capmkt/model.hpp"

using namespace capmkt;

namespace {

DemandCurve reference_curve() { return build_demand_curve(1246.5, 10000.0, 0.2070, 0.0856, 0.18, 1246.5 + 67.6 * 24); }

Generator gen(std::string id, double p_max, double cv, double inv, double fu = 1.0, bool disp = true) {
  Generator g;
  g.id = std::move(id);
  g.zone = "A";
  g.fuel = "ng";
  g.p_max = p_max;
  g.var_cost = cv;
  g.invest_cost = inv;
  g.unforced_pct = fu;
  g.dispatchable = disp;
  return g;
}

}  // namespace

// q_cap = 0.9144 * 1.207 * 10000, a = 1246.5 / (0.18 q_cap), pi_max = 1246.5 * 1.18 / 0.18
TEST(DemandCurve, ReferenceNumbers) {
  const DemandCurve c = reference_curve();
  EXPECT_NEAR(c.q_cap, 11036.808, 1e-9);
  EXPECT_NEAR(c.q_cap, 11036.8, 0.05);
  EXPECT_NEAR(c.a_slope, 0.627446, 1e-6);
  EXPECT_NEAR(c.pi_max, 8171.5, 1e-9);
}

TEST(DemandCurve, PassesThroughAnchors) {
  for (double fe : {0.05, 0.18, 0.5, 0.9}) {
    const DemandCurve c = build_demand_curve(800.0, 2500.0, 0.15, 0.1, fe, 900.0);
    EXPECT_DOUBLE_EQ(c.q_zero, (1.0 + fe) * c.q_cap);
    EXPECT_LE(std::abs(c.price_at(c.q_cap) - c.c_cone), 1e-9);
    EXPECT_LE(std::abs(c.price_at(c.q_zero)), 1e-9);
    EXPECT_NEAR(c.a_slope, c.c_cone / (fe * c.q_cap), 1e-15);
  }
}

TEST(DemandCurve, CapIsOneAndAHalfLevelizedCost) {
  Generator rfo = gen("rfo", 901.8, 67.6, 1246.5);
  const double lev = peaker_levelized_cost(rfo);
  const DemandCurve c = build_demand_curve(1246.5, 10000.0, 0.2070, 0.0856, 0.18, lev);
  EXPECT_DOUBLE_EQ(c.p1, 1.5 * lev);
}

TEST(DemandCurve, RejectsDegenerateInputs) {
  EXPECT_THROW(build_demand_curve(0.0, 100, 0.2, 0.1, 0.18, 10), ValidationError);
  EXPECT_THROW(build_demand_curve(10, -1, 0.2, 0.1, 0.18, 10), ValidationError);
  EXPECT_THROW(build_demand_curve(10, 100, 1.2, 0.1, 0.18, 10), ValidationError);
  EXPECT_THROW(build_demand_curve(10, 100, 0.2, 0.0, 0.18, 10), ValidationError);
  EXPECT_THROW(build_demand_curve(10, 100, 0.2, 0.1, 0.18, 0), ValidationError);
}

TEST(DemandCurve, FromLineKeepsIdentities) {
  const DemandCurve c = DemandCurve::from_line(1.0, 260.0);
  EXPECT_NEAR(c.price_at(c.q_cap), c.c_cone, 1e-9);
  EXPECT_NEAR(c.price_at(c.q_zero), 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(c.quantity_at(200.0), 60.0);
}

TEST(Generator, QualifiedCapacity) {
  EXPECT_DOUBLE_EQ(qualified_capacity(gen("ng", 621.0, 21.1, 300)), 621.0);
  EXPECT_DOUBLE_EQ(qualified_capacity(gen("x", 100.0, 0, 0)), 100.0);
  EXPECT_NEAR(qualified_capacity(gen("wind", 149.58, 0, 0, 0.24, false)), 35.9, 0.05);
  // monotone in both factors
  EXPECT_LT(qualified_capacity(gen("a", 100, 0, 0, 0.5)), qualified_capacity(gen("a", 120, 0, 0, 0.5)));
  EXPECT_LT(qualified_capacity(gen("a", 100, 0, 0, 0.5)), qualified_capacity(gen("a", 100, 0, 0, 0.6)));
}

TEST(Generator, LevelizedCost) {
  EXPECT_DOUBLE_EQ(peaker_levelized_cost(gen("p", 10, 0.0, 1200)), 1200.0);
  EXPECT_DOUBLE_EQ(peaker_levelized_cost(gen("p", 10, 0.0, 1200), 8.0), 1200.0);
  EXPECT_DOUBLE_EQ(peaker_levelized_cost(gen("p", 10, 10.0, 1000), 24.0), 1240.0);
}

TEST(Generator, Validation) {
  EXPECT_NO_THROW(gen("ok", 10, 1, 1).validate());
  EXPECT_THROW(gen("bad", 0, 1, 1).validate(), ValidationError);
  EXPECT_THROW(gen("bad", 10, -1, 1).validate(), ValidationError);
  EXPECT_THROW(gen("bad", 10, 1, -1).validate(), ValidationError);
  EXPECT_THROW(gen("bad", 10, 1, 1, 1.5).validate(), ValidationError);
  EXPECT_THROW(gen("bad", 10, 1, 1, 0.0).validate(), ValidationError);
  EXPECT_THROW(gen("wind", 10, 5, 1, 0.24, false).validate(), ValidationError);
}

TEST(Network, Validation) {
  SystemNetwork net;
  net.buses = {"A", "B"};
  net.lines = {{"A", "B", 10.0, -50.0, 50.0}};
  net.generators = {gen("g1", 10, 1, 1)};
  EXPECT_NO_THROW(net.validate());
  EXPECT_EQ(net.reference_bus(), 0u);

  auto broken = net;
  broken.lines[0].to = "C";
  EXPECT_THROW(broken.validate(), ValidationError);
  broken = net;
  broken.generators[0].zone = "Z";
  EXPECT_THROW(broken.validate(), ValidationError);
  broken = net;
  broken.generators.push_back(broken.generators[0]);
  EXPECT_THROW(broken.validate(), ValidationError);
  broken = net;
  broken.lines[0].f_min = 60;
  EXPECT_THROW(broken.validate(), ValidationError);

  auto tight = scaled_line_limits(net, 2.0 / 3.0);
  EXPECT_NEAR(tight.lines[0].f_max, 100.0 / 3.0, 1e-12);
  EXPECT_THROW(scaled_line_limits(net, 0.0), ValidationError);
}

TEST(TimeSeries, Validation) {
  SystemNetwork net;
  net.buses = {"A"};
  net.generators = {gen("g1", 10, 1, 1), gen("w", 10, 0, 1, 0.24, false)};
  TimeSeries ts;
  ts.hours = {0, 1};
  ts.loads = {{3.0, 4.0}};
  ts.capacity_factors = {{}, {0.2, 0.3}};
  EXPECT_NO_THROW(ts.validate(net));
  EXPECT_DOUBLE_EQ(ts.peak_system_load(), 4.0);
  EXPECT_DOUBLE_EQ(ts.scaled_loads(0.5).loads[0][1], 2.0);

  auto bad = ts;
  bad.capacity_factors[1].clear();
  EXPECT_THROW(bad.validate(net), ValidationError);
  bad = ts;
  bad.capacity_factors[1][0] = 1.2;
  EXPECT_THROW(bad.validate(net), ValidationError);
  bad = ts;
  bad.loads[0][0] = -1;
  EXPECT_THROW(bad.validate(net), ValidationError);
}
