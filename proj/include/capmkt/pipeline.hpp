#pragma once

// Scenario-level drivers shared by the command-line tool and the test suites.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "capmkt/auction.hpp"
#include "capmkt/energy.hpp"
#include "capmkt/io.hpp"
#include "capmkt/strategic.hpp"

namespace capmkt {

inline constexpr double kHighCongestion = 2.0 / 3.0;  // line limits cut by a third

/// lo, lo+step, ..., hi (inclusive when hi is on the grid up to round-off).
inline std::vector<double> scale_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(lo > 0.0) || hi < lo) throw ValidationError("bad scale range");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(std::round((lo + k * step) * 1e9) / 1e9);
  return out;
}

inline LpOptions lp_options(const ScenarioConfig& c) {
  LpOptions o;
  o.feasibility_tol = c.feasibility_tol;
  o.optimality_tol = c.optimality_tol;
  return o;
}

inline JointOptions joint_options(const ScenarioConfig& c) {
  JointOptions o;
  o.grid_points = c.grid_points;
  o.allow_price_bid = c.allow_price_bid;
  o.voll = c.voll;
  o.lp = lp_options(c);
  return o;
}

/// Net CONEs of the scenario as loaded (no scaling).
inline NetConeTable scenario_net_cones(const Scenario& sc) {
  return compute_net_cone(sc.network, sc.series, sc.config.voll, sc.config.days_in_horizon);
}

/// Truthful capacity side at a demand scale, net CONEs held at their base values.
inline CapacitySide scenario_capacity_side(const Scenario& sc, const NetConeTable& cones, double demand_scale = 1.0) {
  const auto& c = sc.config;
  return capacity_side(sc.network, cones, sc.series.scaled_loads(demand_scale).peak_system_load(), c.reserve_margin,
                       c.translation_factor, c.f_excess, c.full_output_hours);
}

struct SweepOptions {
  std::vector<std::string> leaders;
  std::vector<double> demand_scales;
  std::vector<double> congestion_scales{1.0, kHighCongestion};
};

using SweepProgress = std::function<void(const SettingsRow&)>;

inline std::vector<SettingsRow> sweep_settings(const Scenario& sc, const SweepOptions& opt,
                                               const SweepProgress& progress = {}) {
  const NetConeTable cones = scenario_net_cones(sc);
  const JointOptions jo = joint_options(sc.config);
  std::vector<SettingsRow> rows;
  for (const std::string& leader : opt.leaders)
    for (double cong : opt.congestion_scales)
      for (double d : opt.demand_scales) {
        rows.push_back(compare_settings(leader, sc.network, sc.series, cones, d, cong, jo, sc.config.reserve_margin,
                                        sc.config.translation_factor, sc.config.f_excess));
        if (progress) progress(rows.back());
      }
  return rows;
}

/// lmp, dispatch, flows and energy_profit tables of a dispatch run.
inline void add_dispatch_tables(RunReport& rep, const SystemNetwork& net, const EnergyMarketResult& em) {
  auto& lmp = rep.table("lmp", {"hour", "zone", "lmp", "unmet_mw"});
  auto& disp = rep.table("dispatch", {"hour", "generator", "production_mw", "capacity_mw", "alpha"});
  auto& flows = rep.table("flows", {"hour", "from", "to", "flow_mw", "zeta", "eta"});
  for (const auto& hd : em.hours) {
    for (std::size_t b = 0; b < net.buses.size(); ++b) lmp.add({hd.hour, net.buses[b], hd.lmp[b], hd.unmet[b]});
    for (std::size_t g = 0; g < net.generators.size(); ++g)
      disp.add({hd.hour, net.generators[g].id, hd.production[g], hd.capacity[g], hd.alpha[g]});
    for (std::size_t l = 0; l < net.lines.size(); ++l)
      flows.add({hd.hour, net.lines[l].from, net.lines[l].to, hd.flows[l], hd.zeta[l], hd.eta[l]});
  }
  auto& prof = rep.table("energy_profit", {"generator", "profit"});
  for (std::size_t g = 0; g < net.generators.size(); ++g) prof.add({net.generators[g].id, em.profit[g]});
}

inline bool nonzero_difference(double v, double tol = 1e-6) { return std::abs(v) > tol; }

// ---------------------------------------------------------------------------
// invariant suite run by `validate`

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

inline std::vector<CheckResult> validate_scenario(const Scenario& sc) {
  std::vector<CheckResult> out;
  const auto& net = sc.network;
  const auto& ts = sc.series;
  const double voll = sc.config.voll;
  const LpOptions lpo = lp_options(sc.config);
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  const auto em = dispatch(net, ts, truthful_offers(net), voll, lpo);
  double kkt = 0.0;
  for (const auto& hd : em.hours) kkt = std::max(kkt, hd.kkt.max());
  add("energy_kkt", kkt <= 1e-6, "max residual " + format_double(kkt));

  const NetConeTable cones = net_cone_from_dispatch(net, em, sc.config.days_in_horizon.value_or(ts.horizon() / 24.0));
  const CapacitySide side = scenario_capacity_side(sc, cones, sc.config.demand_scale);
  std::vector<double> sold(net.generators.size(), 0.0);
  {
    const auto cmp = compare_clearing_paths(side.bids, side.curve);
    const auto& g = cmp.greedy;
    add("clearing_paths_agree", cmp.agree, "max gap " + format_double(cmp.gap) + ", status " + to_string(g.status));
    if (g.cleared) {
      const auto ex = excess_capacity_ratio(g, side.bids, side.curve);
      add("excess_capacity_identity", std::abs(ex.residual) <= 1e-9 && ex.ratio >= -1e-12,
          "ratio " + format_double(ex.ratio) + ", closed form " + format_double(ex.closed_form));
      const auto closed = supplier_profit(g, side.bids);
      const auto sim = simulated_profit(g, side.bids);
      double worst = 0.0;
      for (std::size_t i = 0; i < closed.size(); ++i)
        worst = std::max(worst, std::abs(closed[i] - sim[i]) / std::max(1.0, std::abs(sim[i])));
      add("capacity_profit_closed_form", worst <= 1e-6, "max relative gap " + format_double(worst));
    }
    for (std::size_t i = 0; i < sold.size(); ++i) sold[i] = g.sold[i];
  }

  // q_bar / v split: same total offer, same dispatch cost
  const auto split = dispatch(net, ts, truthful_offers(net, sold), voll, lpo);
  const double dcost = std::abs(split.total_cost - em.total_cost);
  add("capacity_split_invariance", dcost <= 1e-6 * std::max(1.0, em.total_cost), "cost gap " + format_double(dcost));

  const auto viol = equilibrium_violations(net, em);
  add("competitive_equilibrium", viol.empty(), std::to_string(viol.size()) + " unit-hours off their bound");

  int bad = 0, uncongested = 0;
  for (const auto& u : uniform_lmp_check(net, em)) {
    if (!u.congested) ++uncongested;
    if (!u.ok) ++bad;
  }
  add("uncongested_uniform_price", bad == 0,
      std::to_string(uncongested) + " uncongested hours, " + std::to_string(bad) + " with a price spread");

  int zero_cone = 0, wind_zero = 0, wind = 0;
  bool cone_ok = true;
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    if (gen.dispatchable && !cones.reached_capacity[g]) {
      ++zero_cone;
      if (cones.net_cone[g] != gen.invest_cost) cone_ok = false;
    }
    if (!gen.dispatchable) {
      ++wind;
      if (cones.net_cone[g] == 0.0) ++wind_zero;
    }
  }
  add("net_cone_pattern", cone_ok && zero_cone > 0,
      std::to_string(zero_cone) + " thermal units never at capacity keep W = invest; " + std::to_string(wind_zero) +
          "/" + std::to_string(wind) + " renewables at W = 0");
  return out;
}

}  // namespace capmkt
