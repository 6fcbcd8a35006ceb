#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "capmkt/error.hpp"
#include "capmkt/lp.hpp"
#include "capmkt/model.hpp"

namespace capmkt {

inline constexpr double kDefaultVoll = 1000.0;

/// Capacity a generator makes available to the energy market: q_bar from the
/// capacity auction plus extra capacity v, offered at bid_price ($/MWh).
struct EnergyOffer {
  std::string generator_id;
  double capacity_from_cm = 0.0;
  double extra_capacity = 0.0;
  double bid_price = 0.0;

  double offered() const { return capacity_from_cm + extra_capacity; }
};

/// Truthful offers: the whole nameplate at variable cost. `cm_sold` splits
/// it into q_bar (capacity-market sale) and v = P^max - q_bar.
inline std::vector<EnergyOffer> truthful_offers(const SystemNetwork& net, const std::vector<double>& cm_sold = {}) {
  std::vector<EnergyOffer> offers;
  offers.reserve(net.generators.size());
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    const double qbar = cm_sold.empty() ? 0.0 : std::min(cm_sold[g], gen.p_max);
    offers.push_back({gen.id, qbar, gen.p_max - qbar, gen.var_cost});
  }
  return offers;
}

inline void validate_offers(const SystemNetwork& net, const std::vector<EnergyOffer>& offers, double voll) {
  if (offers.size() != net.generators.size())
    throw ValidationError("energy offers do not cover every generator");
  for (std::size_t g = 0; g < offers.size(); ++g) {
    const EnergyOffer& o = offers[g];
    const Generator& gen = net.generators[g];
    if (o.generator_id != gen.id)
      throw ValidationError("energy offer " + std::to_string(g) + " is for '" + o.generator_id + "', expected '" +
                            gen.id + "'");
    if (o.capacity_from_cm < 0 || o.extra_capacity < 0)
      throw ValidationError("energy offer of '" + gen.id + "' has negative capacity");
    if (o.offered() > gen.p_max * (1 + 1e-12))
      throw ValidationError("energy offer of '" + gen.id + "' exceeds p_max");
    if (!(o.bid_price >= 0.0) || o.bid_price > voll - 1.0 + 1e-12)
      throw ValidationError("energy offer of '" + gen.id + "' has bid price outside [0, VOLL - 1]");
  }
}

/// Column/row positions of one hourly DCOPF instance.
struct HourlyLayout {
  std::vector<int> p, unmet, flow, theta;
  std::vector<int> balance_row, ohm_row;
};

struct HourlyLp {
  LinearProgram lp;
  HourlyLayout at;
};

// Production and flow limits are column bounds, so their multipliers
// (alpha, zeta, eta) come from reduced costs. Renewable output is F^CF x
// (q_bar + v) with v free up to the offered extra capacity, i.e. a column
// between F^CF q_bar and F^CF x offered; surplus wind is curtailed at a zero
// price. Rows: nodal balance per bus (dual = LMP) and Ohm's law per line.
inline HourlyLp build_hourly_lp(const SystemNetwork& net, const TimeSeries& ts, const std::vector<EnergyOffer>& offers,
                                std::size_t k, double voll = kDefaultVoll) {
  if (k >= ts.horizon()) throw ValidationError("hour index out of range");
  HourlyLp out;
  LinearProgram& lp = out.lp;
  HourlyLayout& at = out.at;
  const std::string h = std::to_string(ts.hours[k]);
  const std::size_t ref = net.reference_bus();

  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    const double cap = offers[g].offered();
    if (gen.dispatchable) {
      at.p.push_back(lp.add_variable("p_" + gen.id + "_" + h, offers[g].bid_price, 0.0, cap));
    } else {
      if (g >= ts.capacity_factors.size() || ts.capacity_factors[g].size() <= k)
        throw ValidationError("missing capacity factor for renewable '" + gen.id + "'");
      const double cf = ts.capacity_factors[g][k];
      at.p.push_back(lp.add_variable("p_" + gen.id + "_" + h, 0.0, cf * offers[g].capacity_from_cm, cf * cap));
    }
  }
  for (const std::string& b : net.buses) at.unmet.push_back(lp.add_variable("unmet_" + b + "_" + h, voll, 0.0, kInf));
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const Line& ln = net.lines[l];
    at.flow.push_back(lp.add_variable("f_" + std::to_string(l) + "_" + ln.from + "_" + ln.to + "_" + h, 0.0,
                                      ln.f_min, ln.f_max));
  }
  for (std::size_t b = 0; b < net.buses.size(); ++b) {
    const bool pinned = b == ref;
    at.theta.push_back(lp.add_variable("theta_" + net.buses[b] + "_" + h, 0.0, pinned ? 0.0 : -kInf,
                                       pinned ? 0.0 : kInf));
  }

  std::vector<std::vector<LpTerm>> bal(net.buses.size());
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    bal[net.bus_index(net.generators[g].zone)].push_back({at.p[g], 1.0});
  for (std::size_t b = 0; b < net.buses.size(); ++b) bal[b].push_back({at.unmet[b], 1.0});
  std::vector<std::size_t> from(net.lines.size()), to(net.lines.size());
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    from[l] = net.bus_index(net.lines[l].from);
    to[l] = net.bus_index(net.lines[l].to);
    bal[from[l]].push_back({at.flow[l], -1.0});
    bal[to[l]].push_back({at.flow[l], 1.0});
  }
  for (std::size_t b = 0; b < net.buses.size(); ++b)
    at.balance_row.push_back(
        lp.add_row("balance_" + net.buses[b] + "_" + h, std::move(bal[b]), RowSense::Eq, ts.loads[b][k]));
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    const double B = net.lines[l].susceptance;
    at.ohm_row.push_back(lp.add_row("ohm_" + std::to_string(l) + "_" + h,
                                    {{at.flow[l], 1.0}, {at.theta[from[l]], -B}, {at.theta[to[l]], B}},
                                    RowSense::Eq, 0.0));
  }
  return out;
}

/// Residuals of the market-specific optimality conditions for one hour.
struct EnergyKkt {
  KktReport lp;
  double price_below_cost = 0.0;  // (lambda - alpha - C) <= 0 for thermal units
  double price_cap = 0.0;         // lambda <= VOLL
  double production_slack = 0.0;  // (lambda - alpha - C) p = 0
  double shed_slack = 0.0;        // (lambda - VOLL) unmet = 0
  double capacity_slack = 0.0;    // (p - cap) alpha = 0

  double max() const {
    return std::max({lp.max(), price_below_cost, price_cap, production_slack, shed_slack, capacity_slack});
  }
  bool passes(double tol) const { return max() <= tol; }
};

struct HourlyDispatch {
  int hour = 0;
  std::vector<double> production;  // per generator
  std::vector<double> capacity;    // offered capacity per generator
  std::vector<double> unmet;       // per bus
  std::vector<double> flows;       // per line
  std::vector<double> angles;      // per bus
  std::vector<double> lmp;         // per bus
  std::vector<double> alpha;       // capacity multiplier, thermal units
  std::vector<double> rho;         // renewable output multiplier
  std::vector<double> zeta;        // upper flow limit multiplier
  std::vector<double> eta;         // lower flow limit multiplier
  double cost = 0.0;               // at true variable costs
  int iterations = 0;
  EnergyKkt kkt;
};

struct EnergyMarketResult {
  std::vector<HourlyDispatch> hours;
  double total_cost = 0.0;
  std::vector<double> profit;        // per generator over the horizon
  std::vector<double> shed_energy;   // per bus, MWh
};

inline double binding_tol(double limit) { return 1e-6 * std::max(1.0, std::abs(limit)); }

inline EnergyKkt energy_kkt(const SystemNetwork& net, const HourlyLp& inst, const LpSolution& sol,
                            const HourlyDispatch& hd, const std::vector<EnergyOffer>& offers, double voll) {
  EnergyKkt k;
  k.lp = check_kkt(inst.lp, sol);
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    if (!net.generators[g].dispatchable) continue;
    const std::size_t b = net.bus_index(net.generators[g].zone);
    const double gap = hd.lmp[b] - hd.alpha[g] - offers[g].bid_price;
    k.price_below_cost = std::max(k.price_below_cost, gap);
    k.production_slack = std::max(k.production_slack, std::abs(gap * hd.production[g]));
    k.capacity_slack = std::max(k.capacity_slack, std::abs((hd.production[g] - hd.capacity[g]) * hd.alpha[g]));
  }
  for (std::size_t b = 0; b < net.buses.size(); ++b) {
    k.price_cap = std::max(k.price_cap, hd.lmp[b] - voll);
    k.shed_slack = std::max(k.shed_slack, std::abs((hd.lmp[b] - voll) * hd.unmet[b]));
  }
  return k;
}

inline HourlyDispatch dispatch_hour(const SystemNetwork& net, const TimeSeries& ts,
                                    const std::vector<EnergyOffer>& offers, std::size_t k, double voll,
                                    const LpOptions& opt = {}) {
  const HourlyLp inst = build_hourly_lp(net, ts, offers, k, voll);
  const LpSolution sol = solve(inst.lp, opt);
  if (!sol.optimal())
    throw ComputationError("energy market LP for hour " + std::to_string(ts.hours[k]) + " ended " +
                           to_string(sol.status) + (sol.message.empty() ? "" : ": " + sol.message));
  HourlyDispatch hd;
  hd.hour = ts.hours[k];
  const std::size_t G = net.generators.size(), N = net.buses.size(), L = net.lines.size();
  hd.production.resize(G);
  hd.capacity.resize(G);
  hd.alpha.assign(G, 0.0);
  hd.rho.assign(G, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    const auto j = static_cast<std::size_t>(inst.at.p[g]);
    hd.production[g] = sol.x[j];
    hd.capacity[g] = offers[g].offered();
    const double d = sol.reduced_costs[j];
    if (net.generators[g].dispatchable)
      hd.alpha[g] = std::max(0.0, -d);
    else
      hd.rho[g] = -d;
    hd.cost += net.generators[g].var_cost * hd.production[g];
  }
  hd.unmet.resize(N);
  hd.angles.resize(N);
  hd.lmp.resize(N);
  for (std::size_t b = 0; b < N; ++b) {
    hd.unmet[b] = sol.x[static_cast<std::size_t>(inst.at.unmet[b])];
    hd.angles[b] = sol.x[static_cast<std::size_t>(inst.at.theta[b])];
    hd.lmp[b] = sol.duals[static_cast<std::size_t>(inst.at.balance_row[b])];
    hd.cost += voll * hd.unmet[b];
  }
  hd.flows.resize(L);
  hd.zeta.assign(L, 0.0);
  hd.eta.assign(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const auto j = static_cast<std::size_t>(inst.at.flow[l]);
    hd.flows[l] = sol.x[j];
    hd.zeta[l] = std::max(0.0, -sol.reduced_costs[j]);
    hd.eta[l] = std::max(0.0, sol.reduced_costs[j]);
  }
  hd.iterations = sol.iterations;
  hd.kkt = energy_kkt(net, inst, sol, hd, offers, voll);
  return hd;
}

// Hourly profit of unit g at true variable cost. Units strictly inside
// their capacity range earn nothing: complementarity pins the price at the
// marginal cost, so the product is zero up to round-off and is taken as 0.
inline double hourly_profit(const SystemNetwork& net, const HourlyDispatch& hd, std::size_t g) {
  const Generator& gen = net.generators[g];
  const double lambda = hd.lmp[net.bus_index(gen.zone)];
  const double p = hd.production[g];
  if (!gen.dispatchable) return lambda * p;
  const double cap = hd.capacity[g];
  const double tol = 1e-9 * std::max(1.0, cap);
  if (p <= tol) return 0.0;
  if (p >= cap - tol) return (lambda - gen.var_cost) * p;
  return 0.0;
}

/// Solves every hour. Hours are independent (no intertemporal coupling).
inline EnergyMarketResult dispatch(const SystemNetwork& net, const TimeSeries& ts,
                                   const std::vector<EnergyOffer>& offers, double voll = kDefaultVoll,
                                   const LpOptions& opt = {}) {
  validate_offers(net, offers, voll);
  EnergyMarketResult res;
  res.profit.assign(net.generators.size(), 0.0);
  res.shed_energy.assign(net.buses.size(), 0.0);
  res.hours.reserve(ts.horizon());
  for (std::size_t k = 0; k < ts.horizon(); ++k) {
    res.hours.push_back(dispatch_hour(net, ts, offers, k, voll, opt));
    const HourlyDispatch& hd = res.hours.back();
    res.total_cost += hd.cost;
    for (std::size_t g = 0; g < net.generators.size(); ++g) res.profit[g] += hourly_profit(net, hd, g);
    for (std::size_t b = 0; b < net.buses.size(); ++b) res.shed_energy[b] += hd.unmet[b];
  }
  return res;
}

/// Horizon profit read straight off the dispatch: sum (lambda - C^V) p.
inline double generator_energy_profit(const SystemNetwork& net, const EnergyMarketResult& res, std::size_t g) {
  const Generator& gen = net.generators[g];
  const std::size_t b = net.bus_index(gen.zone);
  double total = 0.0;
  for (const HourlyDispatch& hd : res.hours) total += (hd.lmp[b] - gen.var_cost) * hd.production[g];
  return total;
}

/// Closed form from prices alone: (lambda - C^V)^+ x capacity for thermal
/// units, lambda x F^CF x capacity for renewables.
inline double closed_form_energy_profit(const SystemNetwork& net, const TimeSeries& ts,
                                        const EnergyMarketResult& res, std::size_t g) {
  const Generator& gen = net.generators[g];
  const std::size_t b = net.bus_index(gen.zone);
  double total = 0.0;
  for (std::size_t k = 0; k < res.hours.size(); ++k) {
    const HourlyDispatch& hd = res.hours[k];
    if (gen.dispatchable)
      total += std::max(0.0, hd.lmp[b] - gen.var_cost) * hd.capacity[g];
    else
      total += hd.lmp[b] * ts.capacity_factors[g][k] * hd.capacity[g];
  }
  return total;
}

struct NetConeTable {
  std::vector<double> net_cone;       // $/MW-day
  std::vector<double> energy_profit;  // $ over the horizon
  std::vector<bool> reached_capacity; // at full output in some hour
  std::size_t peaker = 0;
  double c_cone = 0.0;
  double days = 0.0;
};

// Net CONE from a truthful dispatch: (invest - energy profit per MW-day)^+.
inline NetConeTable net_cone_from_dispatch(const SystemNetwork& net, const EnergyMarketResult& res, double days) {
  if (!(days > 0.0)) throw ValidationError("net CONE needs a positive horizon length in days");
  NetConeTable t;
  t.days = days;
  const std::size_t G = net.generators.size();
  t.net_cone.resize(G);
  t.energy_profit = res.profit;
  t.reached_capacity.assign(G, false);
  for (std::size_t g = 0; g < G; ++g) {
    const Generator& gen = net.generators[g];
    for (const HourlyDispatch& hd : res.hours)
      if (hd.production[g] >= hd.capacity[g] - 1e-9 * std::max(1.0, hd.capacity[g]) && hd.capacity[g] > 0)
        t.reached_capacity[g] = true;
    t.net_cone[g] = std::max(0.0, gen.invest_cost - t.energy_profit[g] / (gen.p_max * days));
    if (t.net_cone[g] > t.net_cone[t.peaker]) t.peaker = g;
  }
  t.c_cone = G ? t.net_cone[t.peaker] : 0.0;
  return t;
}

inline NetConeTable compute_net_cone(const SystemNetwork& net, const TimeSeries& ts, double voll = kDefaultVoll,
                                     std::optional<double> days_in_horizon = std::nullopt) {
  if (ts.horizon() == 0) throw ValidationError("net CONE needs a non-empty horizon");
  const double days = days_in_horizon.value_or(static_cast<double>(ts.horizon()) / 24.0);
  return net_cone_from_dispatch(net, dispatch(net, ts, truthful_offers(net), voll), days);
}

struct LmpUniformity {
  int hour = 0;
  bool congested = false;
  double spread = 0.0;
  bool ok = true;  // uncongested hours only
};

inline bool line_binding(const Line& ln, double f) {
  return f >= ln.f_max - binding_tol(ln.f_max) || f <= ln.f_min + binding_tol(ln.f_min);
}

/// Per hour: with no binding line, every bus must see the same price.
inline std::vector<LmpUniformity> uniform_lmp_check(const SystemNetwork& net, const EnergyMarketResult& res,
                                                    double tol = 1e-7) {
  std::vector<LmpUniformity> out;
  for (const HourlyDispatch& hd : res.hours) {
    LmpUniformity u;
    u.hour = hd.hour;
    for (std::size_t l = 0; l < net.lines.size(); ++l)
      if (line_binding(net.lines[l], hd.flows[l])) u.congested = true;
    const auto [lo, hi] = std::minmax_element(hd.lmp.begin(), hd.lmp.end());
    u.spread = *hi - *lo;
    u.ok = u.congested || u.spread <= tol;
    out.push_back(u);
  }
  return out;
}

struct EquilibriumViolation {
  int hour = 0;
  std::size_t generator = 0;
  double lmp = 0.0;
  double production = 0.0;
};

/// Each unit must sit at the profit-maximizing end of [0, capacity] when
/// its price and cost differ by more than `margin`.
inline std::vector<EquilibriumViolation> equilibrium_violations(const SystemNetwork& net,
                                                                const EnergyMarketResult& res,
                                                                double margin = 1e-4, double tol = 1e-6) {
  std::vector<EquilibriumViolation> out;
  for (const HourlyDispatch& hd : res.hours)
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
      const Generator& gen = net.generators[g];
      if (!gen.dispatchable) continue;
      const double lambda = hd.lmp[net.bus_index(gen.zone)];
      const double p = hd.production[g];
      const bool bad = (lambda > gen.var_cost + margin && p < hd.capacity[g] - tol) ||
                       (lambda < gen.var_cost - margin && p > tol);
      if (bad) out.push_back({hd.hour, g, lambda, p});
    }
  return out;
}

}  // namespace capmkt
