#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "capmkt/error.hpp"

namespace capmkt {

/// One supplier. Capacity in MW, variable cost in $/MWh, investment cost in
/// $/MW-day. `dispatchable` separates thermal-like units (capacity is an
/// upper bound on output) from renewables (output follows a capacity-factor
/// series).
struct Generator {
  std::string id;
  std::string zone;
  std::string fuel;
  double p_max = 0.0;
  double var_cost = 0.0;
  double invest_cost = 0.0;
  double unforced_pct = 1.0;
  bool dispatchable = true;

  void validate() const {
    auto fail = [&](const std::string& what) {
      throw ValidationError("generator '" + id + "': " + what);
    };
    if (id.empty()) throw ValidationError("generator with empty id");
    if (!(p_max > 0.0) || !std::isfinite(p_max)) fail("p_max must be > 0");
    if (!(var_cost >= 0.0) || !std::isfinite(var_cost)) fail("var_cost must be >= 0");
    if (!(invest_cost >= 0.0) || !std::isfinite(invest_cost)) fail("invest_cost must be >= 0");
    if (!(unforced_pct > 0.0 && unforced_pct <= 1.0)) fail("unforced_pct must lie in (0, 1]");
    if (!dispatchable && var_cost != 0.0) fail("renewable generator must have var_cost = 0");
  }
};

/// Unforced capacity the generator may offer into the capacity auction.
inline double qualified_capacity(const Generator& g) { return g.unforced_pct * g.p_max; }

/// Per-MW-day lifetime cost of the peaker: investment plus variable cost at
/// full output for `full_output_hours_per_day` hours.
inline double peaker_levelized_cost(const Generator& g, double full_output_hours_per_day = 24.0) {
  if (!(full_output_hours_per_day >= 0.0))
    throw ValidationError("full_output_hours_per_day must be >= 0");
  return g.invest_cost + g.var_cost * full_output_hours_per_day;
}

/// Linear capacity demand curve P = -a_slope * Q + pi_max through the
/// reference point (q_cap, c_cone) and the zero-crossing point (q_zero, 0).
/// p1 is the cap of the flat segment; clearing never reaches it when the
/// peaker's net CONE is the largest offer, so only the line is used.
struct DemandCurve {
  double a_slope = 0.0;
  double pi_max = 0.0;
  double q_cap = 0.0;
  double q_zero = 0.0;
  double c_cone = 0.0;
  double p1 = 0.0;
  double f_excess = 0.0;
  double reserve_margin = 0.0;
  double translation_factor = 0.0;
  double d_peak = 0.0;

  double price_at(double quantity) const { return -a_slope * quantity + pi_max; }
  /// Quantity demanded at `price` ("Q^Sold" for an offer at that price).
  double quantity_at(double price) const { return (pi_max - price) / a_slope; }

  /// Curve defined directly by its slope and intercept. Anchors are derived
  /// with the given excess fraction so every identity of the type holds;
  /// reserve margin and translation factor are zero and d_peak = q_cap.
  static DemandCurve from_line(double a_slope, double pi_max, double f_excess = 0.18) {
    if (!(a_slope > 0.0) || !(pi_max > 0.0) || !(f_excess > 0.0))
      throw ValidationError("demand line needs a_slope > 0, pi_max > 0, f_excess > 0");
    DemandCurve c;
    c.a_slope = a_slope;
    c.pi_max = pi_max;
    c.f_excess = f_excess;
    c.c_cone = pi_max * f_excess / (1.0 + f_excess);
    c.q_cap = c.c_cone / (f_excess * a_slope);
    c.q_zero = (1.0 + f_excess) * c.q_cap;
    c.p1 = pi_max;
    c.d_peak = c.q_cap;
    return c;
  }
};

inline DemandCurve build_demand_curve(double c_cone, double d_peak, double reserve_margin,
                                      double translation_factor, double f_excess,
                                      double peaker_levelized) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError(std::string("demand curve: ") + name + " must be > 0");
  };
  auto fraction = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
      throw ValidationError(std::string("demand curve: ") + name + " must lie in (0, 1)");
  };
  positive(c_cone, "c_cone");
  positive(d_peak, "d_peak");
  positive(peaker_levelized, "peaker_levelized_cost");
  fraction(reserve_margin, "reserve_margin");
  fraction(translation_factor, "translation_factor");
  fraction(f_excess, "f_excess");

  DemandCurve c;
  c.c_cone = c_cone;
  c.d_peak = d_peak;
  c.reserve_margin = reserve_margin;
  c.translation_factor = translation_factor;
  c.f_excess = f_excess;
  c.q_cap = (1.0 - translation_factor) * (1.0 + reserve_margin) * d_peak;
  c.q_zero = (1.0 + f_excess) * c.q_cap;
  c.a_slope = c_cone / (f_excess * c.q_cap);
  c.pi_max = (1.0 + f_excess) / f_excess * c_cone;
  c.p1 = 1.5 * peaker_levelized;
  return c;
}

/// Transmission line between two buses. Susceptance is the coefficient in
/// f = B (theta_from - theta_to) with f in MW and angles in radians.
struct Line {
  std::string from;
  std::string to;
  double susceptance = 0.0;
  double f_min = 0.0;
  double f_max = 0.0;
};

class SystemNetwork {
 public:
  std::vector<std::string> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;

  void validate() const {
    if (buses.empty()) throw ValidationError("network has no buses");
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < buses.size(); ++i) {
      if (!seen.emplace(buses[i], i).second)
        throw ValidationError("duplicate bus '" + buses[i] + "'");
    }
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const Line& ln = lines[l];
      const std::string tag = "line " + std::to_string(l) + " (" + ln.from + "-" + ln.to + ")";
      if (!seen.count(ln.from) || !seen.count(ln.to))
        throw ValidationError(tag + ": endpoint is not a bus");
      if (ln.from == ln.to) throw ValidationError(tag + ": self loop");
      if (!(ln.susceptance > 0.0)) throw ValidationError(tag + ": susceptance must be > 0");
      if (!(ln.f_min < ln.f_max)) throw ValidationError(tag + ": f_min must be < f_max");
    }
    std::unordered_map<std::string, int> ids;
    for (const Generator& g : generators) {
      g.validate();
      if (!seen.count(g.zone))
        throw ValidationError("generator '" + g.id + "': zone '" + g.zone + "' is not a bus");
      if (++ids[g.id] > 1) throw ValidationError("duplicate generator id '" + g.id + "'");
    }
  }

  std::size_t bus_index(const std::string& id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i] == id) return i;
    throw ValidationError("unknown bus '" + id + "'");
  }

  std::optional<std::size_t> find_generator(const std::string& id) const {
    for (std::size_t i = 0; i < generators.size(); ++i)
      if (generators[i].id == id) return i;
    return std::nullopt;
  }

  std::size_t generator_index(const std::string& id) const {
    if (auto i = find_generator(id)) return *i;
    throw ValidationError("unknown generator '" + id + "'");
  }

  /// Bus used as the angle reference: smallest id in lexicographic order.
  std::size_t reference_bus() const {
    return static_cast<std::size_t>(std::min_element(buses.begin(), buses.end()) - buses.begin());
  }
};

/// Hourly loads per bus and capacity factors per renewable generator.
/// loads[b][k] is the load at bus b in the k-th hour of `hours`;
/// capacity_factors[g] is empty for dispatchable generators.
struct TimeSeries {
  std::vector<int> hours;
  std::vector<std::vector<double>> loads;
  std::vector<std::vector<double>> capacity_factors;

  std::size_t horizon() const { return hours.size(); }

  double system_load(std::size_t k) const {
    double total = 0.0;
    for (const auto& row : loads) total += row[k];
    return total;
  }

  double peak_system_load() const {
    double peak = 0.0;
    for (std::size_t k = 0; k < horizon(); ++k) peak = std::max(peak, system_load(k));
    return peak;
  }

  void validate(const SystemNetwork& net) const {
    if (hours.empty()) throw ValidationError("time series has no hours");
    if (loads.size() != net.buses.size())
      throw ValidationError("load matrix has " + std::to_string(loads.size()) + " rows, network has " +
                            std::to_string(net.buses.size()) + " buses");
    for (std::size_t b = 0; b < loads.size(); ++b) {
      if (loads[b].size() != hours.size())
        throw ValidationError("loads for bus '" + net.buses[b] + "' do not cover the horizon");
      for (double d : loads[b])
        if (!(d >= 0.0) || !std::isfinite(d))
          throw ValidationError("negative or non-finite load at bus '" + net.buses[b] + "'");
    }
    if (capacity_factors.size() != net.generators.size())
      throw ValidationError("capacity factor table does not match generator list");
    for (std::size_t g = 0; g < net.generators.size(); ++g) {
      const Generator& gen = net.generators[g];
      const auto& cf = capacity_factors[g];
      if (gen.dispatchable) {
        if (!cf.empty())
          throw ValidationError("dispatchable generator '" + gen.id + "' has a capacity-factor series");
        continue;
      }
      if (cf.size() != hours.size())
        throw ValidationError("missing capacity factor for renewable '" + gen.id + "'");
      for (double f : cf)
        if (!(f >= 0.0 && f <= 1.0))
          throw ValidationError("capacity factor of '" + gen.id + "' outside [0, 1]");
    }
  }

  /// Same series with every load multiplied by `factor`.
  TimeSeries scaled_loads(double factor) const {
    TimeSeries out = *this;
    for (auto& row : out.loads)
      for (double& d : row) d *= factor;
    return out;
  }
};

/// Network copy with every line limit multiplied by `factor`.
inline SystemNetwork scaled_line_limits(const SystemNetwork& net, double factor) {
  if (!(factor > 0.0)) throw ValidationError("congestion scale must be > 0");
  SystemNetwork out = net;
  for (Line& l : out.lines) {
    l.f_min *= factor;
    l.f_max *= factor;
  }
  return out;
}

}  // namespace capmkt
