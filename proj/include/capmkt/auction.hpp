#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "capmkt/error.hpp"
#include "capmkt/model.hpp"

namespace capmkt {

/// One offer into the capacity spot auction ($/MW-day, MW).
struct CapacityBid {
  std::string generator_id;
  double offer_price = 0.0;
  double offer_qty = 0.0;
};

enum class ClearingStatus {
  Cleared,         // an offer price sets the clearing price
  DemandSetPrice,  // demand line meets a vertical supply step (or supply runs out)
  Infeasible,      // integer model only: no feasible marginal supplier
};

inline const char* to_string(ClearingStatus s) {
  switch (s) {
    case ClearingStatus::Cleared: return "cleared";
    case ClearingStatus::DemandSetPrice: return "demand_set_price";
    case ClearingStatus::Infeasible: return "infeasible";
  }
  return "?";
}

/// Auction outcome. `sold` and `marginal` index the bid vector passed in.
/// When the status is DemandSetPrice the market "fails to clear" in the
/// merit-order sense, but price/quantity/sold still describe the welfare
/// maximizing outcome (all allocated offers sell fully, price read off the
/// demand line). Infeasible results carry no allocation.
struct ClearingResult {
  ClearingStatus status = ClearingStatus::Infeasible;
  bool cleared = false;
  double price = 0.0;
  double quantity = 0.0;
  std::vector<double> sold;
  std::optional<std::size_t> marginal;
  std::vector<std::size_t> allocated;  // merit order

  bool has_allocation() const { return status != ClearingStatus::Infeasible; }
};

inline void validate_bids(const std::vector<CapacityBid>& bids) {
  if (bids.empty()) throw ValidationError("capacity auction needs at least one bid");
  for (const CapacityBid& b : bids) {
    if (!(b.offer_price >= 0.0) || !std::isfinite(b.offer_price))
      throw ValidationError("bid of '" + b.generator_id + "': offer_price must be >= 0");
    if (!(b.offer_qty >= 0.0) || !std::isfinite(b.offer_qty))
      throw ValidationError("bid of '" + b.generator_id + "': offer_qty must be >= 0");
  }
}

/// Bid indices sorted by offer price; equal prices are ordered by generator id.
inline std::vector<std::size_t> merit_order(const std::vector<CapacityBid>& bids) {
  std::vector<std::size_t> order(bids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bids[a].offer_price != bids[b].offer_price) return bids[a].offer_price < bids[b].offer_price;
    return bids[a].generator_id < bids[b].generator_id;
  });
  return order;
}

/// Truthful bids: offer price = net CONE, offer quantity = qualified capacity.
inline std::vector<CapacityBid> truthful_bids(const std::vector<Generator>& gens,
                                              const std::vector<double>& net_cones) {
  if (gens.size() != net_cones.size())
    throw ValidationError("net CONE table does not match generator list");
  std::vector<CapacityBid> bids;
  bids.reserve(gens.size());
  for (std::size_t g = 0; g < gens.size(); ++g)
    bids.push_back({gens[g].id, net_cones[g], qualified_capacity(gens[g])});
  return bids;
}

namespace detail {

inline void finish_allocation(ClearingResult& res, const std::vector<std::size_t>& order) {
  res.allocated.clear();
  for (std::size_t i : order)
    if (res.sold[i] > 0.0 || (res.marginal && *res.marginal == i)) res.allocated.push_back(i);
}

}  // namespace detail

// Merit-order clearing. Walks the sorted offers until the cumulative offer
// reaches the quantity demanded at the current offer price. The stop
// candidate only clears when its own sold quantity is nonnegative; otherwise
// the demand line crosses the previous vertical step and the price is read
// off the demand line.
inline ClearingResult clear_greedy(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  validate_bids(bids);
  const auto order = merit_order(bids);
  const std::size_t n = order.size();

  ClearingResult res;
  res.sold.assign(bids.size(), 0.0);

  std::size_t k = 0;
  double cum = bids[order[0]].offer_qty;
  while (curve.quantity_at(bids[order[k]].offer_price) > cum && k + 1 < n) {
    ++k;
    cum += bids[order[k]].offer_qty;
  }

  const double q_sold = curve.quantity_at(bids[order[k]].offer_price);
  if (q_sold <= cum) {
    const double before = cum - bids[order[k]].offer_qty;
    if (q_sold >= before) {
      res.status = ClearingStatus::Cleared;
      res.cleared = true;
      res.price = bids[order[k]].offer_price;
      res.quantity = q_sold;
      for (std::size_t j = 0; j < k; ++j) res.sold[order[j]] = bids[order[j]].offer_qty;
      res.sold[order[k]] = q_sold - before;
      res.marginal = order[k];
    } else {
      res.status = ClearingStatus::DemandSetPrice;
      res.quantity = before;
      res.price = curve.price_at(before);
      for (std::size_t j = 0; j < k; ++j) res.sold[order[j]] = bids[order[j]].offer_qty;
    }
  } else {
    // every offer is taken and demand is still unmet at the last price
    res.status = ClearingStatus::DemandSetPrice;
    res.quantity = cum;
    res.price = curve.price_at(cum);
    for (std::size_t j = 0; j < n; ++j) res.sold[order[j]] = bids[order[j]].offer_qty;
  }
  detail::finish_allocation(res, order);
  return res;
}

/// KKT residuals of the welfare-maximization model evaluated at a clearing.
struct QcCertificate {
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double complementarity = 0.0;

  double max() const { return std::max({stationarity, primal_feasibility, complementarity}); }
};

struct QcSolution {
  ClearingResult clearing;
  double welfare = 0.0;
  QcCertificate certificate;
};

// Multipliers are attached by active set: upper-bound multiplier only where
// q = h, lower-bound multiplier only where q = 0. The price is the dual of
// r = sum(q), i.e. pi_max - A r.
inline QcCertificate qc_kkt_residual(const std::vector<CapacityBid>& bids, const DemandCurve& curve,
                                     const ClearingResult& res) {
  QcCertificate cert;
  const double dual_price = curve.price_at(res.quantity);
  double total = 0.0;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const double q = res.sold[i];
    const double h = bids[i].offer_qty;
    total += q;
    cert.primal_feasibility = std::max({cert.primal_feasibility, q - h, -q});
    const double grad = dual_price - bids[i].offer_price;  // (pi_max - W) - A r
    const double scale = 1e-12 * std::max(1.0, h);
    double resid;
    double comp = 0.0;
    if (h - q <= scale && q > scale) {
      resid = std::max(0.0, -grad);  // mu = grad must be >= 0
      comp = std::max(0.0, grad) * std::max(0.0, h - q);
    } else if (q <= scale) {
      resid = std::max(0.0, grad);  // nu = -grad must be >= 0
      comp = std::max(0.0, -grad) * std::max(0.0, q);
    } else {
      resid = std::abs(grad);
    }
    cert.stationarity = std::max(cert.stationarity, resid);
    cert.complementarity = std::max(cert.complementarity, comp);
  }
  cert.primal_feasibility = std::max(cert.primal_feasibility, std::abs(total - res.quantity));
  return cert;
}

inline double qc_objective(const std::vector<CapacityBid>& bids, const DemandCurve& curve,
                           const std::vector<double>& sold) {
  double r = 0.0, linear = 0.0;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    r += sold[i];
    linear += (curve.pi_max - bids[i].offer_price) * sold[i];
  }
  return -0.5 * curve.a_slope * r * r + linear;
}

// Welfare maximization solved in closed form: fill offers in merit order
// while the marginal welfare pi_max - W - A r stays nonnegative. The model
// always has an optimum; it "clears" when the water level stops inside an
// offer's step.
inline QcSolution solve_qc(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  validate_bids(bids);
  const auto order = merit_order(bids);

  QcSolution out;
  ClearingResult& res = out.clearing;
  res.sold.assign(bids.size(), 0.0);

  double r = 0.0;
  std::optional<std::size_t> level_inside;
  for (std::size_t i : order) {
    const double headroom = (curve.pi_max - bids[i].offer_price) / curve.a_slope - r;
    if (headroom < 0.0) break;
    const double take = std::min(bids[i].offer_qty, headroom);
    res.sold[i] = take;
    r += take;
    if (headroom <= bids[i].offer_qty) {
      level_inside = i;
      break;
    }
  }
  res.quantity = r;
  if (level_inside) {
    res.status = ClearingStatus::Cleared;
    res.cleared = true;
    res.marginal = level_inside;
    res.price = bids[*level_inside].offer_price;
  } else {
    res.status = ClearingStatus::DemandSetPrice;
    res.price = curve.price_at(r);
  }
  detail::finish_allocation(res, order);
  out.welfare = qc_objective(bids, curve, res.sold);
  out.certificate = qc_kkt_residual(bids, curve, res);
  return out;
}

inline ClearingResult clear_qc(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  return solve_qc(bids, curve).clearing;
}

/// One candidate of the integer clearing model, in merit order: z marks the
/// marginal supplier, x the allocated set, q the sold quantities implied by
/// the constraints.
struct MipAssignment {
  std::vector<int> x;
  std::vector<int> z;
  std::vector<double> q;
  std::vector<double> sold_targets;  // (pi_max - W_g) / A
  double big_m = 0.0;
  double objective = 0.0;
};

// Checks every constraint of the integer model for one assignment. Offer
// quantities play the role of the per-generator capacity bound.
inline bool mip_feasible(const std::vector<double>& caps, const MipAssignment& a, double tol = 1e-9) {
  const std::size_t n = caps.size();
  int zsum = 0;
  double prefix = 0.0;
  for (std::size_t g = 0; g < n; ++g) {
    if ((a.x[g] != 0 && a.x[g] != 1) || (a.z[g] != 0 && a.z[g] != 1)) return false;
    zsum += a.z[g];
    int tail = 0;
    for (std::size_t i = g; i < n; ++i) tail += a.z[i];
    if (a.x[g] != tail) return false;

    const double q = a.q[g];
    const double slack = tol * std::max(1.0, caps[g]);
    if (q < -slack) return false;
    if (q > caps[g] + slack) return false;                      // q <= h
    if (q > caps[g] * a.x[g] + slack) return false;             // q <= cap x
    if (q < caps[g] * (a.x[g] - a.z[g]) - slack) return false;  // q >= cap (x - z)

    prefix += q;
    const double big_slack = tol * std::max(1.0, std::abs(a.sold_targets[g]) + a.big_m);
    if (prefix < a.sold_targets[g] * a.z[g] - big_slack) return false;
    if (prefix > a.sold_targets[g] * a.z[g] + a.big_m * (1 - a.z[g]) + big_slack) return false;
  }
  return zsum == 1;
}

// All |G| assignments allowed by sum(z) = 1, with x and q derived from the
// linking constraints. Index k of the result marks merit position k marginal.
inline std::vector<MipAssignment> enumerate_mip(const std::vector<CapacityBid>& bids,
                                                const DemandCurve& curve) {
  const auto order = merit_order(bids);
  const std::size_t n = order.size();
  std::vector<double> caps(n), targets(n);
  for (std::size_t j = 0; j < n; ++j) {
    caps[j] = bids[order[j]].offer_qty;
    targets[j] = curve.quantity_at(bids[order[j]].offer_price);
  }
  std::vector<MipAssignment> out;
  out.reserve(n);
  double before = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    MipAssignment a;
    a.x.assign(n, 0);
    a.z.assign(n, 0);
    a.q.assign(n, 0.0);
    a.sold_targets = targets;
    a.big_m = targets[0];
    a.z[k] = 1;
    for (std::size_t g = 0; g <= k; ++g) a.x[g] = 1;
    for (std::size_t g = 0; g < k; ++g) a.q[g] = caps[g];
    a.q[k] = targets[k] - before;
    a.objective = bids[order[k]].offer_price;
    out.push_back(std::move(a));
    before += caps[k];
  }
  return out;
}

// Integer clearing model solved exactly by enumerating the marginal
// supplier; returns the feasible candidate with the lowest objective.
inline ClearingResult clear_mip(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  validate_bids(bids);
  const auto order = merit_order(bids);
  const auto candidates = enumerate_mip(bids, curve);
  std::vector<double> caps(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) caps[j] = bids[order[j]].offer_qty;

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (!mip_feasible(caps, candidates[k])) continue;
    if (!best || candidates[k].objective < candidates[*best].objective) best = k;
  }

  ClearingResult res;
  res.sold.assign(bids.size(), 0.0);
  if (!best) {
    res.status = ClearingStatus::Infeasible;
    return res;
  }
  const MipAssignment& a = candidates[*best];
  res.status = ClearingStatus::Cleared;
  res.cleared = true;
  res.price = a.objective;
  for (std::size_t j = 0; j < order.size(); ++j) {
    res.sold[order[j]] = std::max(0.0, a.q[j]);
    res.quantity += a.q[j];
  }
  res.marginal = order[*best];
  detail::finish_allocation(res, order);
  return res;
}

inline double consumer_surplus(const ClearingResult& res, const DemandCurve& curve) {
  return 0.5 * (curve.pi_max - res.price) * res.quantity;
}

inline double producer_surplus(const ClearingResult& res, const std::vector<CapacityBid>& bids) {
  double total = 0.0;
  for (std::size_t i = 0; i < bids.size(); ++i) total += (res.price - bids[i].offer_price) * res.sold[i];
  return total;
}

/// -(A/2) r^2 + sum (pi_max - W) q for a cleared market.
inline double social_welfare(const ClearingResult& res, const std::vector<CapacityBid>& bids,
                             const DemandCurve& curve) {
  if (!res.cleared) throw ComputationError("social welfare requested for an uncleared market");
  return qc_objective(bids, curve, res.sold);
}

struct ExcessCapacity {
  double ratio = 0.0;        // (r* - Q_cap) / Q_cap
  double closed_form = 0.0;  // (1 - W_marginal / C_cone) F_E
  double residual = 0.0;
};

inline ExcessCapacity excess_capacity_ratio(const ClearingResult& res, const std::vector<CapacityBid>& bids,
                                            const DemandCurve& curve) {
  if (!res.cleared || !res.marginal)
    throw ComputationError("excess capacity requested for an uncleared market");
  ExcessCapacity e;
  e.ratio = (res.quantity - curve.q_cap) / curve.q_cap;
  e.closed_form = (1.0 - bids[*res.marginal].offer_price / curve.c_cone) * curve.f_excess;
  e.residual = std::abs(e.ratio - e.closed_form);
  return e;
}

/// Capacity-market profit of each supplier from the allocation-class closed
/// forms, given truthful bids (offer price = net CONE, offer quantity =
/// qualified capacity). The marginal supplier is charged its net CONE on
/// the full qualified capacity.
inline std::vector<double> supplier_profit(const ClearingResult& res, const std::vector<CapacityBid>& truthful) {
  if (!res.cleared || !res.marginal)
    throw ComputationError("supplier profit requested for an uncleared market");
  const std::size_t m = *res.marginal;
  const double w_hat = truthful[m].offer_price;
  double allocated_cap = 0.0;
  for (std::size_t i : res.allocated) allocated_cap += truthful[i].offer_qty;

  std::vector<double> profit(truthful.size());
  for (std::size_t i = 0; i < truthful.size(); ++i) {
    const double cap = truthful[i].offer_qty;
    const bool in_set = std::find(res.allocated.begin(), res.allocated.end(), i) != res.allocated.end();
    if (i == m)
      profit[i] = w_hat * (res.quantity - allocated_cap);
    else if (in_set)
      profit[i] = (w_hat - truthful[i].offer_price) * cap;
    else
      profit[i] = -truthful[i].offer_price * cap;
  }
  return profit;
}

/// Revenue minus net CONE on qualified capacity, read directly off the
/// clearing (no case analysis).
inline std::vector<double> simulated_profit(const ClearingResult& res, const std::vector<CapacityBid>& truthful) {
  std::vector<double> profit(truthful.size());
  for (std::size_t i = 0; i < truthful.size(); ++i)
    profit[i] = res.price * res.sold[i] - truthful[i].offer_price * truthful[i].offer_qty;
  return profit;
}

inline std::optional<std::size_t> find_bid(const std::vector<CapacityBid>& bids, const std::string& id) {
  for (std::size_t i = 0; i < bids.size(); ++i)
    if (bids[i].generator_id == id) return i;
  return std::nullopt;
}

/// Greedy, QC and integer clearings side by side. The integer model has no
/// feasible marginal supplier when the greedy walk fails to clear, so it is
/// compared only on the cleared/uncleared flag in that case.
struct PathComparison {
  ClearingResult greedy, qc, mip;
  double gap = 0.0;  // max abs difference in price, quantity and sold
  bool agree = false;
};

inline PathComparison compare_clearing_paths(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  PathComparison c{clear_greedy(bids, curve), clear_qc(bids, curve), clear_mip(bids, curve)};
  auto diff = [&](const ClearingResult& a, const ClearingResult& b) {
    double d = std::max(std::abs(a.price - b.price), std::abs(a.quantity - b.quantity));
    for (std::size_t i = 0; i < a.sold.size(); ++i) d = std::max(d, std::abs(a.sold[i] - b.sold[i]));
    return d;
  };
  c.gap = diff(c.greedy, c.qc);
  if (c.mip.cleared) c.gap = std::max(c.gap, diff(c.greedy, c.mip));
  c.agree = c.gap <= 1e-9 && c.greedy.cleared == c.qc.cleared && c.greedy.cleared == c.mip.cleared;
  return c;
}

}  // namespace capmkt
