#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "capmkt/auction.hpp"
#include "capmkt/energy.hpp"
#include "capmkt/error.hpp"
#include "capmkt/model.hpp"

namespace capmkt {

inline constexpr double kUndercut = 0.01;   // $/MW-day
inline constexpr double kPriceCapGap = 1.0; // $/MWh below VOLL

// ---------------------------------------------------------------------------
// Capacity market

enum class CmBidKind { BidZero, Marginal, Truthful };

inline const char* to_string(CmBidKind k) {
  switch (k) {
    case CmBidKind::BidZero: return "bid_zero";
    case CmBidKind::Marginal: return "marginal";
    case CmBidKind::Truthful: return "truthful";
  }
  return "?";
}

struct StrategyOutcome {
  std::size_t leader = 0;  // index into the bid list
  double offer_price = 0.0;
  double offer_qty = 0.0;
  CmBidKind kind = CmBidKind::Truthful;
  ClearingResult clearing;
  double leader_revenue = 0.0;
  double leader_profit = 0.0;        // revenue minus net CONE on qualified capacity
  std::vector<double> revenue;       // every bidder, leader included
  double consumer_surplus = 0.0;
  std::optional<double> b_value;     // B of the allocated rival set when the leader is marginal
  std::optional<double> quadratic_revenue;  // -(w - B)^2 / A + B^2 / A
  double epsilon = kUndercut;
  std::optional<double> w_dot;   // most expensive allocated non-marginal offer (truthful clearing)
  std::optional<double> w_ddot;  // cheapest unallocated offer (truthful clearing)
  int candidates_evaluated = 0;
};

namespace detail {

inline std::size_t leader_index(const std::vector<CapacityBid>& bids, const std::string& leader_id) {
  if (auto i = find_bid(bids, leader_id)) return *i;
  throw ValidationError("leader '" + leader_id + "' has no capacity bid");
}

inline double allocated_rival_capacity(const ClearingResult& res, const std::vector<CapacityBid>& bids,
                                       std::size_t leader) {
  double s = 0.0;
  for (std::size_t i : res.allocated)
    if (i != leader) s += bids[i].offer_qty;
  return s;
}

}  // namespace detail

/// Neighbours of the marginal supplier in a clearing: W of the most
/// expensive other allocated offer and of the cheapest unallocated one.
inline std::pair<std::optional<double>, std::optional<double>> clearing_neighbours(
    const ClearingResult& res, const std::vector<CapacityBid>& bids) {
  std::optional<double> dot, ddot;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const bool in_set = std::find(res.allocated.begin(), res.allocated.end(), i) != res.allocated.end();
    if (in_set && (!res.marginal || i != *res.marginal)) {
      if (!dot || bids[i].offer_price > *dot) dot = bids[i].offer_price;
    } else if (!in_set) {
      if (!ddot || bids[i].offer_price < *ddot) ddot = bids[i].offer_price;
    }
  }
  return {dot, ddot};
}

/// Clears the market with the leader's price replaced by `price` and
/// reports the leader's revenue and the marginal-revenue identity terms.
inline StrategyOutcome evaluate_cm_bid(const std::vector<CapacityBid>& truthful, const DemandCurve& curve,
                                       std::size_t leader, double price) {
  auto bids = truthful;
  bids[leader].offer_price = price;
  StrategyOutcome o;
  o.leader = leader;
  o.offer_price = price;
  o.offer_qty = bids[leader].offer_qty;
  o.clearing = clear_greedy(bids, curve);
  o.revenue.resize(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) o.revenue[i] = o.clearing.price * o.clearing.sold[i];
  o.leader_revenue = o.revenue[leader];
  o.leader_profit = o.leader_revenue - truthful[leader].offer_price * truthful[leader].offer_qty;
  o.consumer_surplus = consumer_surplus(o.clearing, curve);
  const bool marginal = o.clearing.cleared && o.clearing.marginal && *o.clearing.marginal == leader;
  if (price == truthful[leader].offer_price)
    o.kind = CmBidKind::Truthful;
  else if (marginal)
    o.kind = CmBidKind::Marginal;
  else
    o.kind = CmBidKind::BidZero;
  if (marginal) {
    const double b = 0.5 * (curve.pi_max - curve.a_slope * detail::allocated_rival_capacity(o.clearing, bids, leader));
    o.b_value = b;
    o.quadratic_revenue = -(price - b) * (price - b) / curve.a_slope + b * b / curve.a_slope;
  }
  const auto base = clear_greedy(truthful, curve);
  std::tie(o.w_dot, o.w_ddot) = clearing_neighbours(base, truthful);
  return o;
}

// Revenue-maximizing price for the leader with rivals truthful and the
// leader's quantity fixed. With rivals offering their full capacity any
// clearing allocates a merit-order prefix of rivals, so the candidates are:
// 0, the truthful price, one cent either side of every rival price, and on
// each prefix the unconstrained maximizer B clipped to the prices where the
// leader stays marginal on that prefix.
inline StrategyOutcome best_cm_bid(const std::string& leader_id, const std::vector<CapacityBid>& truthful,
                                   const DemandCurve& curve, double epsilon = kUndercut) {
  validate_bids(truthful);
  const std::size_t leader = detail::leader_index(truthful, leader_id);
  const double h1 = truthful[leader].offer_qty;

  std::vector<double> cands{0.0, truthful[leader].offer_price};
  std::vector<std::size_t> rivals;
  for (std::size_t i : merit_order(truthful))
    if (i != leader) rivals.push_back(i);
  for (std::size_t i : rivals) {
    cands.push_back(truthful[i].offer_price - epsilon);
    cands.push_back(truthful[i].offer_price + epsilon);
  }
  double prefix = 0.0;
  for (std::size_t k = 0; k <= rivals.size(); ++k) {
    const double w_lo_rival = k == 0 ? 0.0 : truthful[rivals[k - 1]].offer_price;
    const double w_hi_rival = k < rivals.size() ? truthful[rivals[k]].offer_price : curve.pi_max;
    const double lo = std::max(w_lo_rival, curve.pi_max - curve.a_slope * (prefix + h1));
    const double hi = std::min(w_hi_rival, curve.pi_max - curve.a_slope * prefix);
    const double b = 0.5 * (curve.pi_max - curve.a_slope * prefix);
    if (lo <= hi) {
      cands.push_back(std::clamp(b, lo, hi));
      cands.push_back(lo);
      cands.push_back(hi);
    }
    cands.push_back(curve.pi_max - curve.a_slope * (prefix + h1));
    if (k < rivals.size()) prefix += truthful[rivals[k]].offer_qty;
  }
  for (double& c : cands) c = std::max(0.0, c);
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

  // rank: revenue, then truthful, then bid zero, then lower price
  auto rank = [&](const StrategyOutcome& o) {
    return o.kind == CmBidKind::Truthful ? 2 : o.kind == CmBidKind::BidZero ? 1 : 0;
  };
  std::optional<StrategyOutcome> best;
  const double tie = 1e-9;
  for (double c : cands) {
    StrategyOutcome o = evaluate_cm_bid(truthful, curve, leader, c);
    if (!best || o.leader_revenue > best->leader_revenue + tie * std::max(1.0, std::abs(best->leader_revenue)) ||
        (std::abs(o.leader_revenue - best->leader_revenue) <= tie * std::max(1.0, std::abs(best->leader_revenue)) &&
         rank(o) > rank(*best)))
      best = std::move(o);
  }
  // a non-marginal allocated bid below the clearing price behaves like bidding 0
  if (best->kind == CmBidKind::BidZero && best->offer_price != 0.0) {
    StrategyOutcome zero = evaluate_cm_bid(truthful, curve, leader, 0.0);
    if (std::abs(zero.leader_revenue - best->leader_revenue) <= tie * std::max(1.0, best->leader_revenue))
      best = std::move(zero);
  }
  best->epsilon = epsilon;
  best->candidates_evaluated = static_cast<int>(cands.size());
  return *best;
}

/// Brute force over the price grid 0, step, 2 step, ..., <= pi_max.
inline StrategyOutcome cm_bid_oracle(const std::string& leader_id, const std::vector<CapacityBid>& truthful,
                                     const DemandCurve& curve, double step = 0.01) {
  if (!(step > 0.0)) throw ValidationError("oracle price step must be > 0");
  validate_bids(truthful);
  const std::size_t leader = detail::leader_index(truthful, leader_id);
  const auto n = static_cast<long>(std::floor(curve.pi_max / step + 1e-9));
  std::optional<StrategyOutcome> best;
  auto bids = truthful;
  double best_rev = -1.0, best_w = 0.0;
  for (long k = 0; k <= n; ++k) {
    const double w = static_cast<double>(k) * step;
    bids[leader].offer_price = w;
    const auto res = clear_greedy(bids, curve);
    const double rev = res.price * res.sold[leader];
    if (rev > best_rev) {
      best_rev = rev;
      best_w = w;
    }
  }
  StrategyOutcome o = evaluate_cm_bid(truthful, curve, leader, best_w);
  o.candidates_evaluated = static_cast<int>(n + 1);
  return o;
}

/// Revenue slope bound used to compare the enumeration with a grid: within
/// a smooth piece revenue changes by at most (h_1 + pi_max / A) per $ of bid.
inline double oracle_slack(const std::vector<CapacityBid>& truthful, const DemandCurve& curve,
                           const std::string& leader_id, double step) {
  const std::size_t leader = detail::leader_index(truthful, leader_id);
  return step * (truthful[leader].offer_qty + curve.pi_max / curve.a_slope);
}

struct MarketPowerImpact {
  double price_delta = 0.0;
  double consumer_surplus_delta = 0.0;
  std::vector<double> revenue_delta;  // per bidder; the leader's entry included
  bool comonotone = true;
};

// Strategic minus truthful. When the price falls no rival gains and
// consumers do not lose; when it rises no rival loses and consumers do not
// gain. An unchanged price carries no sign claim: the leader leaving or
// joining the allocation shifts quantity onto or off the marginal rival.
inline MarketPowerImpact market_power_impact(const std::vector<CapacityBid>& truthful, const DemandCurve& curve,
                                             const StrategyOutcome& outcome, double tol = 1e-9) {
  const auto base = clear_greedy(truthful, curve);
  MarketPowerImpact m;
  m.price_delta = outcome.clearing.price - base.price;
  m.consumer_surplus_delta = outcome.consumer_surplus - consumer_surplus(base, curve);
  m.revenue_delta.resize(truthful.size());
  const bool down = m.price_delta < -tol * std::max(1.0, base.price);
  const bool up = m.price_delta > tol * std::max(1.0, base.price);
  const double scale = tol * std::max(1.0, base.price * std::max(1.0, base.quantity));
  for (std::size_t i = 0; i < truthful.size(); ++i) {
    m.revenue_delta[i] = outcome.revenue[i] - base.price * base.sold[i];
    if (i == outcome.leader) continue;
    if (down && m.revenue_delta[i] > scale) m.comonotone = false;
    if (up && m.revenue_delta[i] < -scale) m.comonotone = false;
  }
  if (down && m.consumer_surplus_delta < -scale) m.comonotone = false;
  if (up && m.consumer_surplus_delta > scale) m.comonotone = false;
  return m;
}

enum class BidZeroCase { AllocatedNonMarginal, MarginalLarge, MarginalSmall, MarginalNoGain, Unallocated };

inline const char* to_string(BidZeroCase c) {
  switch (c) {
    case BidZeroCase::AllocatedNonMarginal: return "allocated_non_marginal";
    case BidZeroCase::MarginalLarge: return "marginal_large";
    case BidZeroCase::MarginalSmall: return "marginal_small";
    case BidZeroCase::MarginalNoGain: return "marginal_no_gain";
    case BidZeroCase::Unallocated: return "unallocated";
  }
  return "?";
}

/// What happens when the leader switches from its truthful price to 0, and
/// whether the price movement matches the case the truthful clearing falls in.
struct BidZeroAnalysis {
  BidZeroCase which = BidZeroCase::AllocatedNonMarginal;
  ClearingResult truthful, zero;
  double w_hat = 0.0;
  std::optional<double> w_dot, w_ddot;
  double revenue_truthful = 0.0, revenue_zero = 0.0;
  bool prediction_holds = false;
  // Where the textbook merit-order walk stops when the leader bids 0: it posts
  // the stop offer's price even when that offer's sale comes out negative
  // (demand line crossing a vertical step). Reported for the small-marginal
  // case, whose stated price bound only holds under this reading.
  double literal_price = 0.0;
  double literal_marginal_sale = 0.0;
  bool literal_prediction_holds = false;
};

namespace detail {

inline std::pair<double, double> literal_walk(const std::vector<CapacityBid>& bids, const DemandCurve& curve) {
  const auto order = merit_order(bids);
  std::size_t k = 0;
  double cum = bids[order[0]].offer_qty;
  while (curve.quantity_at(bids[order[k]].offer_price) > cum && k + 1 < order.size()) {
    ++k;
    cum += bids[order[k]].offer_qty;
  }
  const double w = bids[order[k]].offer_price;
  return {w, curve.quantity_at(w) - (cum - bids[order[k]].offer_qty)};
}

}  // namespace detail

inline BidZeroAnalysis analyze_bid_zero(const std::string& leader_id, const std::vector<CapacityBid>& truthful,
                                        const DemandCurve& curve, double tol = 1e-9) {
  const std::size_t leader = detail::leader_index(truthful, leader_id);
  BidZeroAnalysis a;
  a.truthful = clear_greedy(truthful, curve);
  if (!a.truthful.cleared) throw ComputationError("bid-zero analysis needs a cleared truthful market");
  auto zero_bids = truthful;
  zero_bids[leader].offer_price = 0.0;
  a.zero = clear_greedy(zero_bids, curve);
  std::tie(a.literal_price, a.literal_marginal_sale) = detail::literal_walk(zero_bids, curve);
  a.w_hat = a.truthful.price;
  std::tie(a.w_dot, a.w_ddot) = clearing_neighbours(a.truthful, truthful);
  a.revenue_truthful = a.truthful.price * a.truthful.sold[leader];
  a.revenue_zero = a.zero.price * a.zero.sold[leader];
  const double w_new = a.zero.price;
  const double h1 = truthful[leader].offer_qty;
  const bool allocated =
      std::find(a.truthful.allocated.begin(), a.truthful.allocated.end(), leader) != a.truthful.allocated.end();
  const double others = detail::allocated_rival_capacity(a.truthful, truthful, leader);

  if (*a.truthful.marginal == leader) {
    const double w_dot = a.w_dot.value_or(0.0);
    const double threshold = (curve.pi_max - w_dot) / curve.a_slope - others;
    const double w1 = truthful[leader].offer_price;
    if (h1 >= threshold) {
      const bool gain = w_new > 0 && h1 > w1 / w_new * ((curve.pi_max - w1) / curve.a_slope - others);
      a.which = gain ? BidZeroCase::MarginalLarge : BidZeroCase::MarginalNoGain;
      a.prediction_holds = w_new <= w_dot + tol && (!gain || a.revenue_zero > a.revenue_truthful);
    } else {
      a.which = BidZeroCase::MarginalSmall;
      const double w_ddot = a.w_ddot.value_or(std::numeric_limits<double>::infinity());
      a.prediction_holds = w_new >= w_ddot - tol && a.revenue_zero > a.revenue_truthful;
      a.literal_prediction_holds = a.literal_price >= w_ddot - tol;
    }
  } else if (allocated) {
    a.which = BidZeroCase::AllocatedNonMarginal;
    a.prediction_holds = std::abs(w_new - a.w_hat) <= tol && std::abs(a.revenue_zero - a.revenue_truthful) <= tol * std::max(1.0, a.revenue_truthful);
  } else {
    a.which = BidZeroCase::Unallocated;
    a.prediction_holds = w_new <= a.w_hat + tol && a.revenue_zero > 0.0;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Joint capacity and energy markets

struct JointOptions {
  int grid_points = 50;          // capacity grid step = P^max / grid_points
  bool allow_price_bid = false;  // also search the leader's energy bid price
  bool truthful_cm_price = false;  // leader offers its net CONE instead of 0
  double voll = kDefaultVoll;
  double price_cap_gap = kPriceCapGap;
  LpOptions lp;
};

struct JointStrategy {
  double cm_offer_qty = 0.0;  // h'
  double cm_sold = 0.0;       // q_bar
  double em_extra = 0.0;      // v
  double em_bid_price = 0.0;  // c
  double em_capacity = 0.0;   // q_bar + v
};

struct WithholdingReport {
  double gain = 0.0;
  double loss = 0.0;
  double loss_no_cm = 0.0;
  std::vector<int> profitable_hours_truthful;
  std::vector<int> profitable_hours_strategic;
  double cm_price_truthful = 0.0;
  double cm_price_strategic = 0.0;
  double profit_truthful = 0.0;
  double profit_strategic = 0.0;
  bool assumptions_hold = false;  // v = 0 and unchanged capacity price
  bool lmp_nondecreasing = true;  // hourwise at the leader's bus
  double identity_residual = 0.0; // (strategic - truthful) - (gain - loss)
};

/// Capacity side of a joint scenario: rivals' truthful offers and the curve.
struct CapacitySide {
  std::vector<CapacityBid> bids;  // every generator, truthful
  DemandCurve curve;
  double days = 1.0;
};

struct EnergyEvaluation {
  double capacity = 0.0;
  double bid_price = 0.0;
  double profit = 0.0;  // leader, $ over the horizon at true variable cost
  EnergyMarketResult result;
};

struct CapacityEvaluation {
  double offer_qty = 0.0;
  double sold = 0.0;
  double price = 0.0;
  double revenue = 0.0;  // $ over the horizon
};

namespace detail {

// Leader's hourly profit at true cost when it bids `bid`: interior output
// is priced at the bid by complementarity.
inline double leader_hourly_profit(const SystemNetwork& net, const HourlyDispatch& hd, std::size_t g, double bid) {
  const Generator& gen = net.generators[g];
  const double lambda = hd.lmp[net.bus_index(gen.zone)];
  const double p = hd.production[g], cap = hd.capacity[g];
  const double tol = 1e-9 * std::max(1.0, cap);
  if (p <= tol) return 0.0;
  if (p >= cap - tol) return (lambda - gen.var_cost) * p;
  return (bid - gen.var_cost) * p;
}

}  // namespace detail

class JointMarket {
 public:
  JointMarket(const SystemNetwork& net, const TimeSeries& ts, CapacitySide cm, std::size_t leader, JointOptions opt)
      : net_(net), ts_(ts), cm_(std::move(cm)), leader_(leader), opt_(opt) {
    const Generator& g = net_.generators[leader_];
    if (!g.dispatchable) throw ValidationError("joint-market leader '" + g.id + "' must be dispatchable");
    if (opt_.grid_points < 1) throw ValidationError("grid_points must be >= 1");
    bid_index_ = detail::leader_index(cm_.bids, g.id);
  }

  const Generator& leader() const { return net_.generators[leader_]; }
  double step() const { return leader().p_max / opt_.grid_points; }

  double grid_value(int k) const { return k == opt_.grid_points ? leader().p_max : k * step(); }

  CapacityEvaluation capacity(double offer_qty) {
    const long key = std::lround(offer_qty * 1e6);
    if (auto it = cm_cache_.find(key); it != cm_cache_.end()) return it->second;
    auto bids = cm_.bids;
    bids[bid_index_].offer_price = opt_.truthful_cm_price ? cm_.bids[bid_index_].offer_price : 0.0;
    bids[bid_index_].offer_qty = offer_qty;
    const auto res = clear_greedy(bids, cm_.curve);
    CapacityEvaluation e{offer_qty, res.sold[bid_index_], res.price, res.price * res.sold[bid_index_] * cm_.days};
    cm_cache_.emplace(key, e);
    return e;
  }

  // cm_sold only splits the offered capacity; the dispatch depends on the total
  const EnergyEvaluation& energy(double cap, double bid) {
    const auto key = std::make_pair(std::lround(cap * 1e6), std::lround(bid * 1e6));
    if (auto it = em_cache_.find(key); it != em_cache_.end()) return it->second;
    auto offers = truthful_offers(net_);
    offers[leader_].capacity_from_cm = 0.0;
    offers[leader_].extra_capacity = cap;
    offers[leader_].bid_price = bid;
    EnergyEvaluation e;
    e.capacity = cap;
    e.bid_price = bid;
    e.result = dispatch(net_, ts_, offers, opt_.voll, opt_.lp);
    for (const HourlyDispatch& hd : e.result.hours) e.profit += detail::leader_hourly_profit(net_, hd, leader_, bid);
    return em_cache_.emplace(key, std::move(e)).first->second;
  }

  std::vector<double> bid_prices() const {
    std::vector<double> out{leader().var_cost};
    if (opt_.allow_price_bid) {
      for (std::size_t g = 0; g < net_.generators.size(); ++g)
        if (g != leader_ && net_.generators[g].dispatchable) out.push_back(net_.generators[g].var_cost);
      out.push_back(opt_.voll - opt_.price_cap_gap);
      std::sort(out.begin() + 1, out.end());
      out.erase(std::unique(out.begin() + 1, out.end()), out.end());
      out.erase(std::remove_if(out.begin() + 1, out.end(), [&](double c) { return c == out[0]; }), out.end());
    }
    return out;
  }

  struct Choice {
    JointStrategy s;
    double cm_revenue = 0.0;
    double em_profit = 0.0;
    double total() const { return cm_revenue + em_profit; }
  };

  // Best strategy with (include_cm) or without the capacity market in the
  // leader's objective. Ties keep the earlier candidate; the truthful point
  // (full capacity, cost-based bid, full capacity-market offer) comes first.
  Choice best(bool include_cm) {
    const double pmax = leader().p_max;
    const double qualified = qualified_capacity(leader());
    const auto prices = bid_prices();
    std::vector<double> caps;
    for (int k = opt_.grid_points; k >= 0; --k) caps.push_back(grid_value(k));

    std::optional<Choice> best;
    auto consider = [&](Choice c) {
      const double score = include_cm ? c.total() : c.em_profit;
      const double cur = best ? (include_cm ? best->total() : best->em_profit) : 0.0;
      if (!best || score > cur + 1e-9 * std::max(1.0, std::abs(cur))) best = c;
    };
    for (double c : prices) {
      for (double x : caps) {
        if (!include_cm) {
          Choice ch;
          ch.s = {0.0, 0.0, x, c, x};
          ch.em_profit = energy(x, c).profit;
          consider(ch);
          continue;
        }
        // capacity-market offers no larger than x, largest first
        std::vector<double> offers{std::min(x, qualified)};
        for (double h : caps)
          if (h < offers[0] - 1e-9) offers.push_back(h);
        for (double h : offers) {
          const CapacityEvaluation cm = capacity(h);
          const double extra = x - cm.sold;
          if (extra < -1e-9 || cm.sold + extra > pmax + 1e-9) continue;
          Choice ch;
          ch.s = {cm.offer_qty, cm.sold, std::max(0.0, extra), c, x};
          ch.cm_revenue = cm.revenue;
          ch.em_profit = energy(x, c).profit;
          consider(ch);
        }
      }
    }
    return *best;
  }

  Choice truthful() {
    Choice ch;
    const double pmax = leader().p_max;
    const CapacityEvaluation cm = capacity(qualified_capacity(leader()));
    ch.s = {cm.offer_qty, cm.sold, pmax - cm.sold, leader().var_cost, pmax};
    ch.cm_revenue = cm.revenue;
    ch.em_profit = energy(pmax, leader().var_cost).profit;
    return ch;
  }

  WithholdingReport withholding(const Choice& strategic) {
    WithholdingReport w;
    const Choice base = truthful();
    const Generator& g = leader();
    const std::size_t bus = net_.bus_index(g.zone);
    const auto& em0 = energy(base.s.em_capacity, base.s.em_bid_price).result;
    const auto& em1 = energy(strategic.s.em_capacity, strategic.s.em_bid_price).result;
    const double P = g.p_max, q = strategic.s.em_capacity;
    w.cm_price_truthful = capacity(qualified_capacity(g)).price;
    w.cm_price_strategic = capacity(strategic.s.cm_offer_qty).price;
    for (std::size_t k = 0; k < em0.hours.size(); ++k) {
      const double lam = em0.hours[k].lmp[bus], lam2 = em1.hours[k].lmp[bus];
      const bool t0 = lam > g.var_cost, t1 = lam2 > g.var_cost;
      if (t0) w.profitable_hours_truthful.push_back(em0.hours[k].hour);
      if (t1) w.profitable_hours_strategic.push_back(em1.hours[k].hour);
      if (lam2 < lam - 1e-9) w.lmp_nondecreasing = false;
      if (t1 && !t0) w.gain += (lam2 - g.var_cost) * q;
      if (t0) {
        w.gain += (lam2 - lam) * q;
        w.loss_no_cm += (lam - g.var_cost) * (P - q);
      }
    }
    const double cm_gap = qualified_capacity(g) - strategic.s.cm_sold;
    w.loss = w.cm_price_truthful * cm_gap * cm_.days + w.loss_no_cm;
    w.profit_truthful = base.total();
    w.profit_strategic = strategic.total();
    w.assumptions_hold = strategic.s.em_extra <= 1e-9 && std::abs(w.cm_price_strategic - w.cm_price_truthful) <= 1e-9;
    w.identity_residual = (w.profit_strategic - w.profit_truthful) - (w.gain - w.loss);
    return w;
  }

  std::size_t energy_evaluations() const { return em_cache_.size(); }

 private:
  const SystemNetwork& net_;
  const TimeSeries& ts_;
  CapacitySide cm_;
  std::size_t leader_;
  JointOptions opt_;
  std::size_t bid_index_ = 0;
  std::map<long, CapacityEvaluation> cm_cache_;
  std::map<std::pair<long, long>, EnergyEvaluation> em_cache_;
};

struct JointResult {
  JointStrategy strategy;
  double profit = 0.0;
  double cm_revenue = 0.0;
  double em_profit = 0.0;
  WithholdingReport withholding;
};

/// Truthful capacity side built from a net-CONE table: every generator
/// offers (W_g, qualified capacity); the curve is anchored at the peaker.
inline CapacitySide capacity_side(const SystemNetwork& net, const NetConeTable& cones, double d_peak,
                                  double reserve_margin = 0.2070, double translation_factor = 0.0856,
                                  double f_excess = 0.18, double full_output_hours = 24.0) {
  CapacitySide side;
  side.bids = truthful_bids(net.generators, cones.net_cone);
  side.curve = build_demand_curve(cones.c_cone, d_peak, reserve_margin, translation_factor, f_excess,
                                  peaker_levelized_cost(net.generators[cones.peaker], full_output_hours));
  side.days = cones.days;
  return side;
}

inline JointResult best_joint_strategy(const std::string& leader_id, const SystemNetwork& net, const TimeSeries& ts,
                                       const CapacitySide& cm, const JointOptions& opt = {}) {
  JointMarket jm(net, ts, cm, net.generator_index(leader_id), opt);
  const auto choice = jm.best(true);
  JointResult r;
  r.strategy = choice.s;
  r.cm_revenue = choice.cm_revenue;
  r.em_profit = choice.em_profit;
  r.profit = choice.total();
  r.withholding = jm.withholding(choice);
  return r;
}

struct SettingsRow {
  std::string leader;
  std::string fuel;
  double demand_scale = 1.0;
  double congestion_scale = 1.0;
  double em_both = 0.0;   // leader energy profit, strategic with both markets
  double em_no_cm = 0.0;  // strategic, energy market only
  double em_true = 0.0;   // truthful
  double both_vs_no_cm = 0.0;
  double both_vs_true = 0.0;
  JointStrategy both, no_cm;
  WithholdingReport withholding;
};

/// One cell of the settings comparison. Net CONEs come from the unscaled
/// scenario and stay fixed; the capacity requirement follows the scaled
/// peak load; congestion scaling applies to the energy market only.
inline SettingsRow compare_settings(const std::string& leader_id, const SystemNetwork& net, const TimeSeries& ts,
                                    const NetConeTable& base_cones, double demand_scale, double congestion_scale,
                                    const JointOptions& opt = {}, double reserve_margin = 0.2070,
                                    double translation_factor = 0.0856, double f_excess = 0.18) {
  if (!(demand_scale > 0.0) || !(congestion_scale > 0.0))
    throw ValidationError("demand and congestion scales must be > 0");
  const TimeSeries scaled = ts.scaled_loads(demand_scale);
  const SystemNetwork tight = scaled_line_limits(net, congestion_scale);
  const CapacitySide cm =
      capacity_side(net, base_cones, scaled.peak_system_load(), reserve_margin, translation_factor, f_excess);
  JointMarket jm(tight, scaled, cm, net.generator_index(leader_id), opt);
  const auto both = jm.best(true);
  const auto no_cm = jm.best(false);
  const auto truth = jm.truthful();

  SettingsRow row;
  row.leader = leader_id;
  row.fuel = net.generators[net.generator_index(leader_id)].fuel;
  row.demand_scale = demand_scale;
  row.congestion_scale = congestion_scale;
  row.em_both = both.em_profit;
  row.em_no_cm = no_cm.em_profit;
  row.em_true = truth.em_profit;
  row.both_vs_no_cm = both.em_profit - no_cm.em_profit;
  row.both_vs_true = both.em_profit - truth.em_profit;
  row.both = both.s;
  row.no_cm = no_cm.s;
  row.withholding = jm.withholding(both);
  return row;
}

}  // namespace capmkt
