// capmkt: command-line front end.
// Exit codes: 0 success, 1 validation or computation failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "capmkt/capmkt.hpp"

namespace fs = std::filesystem;
using namespace capmkt;

namespace {

void setup_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("CAPMKT_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

std::vector<CapacityBid> load_bids(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_id = t.column("generator_id"), c_w = t.column("offer_price"), c_h = t.column("offer_qty");
  std::vector<CapacityBid> bids;
  for (std::size_t r = 0; r < t.rows.size(); ++r) bids.push_back({t.text(r, c_id), t.number(r, c_w), t.number(r, c_h)});
  validate_bids(bids);
  return bids;
}

// "0.6..1.2" with a step, or a comma list
std::vector<double> parse_scales(const std::string& text, double step) {
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = parse_double(text.substr(0, dots)), hi = parse_double(text.substr(dots + 2));
    if (!lo || !hi) throw ValidationError("bad range '" + text + "'");
    return scale_range(*lo, *hi, step);
  }
  std::vector<double> out;
  for (const auto& item : detail::split_list(text)) {
    const auto v = parse_double(item);
    if (!v || !(*v > 0)) throw ValidationError("bad scale '" + item + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw ValidationError("empty scale list");
  return out;
}

std::string congestion_label(double s) {
  if (s == 1.0) return "normal";
  if (std::abs(s - kHighCongestion) < 1e-12) return "high";
  return format_double(s);
}

void add_clearing_table(RunReport& rep, const std::vector<CapacityBid>& bids, const ClearingResult& res) {
  auto& t = rep.table("clearing", {"generator", "offer_price", "offer_qty", "sold", "revenue"});
  for (std::size_t i = 0; i < bids.size(); ++i)
    t.add({bids[i].generator_id, bids[i].offer_price, bids[i].offer_qty, res.sold[i], res.price * res.sold[i]});
}

struct Common {
  std::string scenario = "data/scenario.cfg";
  std::string out;
  bool no_json = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("-s,--scenario", scenario, "scenario config file");
    cmd->add_option("-o,--out", out, "directory for report files");
    cmd->add_flag("--no-json", no_json, "write CSV tables only");
  }

  Scenario load() const {
    spdlog::info("loading scenario {}", scenario);
    return load_scenario(scenario);
  }

  void emit(RunReport& rep, const Scenario* sc) const {
    if (out.empty()) return;
    if (sc) {
      std::istringstream in(sc->config.serialize());
      std::string line;
      while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        rep.scenario.emplace_back(line.substr(0, eq), line.substr(eq + 3));
      }
    }
    EmitFormats f;
    f.json = !no_json;
    for (const auto& p : emit_report(rep, out, f)) spdlog::info("wrote {}", p.string());
    std::cout << "report written to " << out << "\n";
  }
};

int cmd_clear(const std::string& bids_path, std::optional<double> slope, std::optional<double> pi_max,
              std::optional<double> c_cone, std::optional<double> d_peak, const Common& io) {
  const auto bids = load_bids(bids_path);
  DemandCurve curve;
  if (slope && pi_max) {
    curve = DemandCurve::from_line(*slope, *pi_max);
  } else if (c_cone && d_peak) {
    curve = build_demand_curve(*c_cone, *d_peak, 0.2070, 0.0856, 0.18, *c_cone);
  } else {
    throw CLI::ValidationError("clear", "give --slope and --pi-max, or --c-cone and --d-peak");
  }
  const auto cmp = compare_clearing_paths(bids, curve);
  const auto& g = cmp.greedy;
  const bool agree = cmp.agree;

  std::cout << "status: " << to_string(g.status) << "\n";
  std::cout << "pi* = " << format_double(g.price) << "\n";
  std::cout << "r* = " << format_double(g.quantity) << "\n";
  if (g.marginal) std::cout << "marginal: " << bids[*g.marginal].generator_id << "\n";
  for (std::size_t i = 0; i < bids.size(); ++i)
    std::cout << "  " << bids[i].generator_id << " sold " << format_double(g.sold[i]) << "\n";
  std::cout << "paths agree: " << (agree ? "yes" : "no") << "\n";

  RunReport rep;
  add_clearing_table(rep, bids, g);
  auto& s = rep.table("clearing_summary", {"status", "price", "quantity", "paths_agree"});
  s.add({to_string(g.status), g.price, g.quantity, agree});
  io.emit(rep, nullptr);
  return agree ? 0 : 1;
}

int cmd_dispatch(const Common& io, const std::string& lp_dir) {
  const Scenario sc = io.load();
  // the config's demand and congestion scales apply here
  const SystemNetwork net = scaled_line_limits(sc.network, sc.config.congestion_scale);
  const TimeSeries ts = sc.series.scaled_loads(sc.config.demand_scale);
  const auto offers = truthful_offers(net);
  if (!lp_dir.empty()) {
    fs::create_directories(lp_dir);
    for (std::size_t k = 0; k < ts.horizon(); ++k) {
      const auto inst = build_hourly_lp(net, ts, offers, k, sc.config.voll);
      const fs::path p = fs::path(lp_dir) / ("hour_" + std::to_string(ts.hours[k]) + ".lp");
      std::ofstream out(p);
      if (!out) throw ComputationError(p.string() + ": cannot open for writing");
      write_lp_format(out, inst.lp, "dispatch hour " + std::to_string(ts.hours[k]));
    }
  }
  const auto em = dispatch(net, ts, offers, sc.config.voll, lp_options(sc.config));
  RunReport rep;
  add_dispatch_tables(rep, net, em);
  double kkt = 0.0;
  for (const auto& hd : em.hours) kkt = std::max(kkt, hd.kkt.max());

  double shed = 0.0;
  for (double s : em.shed_energy) shed += s;
  std::cout << "hours: " << em.hours.size() << "\n";
  std::cout << "total cost: " << format_double(em.total_cost) << "\n";
  std::cout << "shed energy (MWh): " << format_double(shed) << "\n";
  std::cout << "max KKT residual: " << format_double(kkt) << "\n";
  io.emit(rep, &sc);
  return kkt <= 1e-6 ? 0 : 1;
}

int cmd_netcone(const Common& io) {
  const Scenario sc = io.load();
  const auto& net = sc.network;
  const NetConeTable cones = scenario_net_cones(sc);
  const CapacitySide side = scenario_capacity_side(sc, cones, sc.config.demand_scale);
  const auto res = clear_greedy(side.bids, side.curve);

  RunReport rep;
  auto& t = rep.table("net_cone",
                      {"generator", "fuel", "invest_cost", "energy_profit", "net_cone", "qualified_mw", "reached_capacity"});
  std::cout << "generator      fuel      invest      W_g    qualified  full\n";
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    const Generator& gen = net.generators[g];
    t.add({gen.id, gen.fuel, gen.invest_cost, cones.energy_profit[g], cones.net_cone[g], qualified_capacity(gen),
           static_cast<bool>(cones.reached_capacity[g])});
    std::cout << fmt::format("{:<14} {:<8} {:>9.2f} {:>9.2f} {:>10.1f}  {}{}\n", gen.id, gen.fuel, gen.invest_cost,
                             cones.net_cone[g], qualified_capacity(gen), cones.reached_capacity[g] ? "yes" : "no",
                             gen.dispatchable && !cones.reached_capacity[g] && cones.net_cone[g] == gen.invest_cost
                                 ? "   (W = invest)"
                                 : "");
  }
  const auto& c = side.curve;
  auto& dc = rep.table("demand_curve", {"c_cone", "peaker", "d_peak", "q_cap", "q_zero", "a_slope", "pi_max", "p1"});
  dc.add({c.c_cone, net.generators[cones.peaker].id, c.d_peak, c.q_cap, c.q_zero, c.a_slope, c.pi_max, c.p1});
  add_clearing_table(rep, side.bids, res);
  std::cout << "peaker: " << net.generators[cones.peaker].id << " C_CONE = " << format_double(c.c_cone) << "\n";
  std::cout << "curve: Q_cap = " << format_double(c.q_cap) << ", A = " << format_double(c.a_slope)
            << ", Pi_max = " << format_double(c.pi_max) << "\n";
  std::cout << "capacity market: " << to_string(res.status) << ", price " << format_double(res.price) << ", quantity "
            << format_double(res.quantity) << "\n";
  io.emit(rep, &sc);
  return 0;
}

int cmd_strategic_cm(const Common& io, std::string leader, double step) {
  const Scenario sc = io.load();
  if (leader.empty()) leader = sc.config.leader;
  if (leader.empty()) throw CLI::ValidationError("strategic-cm", "--leader is required (or leader in the config)");
  if (step <= 0) step = sc.config.oracle_step;
  const NetConeTable cones = scenario_net_cones(sc);
  const CapacitySide side = scenario_capacity_side(sc, cones, sc.config.demand_scale);
  const auto best = best_cm_bid(leader, side.bids, side.curve);
  const auto oracle = cm_bid_oracle(leader, side.bids, side.curve, step);
  const double slack = oracle_slack(side.bids, side.curve, leader, step);
  const auto impact = market_power_impact(side.bids, side.curve, best);
  const bool within = best.leader_revenue >= oracle.leader_revenue - 1e-9 &&
                      best.leader_revenue <= oracle.leader_revenue + slack;

  std::cout << "leader " << leader << ": best bid " << format_double(best.offer_price) << " (" << to_string(best.kind)
            << "), revenue " << format_double(best.leader_revenue) << "\n";
  std::cout << "oracle (step " << format_double(step) << "): bid " << format_double(oracle.offer_price) << ", revenue "
            << format_double(oracle.leader_revenue) << ", slack " << format_double(slack) << "\n";
  std::cout << "price change " << format_double(impact.price_delta) << ", consumer surplus change "
            << format_double(impact.consumer_surplus_delta) << ", comonotone " << (impact.comonotone ? "yes" : "no")
            << "\n";
  std::cout << "enumeration within oracle slack: " << (within ? "yes" : "no") << "\n";

  RunReport rep;
  auto& s = rep.table("strategic_cm", {"leader", "kind", "offer_price", "offer_qty", "leader_revenue", "clearing_price",
                                       "oracle_price", "oracle_revenue", "oracle_slack", "price_delta",
                                       "consumer_surplus_delta", "comonotone"});
  s.add({leader, to_string(best.kind), best.offer_price, best.offer_qty, best.leader_revenue, best.clearing.price,
         oracle.offer_price, oracle.leader_revenue, slack, impact.price_delta, impact.consumer_surplus_delta,
         impact.comonotone});
  auto& r = rep.table("revenue_delta", {"generator", "delta"});
  for (std::size_t i = 0; i < side.bids.size(); ++i) r.add({side.bids[i].generator_id, impact.revenue_delta[i]});
  io.emit(rep, &sc);
  return within && impact.comonotone ? 0 : 1;
}

void add_withholding(ReportTable& t, const std::string& leader, double d, double cong, const WithholdingReport& w) {
  t.add({leader, d, congestion_label(cong), w.gain, w.loss, w.loss_no_cm, w.profit_truthful, w.profit_strategic,
         w.cm_price_truthful, w.cm_price_strategic, w.assumptions_hold, w.lmp_nondecreasing, w.identity_residual});
}

const std::vector<std::string> kWithholdingColumns{
    "leader", "demand_scale", "congestion", "gain", "loss", "loss_no_cm", "profit_truthful", "profit_strategic",
    "cm_price_truthful", "cm_price_strategic", "assumptions_hold", "lmp_nondecreasing", "identity_residual"};

int cmd_strategic_joint(const Common& io, std::string leader, std::optional<double> demand,
                        std::optional<double> congestion) {
  Scenario sc = io.load();
  if (leader.empty()) leader = sc.config.leader;
  if (leader.empty()) throw CLI::ValidationError("strategic-joint", "--leader is required (or leader in the config)");
  const double d = demand.value_or(sc.config.demand_scale), cong = congestion.value_or(sc.config.congestion_scale);
  const NetConeTable cones = scenario_net_cones(sc);
  const TimeSeries ts = sc.series.scaled_loads(d);
  const SystemNetwork net = scaled_line_limits(sc.network, cong);
  const CapacitySide side = scenario_capacity_side(sc, cones, d);
  const auto r = best_joint_strategy(leader, net, ts, side, joint_options(sc.config));
  const auto& w = r.withholding;
  std::cout << "leader " << leader << " at demand " << format_double(d) << ", congestion " << congestion_label(cong)
            << "\n";
  std::cout << "capacity offer " << format_double(r.strategy.cm_offer_qty) << " MW (sold "
            << format_double(r.strategy.cm_sold) << "), energy capacity " << format_double(r.strategy.em_capacity)
            << " MW, extra " << format_double(r.strategy.em_extra) << " MW, bid "
            << format_double(r.strategy.em_bid_price) << "\n";
  std::cout << "profit " << format_double(r.profit) << " (capacity " << format_double(r.cm_revenue) << ", energy "
            << format_double(r.em_profit) << "), truthful " << format_double(w.profit_truthful) << "\n";
  std::cout << "gain " << format_double(w.gain) << ", loss " << format_double(w.loss) << ", loss without capacity market "
            << format_double(w.loss_no_cm) << ", identity residual " << format_double(w.identity_residual) << "\n";
  std::cout << "extra capacity 0 and capacity price unchanged: " << (w.assumptions_hold ? "yes" : "no") << "\n";

  RunReport rep;
  auto& t = rep.table("joint_strategy", {"leader", "cm_offer_qty", "cm_sold", "em_capacity", "em_extra", "em_bid_price",
                                         "profit", "cm_revenue", "em_profit"});
  t.add({leader, r.strategy.cm_offer_qty, r.strategy.cm_sold, r.strategy.em_capacity, r.strategy.em_extra,
         r.strategy.em_bid_price, r.profit, r.cm_revenue, r.em_profit});
  add_withholding(rep.table("withholding", kWithholdingColumns), leader, d, cong, w);
  io.emit(rep, &sc);
  return 0;
}

int cmd_compare(const Common& io, std::vector<std::string> leaders, const std::string& demand, double step,
                const std::string& congestion) {
  const Scenario sc = io.load();
  if (leaders.empty()) leaders = sc.config.leaders;
  if (leaders.empty() && !sc.config.leader.empty()) leaders = {sc.config.leader};
  if (leaders.empty()) throw CLI::ValidationError("compare", "no leaders given");
  SweepOptions opt;
  opt.leaders = leaders;
  opt.demand_scales = parse_scales(demand, step);
  opt.congestion_scales.clear();
  for (const auto& item : detail::split_list(congestion)) {
    if (item == "normal") opt.congestion_scales.push_back(1.0);
    else if (item == "high") opt.congestion_scales.push_back(kHighCongestion);
    else if (auto v = parse_double(item); v && *v > 0) opt.congestion_scales.push_back(*v);
    else throw ValidationError("bad congestion level '" + item + "'");
  }
  const auto rows = sweep_settings(sc, opt, [](const SettingsRow& r) {
    spdlog::info("{} demand {} congestion {}: both-noCM {} both-true {}", r.leader, r.demand_scale,
                 congestion_label(r.congestion_scale), r.both_vs_no_cm, r.both_vs_true);
  });

  RunReport rep;
  // wide layout: one row per leader and demand level, a column pair per congestion level
  std::vector<std::string> cols{"leader", "fuel", "demand_pct"};
  for (double c : opt.congestion_scales) {
    cols.push_back(congestion_label(c) + "_both_vs_no_cm");
    cols.push_back(congestion_label(c) + "_both_vs_true");
  }
  auto& wide = rep.table("compare", cols);
  auto& detail = rep.table("compare_detail",
                           {"leader", "fuel", "demand_scale", "congestion", "em_both", "em_no_cm", "em_true",
                            "both_vs_no_cm", "both_vs_true", "both_em_capacity", "both_cm_offer", "no_cm_em_capacity"});
  auto& wh = rep.table("withholding", kWithholdingColumns);
  const std::size_t nd = opt.demand_scales.size(), nc = opt.congestion_scales.size();
  std::cout << fmt::format("{:<10} {:>6}", "leader", "demand");
  for (double c : opt.congestion_scales) std::cout << fmt::format(" | {:>8} {:>14} {:>14}", congestion_label(c), "both-noCM", "both-true");
  std::cout << "\n";
  for (std::size_t li = 0; li < leaders.size(); ++li)
    for (std::size_t di = 0; di < nd; ++di) {
      const SettingsRow& first = rows[li * nc * nd + di];
      std::vector<ReportTable::Cell> cells{first.leader, first.fuel, std::round(first.demand_scale * 1000) / 10};
      std::cout << fmt::format("{:<10} {:>5.0f}%", first.fuel, first.demand_scale * 100);
      for (std::size_t ci = 0; ci < nc; ++ci) {
        const SettingsRow& r = rows[li * nc * nd + ci * nd + di];
        cells.emplace_back(r.both_vs_no_cm);
        cells.emplace_back(r.both_vs_true);
        std::cout << fmt::format(" | {:>8} {:>14.1f} {:>14.1f}", "", r.both_vs_no_cm, r.both_vs_true);
      }
      std::cout << "\n";
      wide.add(std::move(cells));
    }
  for (const auto& r : rows) {
    detail.add({r.leader, r.fuel, r.demand_scale, congestion_label(r.congestion_scale), r.em_both, r.em_no_cm,
                r.em_true, r.both_vs_no_cm, r.both_vs_true, r.both.em_capacity, r.both.cm_offer_qty,
                r.no_cm.em_capacity});
    add_withholding(wh, r.leader, r.demand_scale, r.congestion_scale, r.withholding);
  }
  bool signs = true;
  for (double c : opt.congestion_scales) {
    int nonzero = 0;
    for (const auto& r : rows)
      if (r.congestion_scale == c && nonzero_difference(r.both_vs_no_cm)) ++nonzero;
    std::cout << congestion_label(c) << " congestion: " << nonzero << " nonzero both-vs-noCM cells\n";
  }
  for (const auto& r : rows) signs = signs && r.both_vs_no_cm <= 1e-9 && r.both_vs_true >= -1e-9;
  std::cout << "sign pattern holds: " << (signs ? "yes" : "no") << "\n";
  io.emit(rep, &sc);
  return signs ? 0 : 1;
}

int cmd_validate(const Common& io) {
  const Scenario sc = io.load();
  std::cout << "scenario: " << sc.network.buses.size() << " buses, " << sc.network.lines.size() << " lines, "
            << sc.network.generators.size() << " generators, " << sc.series.horizon() << " hours\n";
  const auto checks = validate_scenario(sc);
  RunReport rep;
  auto& t = rep.table("validation", {"check", "passed", "detail"});
  bool all = true;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    t.add({c.name, c.passed, c.detail});
    all = all && c.passed;
  }
  io.emit(rep, &sc);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Capacity and energy market analytics"};
  app.require_subcommand(1);

  Common io;
  std::string bids_path;
  std::optional<double> slope, pi_max, c_cone, d_peak;
  auto* clear = app.add_subcommand("clear", "clear a capacity auction three ways and compare");
  clear->add_option("--bids", bids_path, "CSV with generator_id,offer_price,offer_qty")->required();
  clear->add_option("--slope", slope, "demand slope A");
  clear->add_option("--pi-max", pi_max, "demand intercept");
  clear->add_option("--c-cone", c_cone, "reference price (alternative to slope/intercept)");
  clear->add_option("--d-peak", d_peak, "peak load for the reference curve");
  clear->add_option("-o,--out", io.out, "directory for report files");

  std::string lp_dir;
  auto* disp = app.add_subcommand("dispatch", "24-hour network dispatch with prices");
  io.attach(disp);
  disp->add_option("--lp-dir", lp_dir, "also write each hourly LP in LP format here");

  auto* netcone = app.add_subcommand("netcone", "net CONE table, demand curve and capacity clearing");
  io.attach(netcone);

  std::string leader;
  double step = 0.0;
  auto* scm = app.add_subcommand("strategic-cm", "best capacity bid of one leader, checked against a price grid");
  io.attach(scm);
  scm->add_option("--leader", leader, "leader generator id");
  scm->add_option("--step", step, "oracle price step (default from config)");

  std::optional<double> demand_one, cong_one;
  auto* sj = app.add_subcommand("strategic-joint", "joint capacity and energy strategy of one leader");
  io.attach(sj);
  sj->add_option("--leader", leader, "leader generator id");
  sj->add_option("--demand", demand_one, "demand scale");
  sj->add_option("--congestion", cong_one, "line-limit scale");

  std::vector<std::string> leaders;
  std::string demand = "0.6..1.2", congestion = "normal,high";
  double dstep = 0.1;
  auto* cmp = app.add_subcommand("compare", "settings sweep over demand and congestion levels");
  io.attach(cmp);
  cmp->add_option("--leaders", leaders, "leader generator ids (default from config)")->delimiter(',');
  cmp->add_option("--demand", demand, "demand scales: lo..hi or a comma list");
  cmp->add_option("--step", dstep, "step for a lo..hi demand range");
  cmp->add_option("--congestion", congestion, "congestion levels: normal, high or line-limit scales");

  auto* val = app.add_subcommand("validate", "run the invariant suite on a scenario");
  io.attach(val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*clear) return cmd_clear(bids_path, slope, pi_max, c_cone, d_peak, io);
    if (*disp) return cmd_dispatch(io, lp_dir);
    if (*netcone) return cmd_netcone(io);
    if (*scm) return cmd_strategic_cm(io, leader, step);
    if (*sj) return cmd_strategic_joint(io, leader, demand_one, cong_one);
    if (*cmp) return cmd_compare(io, leaders, demand, dstep, congestion);
    if (*val) return cmd_validate(io);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
