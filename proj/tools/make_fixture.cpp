// Writes the bundled 12-zone fixture (generators, lines, loads, capacity
// factors, scenario.cfg) into a directory. Deterministic for a given seed:
// draws use mt19937_64 words mapped to [0, 1) by hand so the output does not
// depend on the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capmkt/energy.hpp"
#include "capmkt/io.hpp"

namespace fs = std::filesystem;
using namespace capmkt;

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * u(); }
  int pick(int lo, int hi) { return lo + static_cast<int>(u() * (hi - lo + 1)); }
};

double round_to(double v, double step) { return std::round(v / step) * step; }

// Leaders: variable cost, net CONE target and capacity are fixed inputs.
struct LeaderSpec {
  const char* id;
  const char* zone;
  const char* fuel;
  double var_cost, net_cone, p_max;
};

constexpr LeaderSpec kLeaders[] = {
    {"NG_G", "G", "NG", 21.1, 199.6, 621.0},        {"COAL_H", "H", "Coal", 13.1, 540.2, 655.1},
    {"NUC_I", "I", "Nuclear", 4.1, 810.6, 1299.0},  {"RFO_J", "J", "RFO", 67.6, 1246.5, 901.8},
    {"HYDRO_K", "K", "Hydro", 14.9, 420.9, 250.0},  {"WOOD_L", "L", "Wood", 35.0, 752.1, 42.1},
};
constexpr double kLeaderWindPmax = 149.58;  // 0.24 x 149.58 = 35.9 MW qualified

// Zone peak loads (MW) and the number of extra units per zone. A-F form a
// meshed core; G-L are pockets hanging off it, one leader each.
struct ZoneSpec {
  const char* id;
  double peak;
  int units;
  double unit_lo, unit_hi;  // extra unit size range, MW
};

constexpr ZoneSpec kZones[] = {
    {"A", 1700, 7, 180, 480}, {"B", 1500, 7, 180, 460}, {"C", 1300, 7, 160, 440}, {"D", 1600, 7, 180, 480},
    {"E", 1200, 7, 160, 420}, {"F", 1400, 7, 160, 440}, {"G", 980, 2, 40, 90},    {"H", 860, 2, 40, 90},
    {"I", 420, 2, 30, 70},    {"J", 900, 2, 60, 110},   {"K", 420, 2, 30, 60},    {"L", 160, 2, 20, 40},
};

// from, to, limit (MW). Core ring, one radial feeder per pocket, one tie G-H.
struct LineSpec {
  const char* from;
  const char* to;
  double limit;
};

constexpr LineSpec kLines[] = {
    {"A", "B", 1600}, {"B", "C", 1600}, {"C", "D", 1600}, {"D", "E", 1600}, {"E", "F", 1600},
    {"F", "A", 1600}, {"A", "G", 520},  {"B", "H", 380},  {"C", "I", 1250},  {"D", "J", 600},
    {"E", "K", 260},  {"F", "L", 150},  {"G", "H", 400},
};

struct FuelBand {
  const char* fuel;
  double cost_lo, cost_hi;
};

constexpr FuelBand kFuels[] = {
    {"Coal", 11.0, 24.0}, {"NG", 19.0, 48.0}, {"NG", 25.0, 55.0}, {"Oil", 48.0, 66.0}, {"Hydro", 3.0, 16.0},
};

double load_shape(int hour) {
  // trough overnight, peak at 17:00
  const double x = (hour - 17) / 5.5;
  return 0.6 + 0.4 * std::exp(-x * x);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ComputationError(p.string() + ": cannot open for writing");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic 12-zone fixture"};
  std::string out_dir = "data";
  std::uint64_t seed = 20240611ULL;
  app.add_option("-o,--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  CLI11_PARSE(app, argc, argv);

  try {
    Rng rng(seed);
    SystemNetwork net;
    for (const ZoneSpec& z : kZones) net.buses.push_back(z.id);
    for (const LineSpec& l : kLines) {
      const double b = round_to(rng.range(8.0, 20.0), 0.01);
      net.lines.push_back({l.from, l.to, b, -l.limit, l.limit});
    }

    for (const LeaderSpec& l : kLeaders) net.generators.push_back({l.id, l.zone, l.fuel, l.p_max, l.var_cost, 0.0, 1.0, true});
    net.generators.push_back({"WIND_B", "B", "Wind", kLeaderWindPmax, 0.0, 0.0, 0.24, false});

    std::vector<std::size_t> winds{net.generators.size() - 1};
    for (const ZoneSpec& z : kZones) {
      for (int k = 0; k < z.units; ++k) {
        const FuelBand& f = kFuels[rng.pick(0, 4)];
        Generator g;
        g.id = std::string(z.id) + std::to_string(k + 1);
        g.zone = z.id;
        g.fuel = f.fuel;
        g.p_max = round_to(rng.range(z.unit_lo, z.unit_hi), 0.1);
        g.var_cost = round_to(rng.range(f.cost_lo, f.cost_hi), 0.01);
        g.invest_cost = round_to(rng.range(60.0, 1100.0), 0.01);
        g.unforced_pct = round_to(rng.range(0.85, 1.0), 0.001);
        net.generators.push_back(g);
      }
    }
    for (const char* z : {"A", "D", "F"}) {
      net.generators.push_back({std::string("WIND_") + z, z, "Wind", round_to(rng.range(100, 250), 0.1), 0.0,
                                round_to(rng.range(5.0, 30.0), 0.01), 0.24, false});
      winds.push_back(net.generators.size() - 1);
    }

    TimeSeries ts;
    for (int h = 1; h <= 24; ++h) ts.hours.push_back(h);
    for (const ZoneSpec& z : kZones) {
      std::vector<double> row;
      for (int h = 1; h <= 24; ++h) row.push_back(round_to(z.peak * load_shape(h) * rng.range(0.97, 1.03), 0.1));
      ts.loads.push_back(row);
    }
    ts.capacity_factors.assign(net.generators.size(), {});
    for (std::size_t w : winds) {
      const double phase = rng.range(0.0, 6.283);
      for (int h = 1; h <= 24; ++h) {
        const double cf = 0.4 + 0.25 * std::sin(h * 0.2618 + phase) + rng.range(-0.08, 0.08);
        ts.capacity_factors[w].push_back(round_to(std::clamp(cf, 0.02, 0.95), 0.001));
      }
    }

    // back out investment costs from the truthful dispatch so the leaders'
    // net CONEs equal their targets; wind earns more than it invests
    const auto base = dispatch(net, ts, truthful_offers(net));
    const double days = ts.horizon() / 24.0;
    for (std::size_t i = 0; i < std::size(kLeaders); ++i) {
      Generator& g = net.generators[i];
      g.invest_cost = kLeaders[i].net_cone + base.profit[i] / (g.p_max * days);
    }
    for (std::size_t w : winds) {
      Generator& g = net.generators[w];
      const double per_mw_day = base.profit[w] / (g.p_max * days);
      g.invest_cost = std::min(g.invest_cost, round_to(0.5 * per_mw_day, 0.01));
    }
    net.validate();
    ts.validate(net);

    fs::create_directories(out_dir);
    std::ostringstream gens, lines, loads, cfs;
    gens << "id,zone,fuel,p_max_mw,var_cost_usd_per_mwh,invest_cost_usd_per_mw_day,unforced_pct,dispatchable\n";
    for (const Generator& g : net.generators) {
      gens << g.id << "," << g.zone << "," << g.fuel << "," << format_double(g.p_max) << ","
           << format_double(g.var_cost) << "," << format_double(g.invest_cost) << ",";
      if (!(g.fuel == "Wind")) gens << format_double(g.unforced_pct);
      gens << "," << (g.dispatchable ? "true" : "false") << "\n";
    }
    lines << "from,to,susceptance,f_min_mw,f_max_mw\n";
    for (const Line& l : net.lines)
      lines << l.from << "," << l.to << "," << format_double(l.susceptance) << "," << format_double(l.f_min) << ","
            << format_double(l.f_max) << "\n";
    loads << "zone,hour,mw\n";
    for (std::size_t b = 0; b < net.buses.size(); ++b)
      for (std::size_t k = 0; k < ts.horizon(); ++k)
        loads << net.buses[b] << "," << ts.hours[k] << "," << format_double(ts.loads[b][k]) << "\n";
    cfs << "generator,hour,cf\n";
    for (std::size_t w : winds)
      for (std::size_t k = 0; k < ts.horizon(); ++k)
        cfs << net.generators[w].id << "," << ts.hours[k] << "," << format_double(ts.capacity_factors[w][k]) << "\n";

    write_file(fs::path(out_dir) / "generators.csv", gens.str());
    write_file(fs::path(out_dir) / "lines.csv", lines.str());
    write_file(fs::path(out_dir) / "loads.csv", loads.str());
    write_file(fs::path(out_dir) / "capacity_factors.csv", cfs.str());

    ScenarioConfig cfg;
    cfg.seed = seed;
    cfg.leader = kLeaders[0].id;
    for (const LeaderSpec& l : kLeaders) cfg.leaders.push_back(l.id);
    write_file(fs::path(out_dir) / "scenario.cfg",
               "# synthetic 12-zone fixture, generated by make_fixture --seed " + std::to_string(seed) + "\n" +
                   cfg.serialize());
    std::cout << "wrote fixture to " << out_dir << " (" << net.generators.size() << " generators)\n";
  } catch (const std::exception& e) {
    std::cerr << "make_fixture: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
