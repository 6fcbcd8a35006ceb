#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "capmkt/error.hpp"
#include "capmkt/model.hpp"

namespace capmkt {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// numbers

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// CSV

/// Header-addressed CSV table. Rows are 1-based in messages, counting the
/// header as row 1, so they match what an editor shows.
struct CsvTable {
  std::string path;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ValidationError(path + ": missing column '" + name + "'");
  }
  std::optional<std::size_t> find_column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
  std::string where(std::size_t r, std::size_t c) const {
    return path + ": row " + std::to_string(r + 2) + ", column '" + header[c] + "'";
  }
  const std::string& text(std::size_t r, std::size_t c) const { return rows[r][c]; }
  double number(std::size_t r, std::size_t c) const {
    if (auto v = parse_double(rows[r][c])) return *v;
    throw ValidationError(where(r, c) + ": '" + rows[r][c] + "' is not a number");
  }
};

namespace detail {

inline std::string trim(std::string s) {
  auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// comma-separated list, blanks dropped
inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  return out + "\"";
}

}  // namespace detail

inline CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open file");
  CsvTable t;
  t.path = path.string();
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (!have_header) {
      if (!cells.empty() && cells[0].rfind("\xEF\xBB\xBF", 0) == 0) cells[0].erase(0, 3);
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw ValidationError(t.path + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw ValidationError(t.path + ": empty file (header required)");
  return t;
}

// ---------------------------------------------------------------------------
// scenario files

inline bool parse_flag(const std::string& raw, const std::string& where) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  throw ValidationError(where + ": '" + raw + "' is not a boolean");
}

inline bool is_wind_fuel(std::string fuel) {
  std::transform(fuel.begin(), fuel.end(), fuel.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return fuel == "wind";
}

inline constexpr double kWindUnforced = 0.24;

// generators.csv: id,zone,fuel,p_max_mw,var_cost_usd_per_mwh,
// invest_cost_usd_per_mw_day,unforced_pct,dispatchable
// An empty unforced_pct means 0.24 for wind and 1 otherwise.
inline std::vector<Generator> load_generators(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_id = t.column("id"), c_zone = t.column("zone"), c_fuel = t.column("fuel"),
             c_pmax = t.column("p_max_mw"), c_cv = t.column("var_cost_usd_per_mwh"),
             c_inv = t.column("invest_cost_usd_per_mw_day"), c_fu = t.column("unforced_pct"),
             c_disp = t.column("dispatchable");
  std::vector<Generator> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Generator g;
    g.id = t.text(r, c_id);
    if (g.id.empty()) throw ValidationError(t.where(r, c_id) + ": empty id");
    g.zone = t.text(r, c_zone);
    g.fuel = t.text(r, c_fuel);
    g.p_max = t.number(r, c_pmax);
    g.var_cost = t.number(r, c_cv);
    g.invest_cost = t.number(r, c_inv);
    g.unforced_pct = t.text(r, c_fu).empty() ? (is_wind_fuel(g.fuel) ? kWindUnforced : 1.0) : t.number(r, c_fu);
    g.dispatchable = parse_flag(t.text(r, c_disp), t.where(r, c_disp));
    try {
      g.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(t.path + ": row " + std::to_string(r + 2) + ": " + e.what());
    }
    out.push_back(std::move(g));
  }
  return out;
}

// lines.csv: from,to,susceptance,f_min_mw,f_max_mw
inline std::vector<Line> load_lines(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_from = t.column("from"), c_to = t.column("to"), c_b = t.column("susceptance"),
             c_lo = t.column("f_min_mw"), c_hi = t.column("f_max_mw");
  std::vector<Line> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({t.text(r, c_from), t.text(r, c_to), t.number(r, c_b), t.number(r, c_lo), t.number(r, c_hi)});
  return out;
}

struct LoadTable {
  std::vector<std::string> zones;  // first-appearance order
  std::vector<int> hours;          // ascending
  std::vector<std::vector<double>> mw;
};

// loads.csv: zone,hour,mw. Every zone needs exactly one row per hour.
inline LoadTable load_loads(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_zone = t.column("zone"), c_hour = t.column("hour"), c_mw = t.column("mw");
  LoadTable out;
  std::map<std::string, std::size_t> zone_idx;
  std::set<int> hours;
  std::map<std::pair<std::size_t, int>, double> cell;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string& z = t.text(r, c_zone);
    if (z.empty()) throw ValidationError(t.where(r, c_zone) + ": empty zone");
    if (!zone_idx.count(z)) {
      zone_idx[z] = out.zones.size();
      out.zones.push_back(z);
    }
    const double hv = t.number(r, c_hour);
    if (hv != std::floor(hv)) throw ValidationError(t.where(r, c_hour) + ": hour must be an integer");
    const int h = static_cast<int>(hv);
    const double mw = t.number(r, c_mw);
    if (mw < 0) throw ValidationError(t.where(r, c_mw) + ": load must be >= 0");
    if (!cell.emplace(std::make_pair(zone_idx[z], h), mw).second)
      throw ValidationError(t.where(r, c_hour) + ": duplicate row for zone '" + z + "' hour " + std::to_string(h));
    hours.insert(h);
  }
  out.hours.assign(hours.begin(), hours.end());
  out.mw.assign(out.zones.size(), std::vector<double>(out.hours.size(), 0.0));
  for (std::size_t b = 0; b < out.zones.size(); ++b)
    for (std::size_t k = 0; k < out.hours.size(); ++k) {
      auto it = cell.find({b, out.hours[k]});
      if (it == cell.end())
        throw ValidationError(t.path + ": zone '" + out.zones[b] + "' has no row for hour " +
                              std::to_string(out.hours[k]));
      out.mw[b][k] = it->second;
    }
  return out;
}

// capacity_factors.csv: generator,hour,cf
inline std::vector<std::vector<double>> load_capacity_factors(const fs::path& path, const SystemNetwork& net,
                                                              const std::vector<int>& hours) {
  const CsvTable t = read_csv(path);
  const auto c_gen = t.column("generator"), c_hour = t.column("hour"), c_cf = t.column("cf");
  std::vector<std::vector<double>> out(net.generators.size());
  std::map<std::pair<std::size_t, int>, double> cell;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto g = net.find_generator(t.text(r, c_gen));
    if (!g) throw ValidationError(t.where(r, c_gen) + ": unknown generator '" + t.text(r, c_gen) + "'");
    if (net.generators[*g].dispatchable)
      throw ValidationError(t.where(r, c_gen) + ": generator '" + t.text(r, c_gen) + "' is dispatchable");
    const double cf = t.number(r, c_cf);
    if (!(cf >= 0.0 && cf <= 1.0)) throw ValidationError(t.where(r, c_cf) + ": capacity factor outside [0, 1]");
    const int h = static_cast<int>(t.number(r, c_hour));
    if (!std::binary_search(hours.begin(), hours.end(), h))
      throw ValidationError(t.where(r, c_hour) + ": hour " + std::to_string(h) + " is not in the load table");
    if (!cell.emplace(std::make_pair(*g, h), cf).second)
      throw ValidationError(t.where(r, c_hour) + ": duplicate capacity factor");
  }
  for (std::size_t g = 0; g < net.generators.size(); ++g) {
    if (net.generators[g].dispatchable) continue;
    for (int h : hours) {
      auto it = cell.find({g, h});
      if (it == cell.end())
        throw ValidationError(t.path + ": missing capacity factor for renewable '" + net.generators[g].id +
                              "' at hour " + std::to_string(h));
      out[g].push_back(it->second);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// scenario config: key = value lines, '#' comments, paths relative to the file

struct ScenarioConfig {
  fs::path base_dir;
  std::string generators = "generators.csv";
  std::string lines = "lines.csv";
  std::string loads = "loads.csv";
  std::string capacity_factors = "capacity_factors.csv";
  double voll = 1000.0;
  double f_excess = 0.18;
  double reserve_margin = 0.2070;
  double translation_factor = 0.0856;
  double full_output_hours = 24.0;
  double demand_scale = 1.0;
  double congestion_scale = 1.0;
  std::string leader;
  std::vector<std::string> leaders;  // for the settings sweep
  int grid_points = 50;
  double oracle_step = 0.01;
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  std::optional<double> days_in_horizon;
  bool allow_price_bid = false;
  unsigned long long seed = 20240611ULL;

  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  }

  void validate() const {
    auto positive = [](double v, const char* k) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string("config: ") + k + " must be > 0");
    };
    auto fraction = [](double v, const char* k) {
      if (!(v > 0.0 && v < 1.0)) throw ValidationError(std::string("config: ") + k + " must lie in (0, 1)");
    };
    positive(voll, "voll");
    positive(demand_scale, "demand_scale");
    positive(congestion_scale, "congestion_scale");
    positive(oracle_step, "oracle_step");
    positive(feasibility_tol, "feasibility_tol");
    positive(optimality_tol, "optimality_tol");
    fraction(f_excess, "f_excess");
    fraction(reserve_margin, "reserve_margin");
    fraction(translation_factor, "translation_factor");
    if (!(full_output_hours >= 0.0 && full_output_hours <= 24.0))
      throw ValidationError("config: full_output_hours must lie in [0, 24]");
    if (grid_points < 1) throw ValidationError("config: grid_points must be >= 1");
    if (days_in_horizon) positive(*days_in_horizon, "days_in_horizon");
  }

  /// key = value text; load(serialize(c)) reproduces c.
  std::string serialize() const {
    std::ostringstream os;
    os << "generators = " << generators << "\n"
       << "lines = " << lines << "\n"
       << "loads = " << loads << "\n"
       << "capacity_factors = " << capacity_factors << "\n"
       << "voll = " << format_double(voll) << "\n"
       << "f_excess = " << format_double(f_excess) << "\n"
       << "reserve_margin = " << format_double(reserve_margin) << "\n"
       << "translation_factor = " << format_double(translation_factor) << "\n"
       << "full_output_hours = " << format_double(full_output_hours) << "\n"
       << "demand_scale = " << format_double(demand_scale) << "\n"
       << "congestion_scale = " << format_double(congestion_scale) << "\n";
    if (!leader.empty()) os << "leader = " << leader << "\n";
    if (!leaders.empty()) {
      os << "leaders = ";
      for (std::size_t i = 0; i < leaders.size(); ++i) os << (i ? "," : "") << leaders[i];
      os << "\n";
    }
    os << "grid_points = " << grid_points << "\n"
       << "oracle_step = " << format_double(oracle_step) << "\n"
       << "feasibility_tol = " << format_double(feasibility_tol) << "\n"
       << "optimality_tol = " << format_double(optimality_tol) << "\n";
    if (days_in_horizon) os << "days_in_horizon = " << format_double(*days_in_horizon) << "\n";
    os << "allow_price_bid = " << (allow_price_bid ? "true" : "false") << "\n"
       << "seed = " << seed << "\n";
    return os.str();
  }

  bool operator==(const ScenarioConfig& o) const {
    return generators == o.generators && lines == o.lines && loads == o.loads &&
           capacity_factors == o.capacity_factors && voll == o.voll && f_excess == o.f_excess &&
           reserve_margin == o.reserve_margin && translation_factor == o.translation_factor &&
           full_output_hours == o.full_output_hours && demand_scale == o.demand_scale &&
           congestion_scale == o.congestion_scale && leader == o.leader && leaders == o.leaders && grid_points == o.grid_points &&
           oracle_step == o.oracle_step && feasibility_tol == o.feasibility_tol &&
           optimality_tol == o.optimality_tol && days_in_horizon == o.days_in_horizon &&
           allow_price_bid == o.allow_price_bid && seed == o.seed;
  }
};

inline ScenarioConfig parse_config(std::istream& in, const std::string& name, const fs::path& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  std::string line;
  int lineno = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = name + ": line " + std::to_string(lineno);
    if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ValidationError(where + ": duplicate key '" + key + "'");
    auto num = [&]() {
      if (auto v = parse_double(val)) return *v;
      throw ValidationError(where + ": '" + key + "' needs a number, got '" + val + "'");
    };
    if (key == "generators") c.generators = val;
    else if (key == "lines") c.lines = val;
    else if (key == "loads") c.loads = val;
    else if (key == "capacity_factors") c.capacity_factors = val;
    else if (key == "voll") c.voll = num();
    else if (key == "f_excess") c.f_excess = num();
    else if (key == "reserve_margin") c.reserve_margin = num();
    else if (key == "translation_factor") c.translation_factor = num();
    else if (key == "full_output_hours") c.full_output_hours = num();
    else if (key == "demand_scale") c.demand_scale = num();
    else if (key == "congestion_scale") c.congestion_scale = num();
    else if (key == "leader") c.leader = val;
    else if (key == "leaders") c.leaders = detail::split_list(val);
    else if (key == "grid_points") c.grid_points = static_cast<int>(num());
    else if (key == "oracle_step") c.oracle_step = num();
    else if (key == "feasibility_tol") c.feasibility_tol = num();
    else if (key == "optimality_tol") c.optimality_tol = num();
    else if (key == "days_in_horizon") c.days_in_horizon = num();
    else if (key == "allow_price_bid") c.allow_price_bid = parse_flag(val, where);
    else if (key == "seed") {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw ValidationError(where + ": 'seed' needs a non-negative integer, got '" + val + "'");
      }
    }
    else throw ValidationError(where + ": unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.string() + ": cannot open scenario config");
  return parse_config(in, path.string(), path.parent_path());
}

struct Scenario {
  ScenarioConfig config;
  SystemNetwork network;
  TimeSeries series;
};

/// Reads and cross-checks every file of a scenario. Buses are the zones of
/// the load table, in first-appearance order.
inline Scenario load_scenario(const fs::path& config_path) {
  Scenario s;
  s.config = load_config(config_path);
  const LoadTable loads = load_loads(s.config.resolve(s.config.loads));
  s.network.buses = loads.zones;
  s.network.lines = load_lines(s.config.resolve(s.config.lines));
  s.network.generators = load_generators(s.config.resolve(s.config.generators));
  s.network.validate();
  s.series.hours = loads.hours;
  s.series.loads = loads.mw;
  s.series.capacity_factors =
      load_capacity_factors(s.config.resolve(s.config.capacity_factors), s.network, s.series.hours);
  s.series.validate(s.network);
  return s;
}

/// One row of an lmp.csv written by the dispatch report.
struct LmpRecord {
  int hour = 0;
  std::string zone;
  double lmp = 0.0;
  double unmet_mw = 0.0;
};

inline std::vector<LmpRecord> load_lmps(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_h = t.column("hour"), c_z = t.column("zone"), c_l = t.column("lmp"), c_u = t.column("unmet_mw");
  std::vector<LmpRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({static_cast<int>(t.number(r, c_h)), t.text(r, c_z), t.number(r, c_l), t.number(r, c_u)});
  return out;
}

// ---------------------------------------------------------------------------
// reports

/// A named table whose cells are either numbers or text.
struct ReportTable {
  struct Cell {
    bool numeric = false;
    double value = 0.0;
    std::string text;
    Cell(double v) : numeric(true), value(v) {}  // NOLINT
    Cell(int v) : numeric(true), value(v) {}  // NOLINT
    Cell(std::size_t v) : numeric(true), value(static_cast<double>(v)) {}  // NOLINT
    Cell(std::string s) : text(std::move(s)) {}  // NOLINT
    Cell(const char* s) : text(s) {}  // NOLINT
    Cell(bool b) : text(b ? "true" : "false") {}  // NOLINT
  };

  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw ComputationError("report table '" + name + "': row width mismatch");
    for (const Cell& c : row)
      if (c.numeric && !std::isfinite(c.value))
        throw ComputationError("report table '" + name + "': non-finite value");
    rows.push_back(std::move(row));
  }
};

struct RunReport {
  std::vector<std::pair<std::string, std::string>> scenario;  // echo of the inputs
  std::deque<ReportTable> tables;  // table() hands out references

  ReportTable& table(const std::string& name, std::vector<std::string> columns) {
    tables.push_back({name, std::move(columns), {}});
    return tables.back();
  }
};

inline void write_csv(std::ostream& os, const ReportTable& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << detail::csv_escape(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << (i ? "," : "") << (row[i].numeric ? format_double(row[i].value) : detail::csv_escape(row[i].text));
    os << "\n";
  }
}

inline nlohmann::ordered_json report_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["scenario"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.scenario) j["scenario"][k] = v;
  j["tables"] = nlohmann::ordered_json::object();
  for (const ReportTable& t : r.tables) {
    if (t.rows.empty()) continue;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i].numeric)
          o[t.columns[i]] = row[i].value;
        else
          o[t.columns[i]] = row[i].text;
      }
      arr.push_back(std::move(o));
    }
    j["tables"][t.name] = std::move(arr);
  }
  return j;
}

struct EmitFormats {
  bool csv = true;
  bool json = true;
};

/// Writes <table>.csv per non-empty table, report.json, and manifest.txt
/// (files written, tables omitted because empty). Returns the written paths.
inline std::vector<fs::path> emit_report(const RunReport& r, const fs::path& dir, EmitFormats formats = {}) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ComputationError(dir.string() + ": cannot create directory: " + ec.message());
  std::vector<fs::path> written;
  std::vector<std::string> omitted;
  auto open = [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ComputationError(p.string() + ": cannot open for writing");
    return out;
  };
  for (const ReportTable& t : r.tables) {
    if (t.rows.empty()) {
      omitted.push_back(t.name);
      continue;
    }
    if (!formats.csv) continue;
    const fs::path p = dir / (t.name + ".csv");
    auto out = open(p);
    write_csv(out, t);
    if (!out) throw ComputationError(p.string() + ": write failed");
    written.push_back(p);
  }
  if (formats.json) {
    const fs::path p = dir / "report.json";
    auto out = open(p);
    out << report_json(r).dump(2) << "\n";
    if (!out) throw ComputationError(p.string() + ": write failed");
    written.push_back(p);
  }
  const fs::path m = dir / "manifest.txt";
  auto out = open(m);
  for (const auto& p : written) out << "wrote " << p.filename().string() << "\n";
  for (const auto& n : omitted) out << "omitted " << n << " (empty)\n";
  if (!out) throw ComputationError(m.string() + ": write failed");
  written.push_back(m);
  return written;
}

}  // namespace capmkt
