#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "capmkt/error.hpp"

namespace capmkt {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { Le, Ge, Eq };

struct LpTerm {
  int col = 0;
  double coef = 0.0;
};

struct LpRow {
  std::string name;
  std::vector<LpTerm> terms;
  RowSense sense = RowSense::Eq;
  double rhs = 0.0;
};

/// min c'x  s.t.  rows, lower <= x <= upper. Bounds may be infinite.
struct LinearProgram {
  std::vector<std::string> col_names;
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LpRow> rows;

  int add_variable(std::string name, double c, double lo, double hi) {
    col_names.push_back(std::move(name));
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(cost.size()) - 1;
  }

  int add_row(std::string name, std::vector<LpTerm> terms, RowSense sense, double rhs) {
    rows.push_back({std::move(name), std::move(terms), sense, rhs});
    return static_cast<int>(rows.size()) - 1;
  }

  std::size_t num_cols() const { return cost.size(); }
  std::size_t num_rows() const { return rows.size(); }

  void validate() const {
    const std::size_t n = cost.size();
    if (lower.size() != n || upper.size() != n || col_names.size() != n)
      throw ValidationError("LP column arrays have inconsistent sizes");
    std::unordered_set<std::string> names;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(cost[j])) throw ValidationError("LP column '" + col_names[j] + "' has non-finite cost");
      if (!(lower[j] <= upper[j])) throw ValidationError("LP column '" + col_names[j] + "' has lower > upper");
      if (lower[j] == kInf || upper[j] == -kInf)
        throw ValidationError("LP column '" + col_names[j] + "' has an infinite bound on the wrong side");
      if (!names.insert(col_names[j]).second) throw ValidationError("duplicate LP column '" + col_names[j] + "'");
    }
    names.clear();
    for (const LpRow& r : rows) {
      if (!std::isfinite(r.rhs)) throw ValidationError("LP row '" + r.name + "' has non-finite rhs");
      if (!names.insert(r.name).second) throw ValidationError("duplicate LP row '" + r.name + "'");
      for (const LpTerm& t : r.terms)
        if (t.col < 0 || static_cast<std::size_t>(t.col) >= n || !std::isfinite(t.coef))
          throw ValidationError("LP row '" + r.name + "' has a bad term");
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

/// Duals are derivatives of the optimal value w.r.t. the row right-hand
/// side: <= rows get y <= 0, >= rows y >= 0, equality rows are free.
/// Reduced costs are d = c - A'y.
struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  std::vector<double> x;
  std::vector<double> duals;
  std::vector<double> reduced_costs;
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_every = 100;
  int bland_after_degenerate = 50;
  int max_iterations = 0;  // 0: automatic
};

namespace detail {

// Bounded-variable revised simplex on  A x + s = b  with an explicit dense
// basis inverse. Slack bounds encode the row sense. Artificial columns are
// added only for rows the slack cannot absorb at the starting point.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const LpOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.num_rows();
    n_ = lp.num_cols();
    cols_.resize(n_ + m_);
    for (std::size_t i = 0; i < m_; ++i)
      for (const LpTerm& t : lp.rows[i].terms)
        if (t.coef != 0.0) cols_[static_cast<std::size_t>(t.col)].push_back({static_cast<int>(i), t.coef});
    lo_ = lp.lower;
    hi_ = lp.upper;
    cost_ = lp.cost;
    for (std::size_t i = 0; i < m_; ++i) {
      cols_[n_ + i].push_back({static_cast<int>(i), 1.0});
      const RowSense s = lp.rows[i].sense;
      lo_.push_back(s == RowSense::Ge ? -kInf : 0.0);
      hi_.push_back(s == RowSense::Le ? kInf : 0.0);
      cost_.push_back(0.0);
      b_.push_back(lp.rows[i].rhs);
    }
  }

  LpSolution run() {
    LpSolution sol;
    const std::size_t total = n_ + m_;
    x_.assign(total, 0.0);
    state_.assign(total, State::Lower);
    for (std::size_t j = 0; j < n_; ++j) place_at_bound(j);

    // row activity of the nonbasic structurals, then decide slack vs artificial
    std::vector<double> act(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      for (const auto& [i, a] : cols_[j]) act[static_cast<std::size_t>(i)] += a * x_[j];
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const double want = b_[i] - act[i];
      if (want >= lo_[s] - opt_.feasibility_tol && want <= hi_[s] + opt_.feasibility_tol) {
        basis_[i] = s;
        state_[s] = State::Basic;
        x_[s] = want;
      } else {
        const double bound = want < lo_[s] ? lo_[s] : hi_[s];
        x_[s] = bound;
        state_[s] = (bound == lo_[s]) ? State::Lower : State::Upper;
        const double resid = want - bound;
        const double sign = resid > 0 ? 1.0 : -1.0;
        const std::size_t a = cols_.size();
        cols_.push_back({{static_cast<int>(i), sign}});
        lo_.push_back(0.0);
        hi_.push_back(kInf);
        cost_.push_back(0.0);
        x_.push_back(std::abs(resid));
        state_.push_back(State::Basic);
        basis_[i] = a;
      }
    }
    num_art_ = cols_.size() - total;
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations
                                        : static_cast<int>(50 * (cols_.size() + m_) + 1000);
    if (!refactor()) return fail(sol, "singular starting basis");

    if (num_art_ > 0) {
      std::vector<double> phase1(cols_.size(), 0.0);
      for (std::size_t j = total; j < cols_.size(); ++j) phase1[j] = 1.0;
      const LpStatus st = iterate(phase1);
      if (st == LpStatus::IterationLimit) return fail(sol, message_.empty() ? "phase 1 iteration limit" : message_);
      double infeas = 0.0;
      for (std::size_t j = total; j < cols_.size(); ++j) infeas += x_[j];
      double scale = 1.0;
      for (double v : b_) scale = std::max(scale, std::abs(v));
      if (infeas > opt_.feasibility_tol * scale) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iters_;
        return sol;
      }
      for (std::size_t j = total; j < cols_.size(); ++j) {
        hi_[j] = 0.0;
        if (state_[j] != State::Basic) {
          state_[j] = State::Lower;
          x_[j] = 0.0;
        }
      }
    }

    const LpStatus st = iterate(cost_);
    sol.iterations = iters_;
    if (st != LpStatus::Optimal) {
      sol.status = st;
      sol.message = message_;
      return sol;
    }
    if (!refactor()) return fail(sol, "singular final basis");
    extract(sol);
    return sol;
  }

 private:
  enum class State { Basic, Lower, Upper, Free };

  const LinearProgram& lp_;
  LpOptions opt_;
  std::size_t m_ = 0, n_ = 0, num_art_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo_, hi_, cost_, b_, x_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_;  // row-major m x m
  int iters_ = 0, max_iter_ = 0, since_refactor_ = 0;
  std::string message_;

  LpSolution& fail(LpSolution& sol, const std::string& why) {
    sol.status = LpStatus::IterationLimit;
    sol.message = why;
    sol.iterations = iters_;
    return sol;
  }

  void place_at_bound(std::size_t j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      state_[j] = State::Lower;
    } else if (std::isfinite(hi_[j])) {
      x_[j] = hi_[j];
      state_[j] = State::Upper;
    } else {
      x_[j] = 0.0;
      state_[j] = State::Free;
    }
  }

  double& binv(std::size_t r, std::size_t c) { return binv_[r * m_ + c]; }

  // Gauss-Jordan inversion of the basis, then basic values from b - N x_N.
  bool refactor() {
    since_refactor_ = 0;
    std::vector<double> bm(m_ * m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k)
      for (const auto& [i, a] : cols_[basis_[k]]) bm[static_cast<std::size_t>(i) * m_ + k] = a;
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) binv(i, i) = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(bm[r * m_ + c]) > std::abs(bm[p * m_ + c])) p = r;
      if (std::abs(bm[p * m_ + c]) < 1e-12) return false;
      if (p != c)
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(bm[p * m_ + k], bm[c * m_ + k]);
          std::swap(binv(p, k), binv(c, k));
        }
      const double inv = 1.0 / bm[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        bm[c * m_ + k] *= inv;
        binv(c, k) *= inv;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = bm[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          bm[r * m_ + k] -= f * bm[c * m_ + k];
          binv(r, k) -= f * binv(c, k);
        }
      }
    }
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (state_[j] == State::Basic || x_[j] == 0.0) continue;
      for (const auto& [i, a] : cols_[j]) rhs[static_cast<std::size_t>(i)] -= a * x_[j];
    }
    for (std::size_t r = 0; r < m_; ++r) {
      double v = 0.0;
      for (std::size_t k = 0; k < m_; ++k) v += binv(r, k) * rhs[k];
      x_[basis_[r]] = v;
    }
    return true;
  }

  std::vector<double> duals_for(const std::vector<double>& c) {
    std::vector<double> y(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = c[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * binv(r, k);
    }
    return y;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& c, const std::vector<double>& y) const {
    double d = c[j];
    for (const auto& [i, a] : cols_[j]) d -= a * y[static_cast<std::size_t>(i)];
    return d;
  }

  LpStatus iterate(const std::vector<double>& c) {
    int degenerate = 0;
    bool bland = false;
    std::vector<double> alpha(m_);
    while (true) {
      if (iters_ >= max_iter_) {
        message_ = "iteration limit reached";
        return LpStatus::IterationLimit;
      }
      const std::vector<double> y = duals_for(c);

      // pricing
      std::size_t enter = cols_.size();
      double best = 0.0;
      double dir = 0.0;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (state_[j] == State::Basic || lo_[j] == hi_[j]) continue;
        const double d = reduced_cost(j, c, y);
        double score = 0.0, s = 0.0;
        if ((state_[j] == State::Lower || state_[j] == State::Free) && d < -opt_.optimality_tol) {
          score = -d;
          s = 1.0;
        } else if ((state_[j] == State::Upper || state_[j] == State::Free) && d > opt_.optimality_tol) {
          score = d;
          s = -1.0;
        }
        if (s == 0.0) continue;
        if (bland) {
          enter = j;
          dir = s;
          break;
        }
        if (score > best) {
          best = score;
          enter = j;
          dir = s;
        }
      }
      if (enter == cols_.size()) return LpStatus::Optimal;

      // alpha = B^-1 a_enter
      std::fill(alpha.begin(), alpha.end(), 0.0);
      for (const auto& [i, a] : cols_[enter])
        for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv(r, static_cast<std::size_t>(i)) * a;

      // ratio test; basic r moves by -dir * t * alpha[r]
      const double range = hi_[enter] - lo_[enter];
      std::size_t leave = m_;
      double step = kInf;
      if (bland) {
        for (std::size_t r = 0; r < m_; ++r) {
          const double rate = dir * alpha[r];
          if (std::abs(rate) <= opt_.pivot_tol) continue;
          const std::size_t bj = basis_[r];
          double t;
          if (rate > 0) {
            if (!std::isfinite(lo_[bj])) continue;
            t = std::max(0.0, (x_[bj] - lo_[bj]) / rate);
          } else {
            if (!std::isfinite(hi_[bj])) continue;
            t = std::max(0.0, (hi_[bj] - x_[bj]) / -rate);
          }
          if (t < step - 1e-12 || (t <= step + 1e-12 && leave < m_ && basis_[r] < basis_[leave])) {
            step = t;
            leave = r;
          }
        }
      } else {
        // Harris: bound the step with relaxed limits, then take the largest pivot
        double relaxed = kInf;
        for (std::size_t r = 0; r < m_; ++r) {
          const double rate = dir * alpha[r];
          if (std::abs(rate) <= opt_.pivot_tol) continue;
          const std::size_t bj = basis_[r];
          if (rate > 0 && std::isfinite(lo_[bj]))
            relaxed = std::min(relaxed, (x_[bj] - lo_[bj] + opt_.feasibility_tol) / rate);
          else if (rate < 0 && std::isfinite(hi_[bj]))
            relaxed = std::min(relaxed, (hi_[bj] - x_[bj] + opt_.feasibility_tol) / -rate);
        }
        double biggest = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          const double rate = dir * alpha[r];
          if (std::abs(rate) <= opt_.pivot_tol) continue;
          const std::size_t bj = basis_[r];
          double t;
          if (rate > 0 && std::isfinite(lo_[bj]))
            t = (x_[bj] - lo_[bj]) / rate;
          else if (rate < 0 && std::isfinite(hi_[bj]))
            t = (hi_[bj] - x_[bj]) / -rate;
          else
            continue;
          if (t <= relaxed && std::abs(rate) > biggest) {
            biggest = std::abs(rate);
            leave = r;
            step = std::max(0.0, t);
          }
        }
      }

      if (range <= step) {
        if (!std::isfinite(range)) {
          message_ = "unbounded direction";
          return LpStatus::Unbounded;
        }
        // bound flip, basis unchanged
        for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= dir * range * alpha[r];
        x_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        state_[enter] = dir > 0 ? State::Upper : State::Lower;
        ++iters_;
        degenerate = 0;
        continue;
      }
      if (leave == m_) {
        message_ = "unbounded direction";
        return LpStatus::Unbounded;
      }

      for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= dir * step * alpha[r];
      x_[enter] += dir * step;
      const std::size_t out = basis_[leave];
      if (dir * alpha[leave] > 0) {
        x_[out] = lo_[out];
        state_[out] = State::Lower;
      } else {
        x_[out] = hi_[out];
        state_[out] = State::Upper;
      }
      if (lo_[out] == hi_[out]) state_[out] = State::Lower;
      basis_[leave] = enter;
      state_[enter] = State::Basic;

      // rank-one update of the inverse
      const double piv = alpha[leave];
      for (std::size_t k = 0; k < m_; ++k) binv(leave, k) /= piv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == leave || alpha[r] == 0.0) continue;
        const double f = alpha[r];
        for (std::size_t k = 0; k < m_; ++k) binv(r, k) -= f * binv(leave, k);
      }

      ++iters_;
      if (step <= 1e-12) {
        if (++degenerate > opt_.bland_after_degenerate) bland = true;
      } else {
        degenerate = 0;
      }
      if (++since_refactor_ >= opt_.refactor_every && !refactor()) {
        message_ = "singular basis";
        return LpStatus::IterationLimit;
      }
    }
  }

  void extract(LpSolution& sol) {
    sol.status = LpStatus::Optimal;
    sol.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    // snap nonbasic structurals exactly onto their bound
    for (std::size_t j = 0; j < n_; ++j) {
      if (state_[j] == State::Lower) sol.x[j] = lo_[j];
      if (state_[j] == State::Upper) sol.x[j] = hi_[j];
    }
    sol.duals = duals_for(cost_);
    sol.reduced_costs.resize(n_);
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      sol.reduced_costs[j] = reduced_cost(j, cost_, sol.duals);
      sol.objective += lp_.cost[j] * sol.x[j];
    }
    sol.dual_objective = 0.0;
    for (std::size_t i = 0; i < m_; ++i) sol.dual_objective += b_[i] * sol.duals[i];
    for (std::size_t j = 0; j < n_; ++j) {
      const double d = sol.reduced_costs[j];
      if (state_[j] == State::Basic || d == 0.0) continue;
      const double bound = d > 0 ? lo_[j] : hi_[j];
      if (std::isfinite(bound)) sol.dual_objective += d * bound;
    }
  }
};

}  // namespace detail

inline LpSolution solve(const LinearProgram& lp, const LpOptions& opt = {}) {
  lp.validate();
  detail::BoundedSimplex simplex(lp, opt);
  return simplex.run();
}

struct KktReport {
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double stationarity = 0.0;
  double complementarity = 0.0;
  double duality_gap = 0.0;  // relative

  double max() const {
    return std::max({primal_feasibility, dual_feasibility, stationarity, complementarity, duality_gap});
  }
  bool passes(double tol) const { return max() <= tol; }
};

inline std::vector<double> row_activity(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<double> act(lp.num_rows(), 0.0);
  for (std::size_t i = 0; i < lp.num_rows(); ++i)
    for (const LpTerm& t : lp.rows[i].terms) act[i] += t.coef * x[static_cast<std::size_t>(t.col)];
  return act;
}

// Recomputes every optimality condition from the LP data and the reported
// primal/dual vectors; nothing is taken from the solver's internal state.
inline KktReport check_kkt(const LinearProgram& lp, const LpSolution& sol) {
  KktReport rep;
  if (sol.x.size() != lp.num_cols() || sol.duals.size() != lp.num_rows()) {
    rep.primal_feasibility = kInf;
    return rep;
  }
  const auto act = row_activity(lp, sol.x);
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const LpRow& r = lp.rows[i];
    const double slack = r.rhs - act[i];  // >= 0 for Le, <= 0 for Ge
    const double y = sol.duals[i];
    switch (r.sense) {
      case RowSense::Le:
        rep.primal_feasibility = std::max(rep.primal_feasibility, -slack);
        rep.dual_feasibility = std::max(rep.dual_feasibility, y);
        rep.complementarity = std::max(rep.complementarity, std::abs(y * slack));
        break;
      case RowSense::Ge:
        rep.primal_feasibility = std::max(rep.primal_feasibility, slack);
        rep.dual_feasibility = std::max(rep.dual_feasibility, -y);
        rep.complementarity = std::max(rep.complementarity, std::abs(y * slack));
        break;
      case RowSense::Eq:
        rep.primal_feasibility = std::max(rep.primal_feasibility, std::abs(slack));
        break;
    }
  }
  std::vector<double> d = lp.cost;
  for (std::size_t i = 0; i < lp.num_rows(); ++i)
    for (const LpTerm& t : lp.rows[i].terms) d[static_cast<std::size_t>(t.col)] -= t.coef * sol.duals[i];
  double dual_obj = 0.0;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) dual_obj += lp.rows[i].rhs * sol.duals[i];
  double primal_obj = 0.0;
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    const double x = sol.x[j], lo = lp.lower[j], hi = lp.upper[j];
    primal_obj += lp.cost[j] * x;
    rep.primal_feasibility = std::max({rep.primal_feasibility, lo - x, x - hi});
    if (j < sol.reduced_costs.size())
      rep.stationarity = std::max(rep.stationarity, std::abs(sol.reduced_costs[j] - d[j]));
    const double dp = std::max(0.0, d[j]), dm = std::max(0.0, -d[j]);
    // d > 0 needs x at a finite lower bound, d < 0 at a finite upper bound
    if (dp > 0) {
      if (std::isfinite(lo)) {
        rep.complementarity = std::max(rep.complementarity, dp * std::abs(x - lo));
        dual_obj += dp * lo;
      } else {
        rep.dual_feasibility = std::max(rep.dual_feasibility, dp);
      }
    }
    if (dm > 0) {
      if (std::isfinite(hi)) {
        rep.complementarity = std::max(rep.complementarity, dm * std::abs(hi - x));
        dual_obj -= dm * hi;
      } else {
        rep.dual_feasibility = std::max(rep.dual_feasibility, dm);
      }
    }
  }
  rep.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
  return rep;
}

namespace detail {

inline std::string lp_name(const std::string& raw, char prefix, std::size_t idx) {
  std::string out;
  for (char ch : raw) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '(' ||
                    ch == ')' || ch == '[' || ch == ']';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.')
    out = std::string(1, prefix) + std::to_string(idx) + "_" + out;
  return out;
}

inline void lp_number(std::ostream& os, double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  os.write(buf, len);
}

inline void lp_terms(std::ostream& os, const std::vector<std::pair<std::string, double>>& terms) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (const auto& [name, c] : terms) {
    os << (c < 0 ? " - " : " + ");
    lp_number(os, std::abs(c));
    os << ' ' << name;
  }
}

}  // namespace detail

/// Writes the problem in CPLEX LP text format, readable by most solvers.
inline void write_lp_format(std::ostream& os, const LinearProgram& lp, const std::string& title = "capmkt") {
  std::vector<std::string> names(lp.num_cols());
  for (std::size_t j = 0; j < names.size(); ++j) names[j] = detail::lp_name(lp.col_names[j], 'x', j);

  os << "\\ " << title << "\nMinimize\n obj:";
  std::vector<std::pair<std::string, double>> obj;
  for (std::size_t j = 0; j < lp.num_cols(); ++j)
    if (lp.cost[j] != 0.0) obj.emplace_back(names[j], lp.cost[j]);
  detail::lp_terms(os, obj);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const LpRow& r = lp.rows[i];
    os << ' ' << detail::lp_name(r.name, 'c', i) << ':';
    std::vector<std::pair<std::string, double>> terms;
    for (const LpTerm& t : r.terms) terms.emplace_back(names[static_cast<std::size_t>(t.col)], t.coef);
    detail::lp_terms(os, terms);
    os << (r.sense == RowSense::Le ? " <= " : r.sense == RowSense::Ge ? " >= " : " = ");
    detail::lp_number(os, r.rhs);
    os << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_cols(); ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    os << ' ';
    if (lo == -kInf && hi == kInf) {
      os << names[j] << " free\n";
    } else if (lo == hi) {
      os << names[j] << " = ";
      detail::lp_number(os, lo);
      os << '\n';
    } else {
      if (lo == -kInf)
        os << "-inf";
      else
        detail::lp_number(os, lo);
      os << " <= " << names[j] << " <= ";
      if (hi == kInf)
        os << "+inf";
      else
        detail::lp_number(os, hi);
      os << '\n';
    }
  }
  os << "End\n";
}

}  // namespace capmkt
