#include "synthsoc/oracle.h"

#include <algorithm>
#include <limits>
#include <cmath>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace synthsoc {

int OracleInstance::producer(int resource) const {
  for (std::size_t e = 0; e < events.size(); ++e)
    if (events[e].output == resource) return static_cast<int>(e);
  return -1;
}

std::vector<int> OracleInstance::topological_events() const {
  const std::size_t n = events.size();
  std::vector<std::set<int>> next(n);
  for (std::size_t e = 0; e < n; ++e) {
    for (const auto& [res, count] : events[e].inputs) {
      const int p = producer(res);
      if (p >= 0 && p != static_cast<int>(e)) next[static_cast<std::size_t>(p)].insert(static_cast<int>(e));
    }
    for (int j : events[e].d)
      if (j != static_cast<int>(e)) next[static_cast<std::size_t>(j)].insert(static_cast<int>(e));
  }
  std::vector<int> indeg(n, 0);
  for (const auto& s : next)
    for (int j : s) ++indeg[static_cast<std::size_t>(j)];
  // Lowest index first among ready events keeps the order canonical.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t e = 0; e < n; ++e)
    if (indeg[e] == 0) ready.push(static_cast<int>(e));
  std::vector<int> order;
  while (!ready.empty()) {
    const int e = ready.top();
    ready.pop();
    order.push_back(e);
    for (int j : next[static_cast<std::size_t>(e)])
      if (--indeg[static_cast<std::size_t>(j)] == 0) ready.push(j);
  }
  if (order.size() != n) throw std::invalid_argument("event dependencies contain a cycle");
  return order;
}

std::int64_t OracleInstance::search_space() const {
  std::int64_t s = 1;
  for (const auto& e : events) {
    if (e.bound + 1 > 0 && s > INT64_MAX / (e.bound + 1)) return INT64_MAX;
    s *= e.bound + 1;
  }
  return s;
}

OracleInstance make_instance(const ContentRegistry& reg, const std::map<std::string, std::int64_t>& amounts,
                             const std::map<std::string, Rational>& preference, const std::vector<bool>& present,
                             std::optional<std::int64_t> bound_cap) {
  OracleInstance inst;
  const int nr = reg.resource_count();
  const int ne = reg.event_count();
  for (ResourceId r = 0; r < nr; ++r) {
    const auto& kind = reg.resource(r);
    OracleResource res;
    res.name = kind.name;
    res.natural = !kind.synthesized;
    if (auto it = amounts.find(kind.name); it != amounts.end()) res.amount = it->second;
    Rational h(1);
    if (auto it = preference.find(kind.name); it != preference.end()) h = it->second;
    res.credit = h * kind.objective_reward;
    inst.resources.push_back(std::move(res));
  }

  // Q by recursion through natural requirements.
  std::vector<std::optional<std::set<int>>> memo(static_cast<std::size_t>(nr));
  std::function<const std::set<int>&(ResourceId)> q_of = [&](ResourceId r) -> const std::set<int>& {
    auto& slot = memo[static_cast<std::size_t>(r)];
    if (slot) return *slot;
    std::set<int> out;
    for (ResourceId need : reg.requirement(r)) {
      if (reg.resource(need).synthesized) {
        if (auto p = reg.producer(need)) out.insert(*p);
      } else {
        const auto& sub = q_of(need);
        out.insert(sub.begin(), sub.end());
      }
    }
    slot = std::move(out);
    return *slot;
  };
  for (ResourceId r = 0; r < nr; ++r) {
    if (!reg.resource(r).synthesized) {
      const auto& q = q_of(r);
      inst.resources[static_cast<std::size_t>(r)].q.assign(q.begin(), q.end());
    }
  }

  for (EventId e = 0; e < ne; ++e) {
    const auto& ev = reg.resolved(e);
    if (ev.outputs.size() != 1) throw std::invalid_argument("event '" + reg.event(e).name + "' must have one output");
    OracleEvent oe;
    oe.name = reg.event(e).name;
    oe.inputs = ev.inputs;
    oe.output = ev.outputs.front().first;
    oe.yield = ev.outputs.front().second;
    std::set<int> d;
    for (ResourceId need : ev.requirement) {
      if (reg.resource(need).synthesized) {
        if (auto p = reg.producer(need)) d.insert(*p);
      } else {
        const auto& q = q_of(need);
        d.insert(q.begin(), q.end());
      }
    }
    for (const auto& [res, count] : ev.inputs) {
      if (!reg.resource(res).synthesized) {
        const auto& q = q_of(res);
        d.insert(q.begin(), q.end());
      }
    }
    oe.d.assign(d.begin(), d.end());
    inst.events.push_back(std::move(oe));
  }

  // Availability propagation: every unit of an input is assumed to be
  // available to each consumer, which over-approximates and stays valid.
  std::vector<std::int64_t> avail(static_cast<std::size_t>(nr));
  for (int r = 0; r < nr; ++r) avail[static_cast<std::size_t>(r)] = inst.resources[static_cast<std::size_t>(r)].amount;
  for (int e : inst.topological_events()) {
    auto& ev = inst.events[static_cast<std::size_t>(e)];
    std::int64_t b = present.at(static_cast<std::size_t>(e)) ? INT64_MAX : 0;
    for (const auto& [res, count] : ev.inputs) b = std::min(b, avail[static_cast<std::size_t>(res)] / count);
    for (int j : ev.d)
      if (inst.events[static_cast<std::size_t>(j)].bound == 0) b = 0;
    if (bound_cap) b = std::min(b, *bound_cap);
    ev.bound = b;
    avail[static_cast<std::size_t>(ev.output)] += ev.yield * b;
  }
  return inst;
}

OracleInstance build_instance(const ScenarioSpec& spec) {
  const auto& reg = spec.registry;
  std::map<std::string, std::int64_t> amounts;
  for (const auto& [name, pl] : spec.resources_on_map) amounts[name] += pl.cells() * pl.amount;
  std::map<std::string, std::optional<Rational>> best;
  for (const auto& agent : spec.agents) {
    for (const auto& [name, n] : agent.initial_inventory) amounts[name] += n * agent.count;
  }
  std::map<std::string, Rational> preference;
  for (const auto& kind : reg.resources()) {
    std::optional<Rational> h;
    for (const auto& agent : spec.agents) {
      auto it = agent.preference.find(kind.name);
      const Rational v = it == agent.preference.end() ? Rational(1) : it->second;
      if (!h || v > *h) h = v;
    }
    preference[kind.name] = h.value_or(Rational(1));
  }
  std::vector<bool> present(static_cast<std::size_t>(reg.event_count()), false);
  for (const auto& [name, pl] : spec.event_sites) {
    if (pl.cells() > 0) present[static_cast<std::size_t>(reg.event_id(name))] = true;
  }
  return make_instance(reg, amounts, preference, present);
}

namespace {

// Credits as integers over a common denominator.
struct Scaled {
  std::int64_t denom = 1;
  std::vector<std::int64_t> credit;
};

Scaled scale_credits(const OracleInstance& inst) {
  Scaled s;
  for (const auto& r : inst.resources) s.denom = std::lcm(s.denom, r.credit.den());
  for (const auto& r : inst.resources) s.credit.push_back((r.credit * Rational(s.denom)).num());
  return s;
}

std::vector<std::int64_t> leftovers(const OracleInstance& inst, const std::vector<std::int64_t>& x) {
  std::vector<std::int64_t> r;
  r.reserve(inst.resources.size());
  for (const auto& res : inst.resources) r.push_back(res.amount);
  for (std::size_t e = 0; e < inst.events.size(); ++e) {
    const auto& ev = inst.events[e];
    for (const auto& [res, count] : ev.inputs) r[static_cast<std::size_t>(res)] -= x[e] * count;
    r[static_cast<std::size_t>(ev.output)] += x[e] * ev.yield;
  }
  return r;
}

// Best alpha and beta for a feasible x (r >= 0, D satisfied). Returns the
// scaled objective.
std::int64_t complete(const OracleInstance& inst, const Scaled& sc, OracleSolution& s) {
  const std::size_t ne = inst.events.size();
  s.left = leftovers(inst, s.x);
  s.alpha.assign(inst.resources.size(), 0);
  s.beta.assign(ne, 0);
  for (std::size_t e = 0; e < ne; ++e)
    for (int j : inst.events[e].d)
      if (s.x[e] > 0) s.beta[static_cast<std::size_t>(j)] = 1;
  std::int64_t total = 0;
  for (std::size_t i = 0; i < inst.resources.size(); ++i) {
    const auto& res = inst.resources[i];
    const std::int64_t v = s.left[i] * sc.credit[i];
    if (res.natural) {
      const bool open = std::all_of(res.q.begin(), res.q.end(), [&](int j) { return s.x[static_cast<std::size_t>(j)] > 0; });
      if (open && v > 0) s.alpha[i] = 1;
      if (s.alpha[i]) total += v;
    } else {
      const int p = inst.producer(static_cast<int>(i));
      if (p < 0) continue;
      auto& b = s.beta[static_cast<std::size_t>(p)];
      if (s.x[static_cast<std::size_t>(p)] > 0 && v > 0) b = 1;
      if (b) total += v;
    }
  }
  return total;
}

// max c.x subject to A x <= b, x >= 0, with b >= 0 so the origin is a
// feasible basis. Dense tableau simplex, Bland's rule. Returns +inf when
// unbounded; `primal` receives the optimal x.
double lp_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c,
              std::vector<double>& primal) {
  const std::size_t m = a.size(), n = c.size();
  // Row-major tableau: m constraint rows then the objective row; n + m
  // variable columns then the rhs.
  const std::size_t w = n + m + 1;
  std::vector<double> t((m + 1) * w, 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * w + col]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) at(r, j) = a[r][j];
    at(r, n + r) = 1.0;
    at(r, w - 1) = b[r];
    basis[r] = n + r;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -c[j];
  constexpr double kEps = 1e-9;
  for (int iter = 0; iter < 10000; ++iter) {
    std::size_t enter = w;
    for (std::size_t j = 0; j + 1 < w; ++j)
      if (at(m, j) < -kEps) {
        enter = j;
        break;
      }
    if (enter == w) break;
    std::size_t leave = m;
    double best = 0;
    for (std::size_t r = 0; r < m; ++r) {
      if (at(r, enter) <= kEps) continue;
      const double ratio = at(r, w - 1) / at(r, enter);
      if (leave == m || ratio < best - kEps || (ratio <= best + kEps && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == m) return std::numeric_limits<double>::infinity();
    const double piv = at(leave, enter);
    for (std::size_t j = 0; j < w; ++j) at(leave, j) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0) continue;
      for (std::size_t j = 0; j < w; ++j) at(r, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
  }
  primal.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) primal[basis[r]] = at(r, w - 1);
  return at(m, w - 1);
}

class BranchAndBound {
 public:
  BranchAndBound(const OracleInstance& inst, std::int64_t budget)
      : inst_(inst), sc_(scale_credits(inst)), order_(inst.topological_events()), budget_(budget) {
    x_.assign(inst.events.size(), 0);
    decided_.assign(inst.events.size(), false);
    r_.reserve(inst.resources.size());
    for (const auto& res : inst.resources) r_.push_back(res.amount);
    // Sum of input units per execution, the divisor of the potential bound.
    for (const auto& ev : inst.events) {
      std::int64_t c = 0;
      for (const auto& [res, count] : ev.inputs) c += count;
      input_units_.push_back(static_cast<double>(std::max<std::int64_t>(c, 1)));
    }
  }

  OracleSolution run() {
    dfs(0);
    OracleSolution s = best_;
    s.objective = Rational(best_value_, sc_.denom);
    s.proven = !exhausted_;
    s.nodes = nodes_;
    return s;
  }

 private:
  // Upper bound on the scaled objective reachable from the current node:
  // each unit of resource i is worth at most u_i, where u_i covers both
  // keeping it and its cost-proportional share of any still-possible
  // consumer's output, so no execution can raise sum r_i u_i.
  double potential(std::size_t depth) {
    std::vector<double> u(inst_.resources.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::max<double>(0.0, static_cast<double>(sc_.credit[i]));
    std::vector<bool> possible(inst_.events.size(), false);
    for (std::size_t k = depth; k < order_.size(); ++k) {
      const int e = order_[k];
      const auto& ev = inst_.events[static_cast<std::size_t>(e)];
      bool ok = ev.bound > 0;
      for (int j : ev.d) {
        const auto js = static_cast<std::size_t>(j);
        if (decided_[js] ? x_[js] == 0 : !possible[js]) ok = false;
      }
      possible[static_cast<std::size_t>(e)] = ok;
    }
    for (std::size_t k = order_.size(); k-- > depth;) {
      const auto e = static_cast<std::size_t>(order_[k]);
      if (!possible[e]) continue;
      const auto& ev = inst_.events[e];
      const double share = static_cast<double>(ev.yield) * u[static_cast<std::size_t>(ev.output)] / input_units_[e];
      for (const auto& [res, count] : ev.inputs) u[static_cast<std::size_t>(res)] = std::max(u[static_cast<std::size_t>(res)], share);
    }
    double phi = 0;
    for (std::size_t i = 0; i < u.size(); ++i) phi += static_cast<double>(std::max<std::int64_t>(r_[i], 0)) * u[i];
    return phi;
  }

  // LP relaxation over the undecided events: drops integrality and the
  // alpha/beta gates, keeps r >= 0 and the execution bounds.
  // Also leaves the relaxed value of order_[depth] in hint_ (or -1).
  double relaxation(std::size_t depth) {
    hint_ = -1;
    std::vector<int> vars;
    std::vector<bool> possible(inst_.events.size(), false);
    for (std::size_t k = depth; k < order_.size(); ++k) {
      const int e = order_[k];
      const auto& ev = inst_.events[static_cast<std::size_t>(e)];
      bool ok = ev.bound > 0;
      for (int j : ev.d) {
        const auto js = static_cast<std::size_t>(j);
        if (decided_[js] ? x_[js] == 0 : !possible[js]) ok = false;
      }
      possible[static_cast<std::size_t>(e)] = ok;
      if (ok) vars.push_back(e);
    }
    double base = 0;
    for (std::size_t i = 0; i < r_.size(); ++i) {
      base += static_cast<double>(std::max<std::int64_t>(sc_.credit[i], 0)) * static_cast<double>(r_[i]);
    }
    if (vars.empty()) return base;
    const std::size_t n = vars.size();
    std::vector<std::vector<double>> a;
    std::vector<double> b, c(n, 0.0);
    std::vector<std::vector<double>> col(inst_.resources.size(), std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
      const auto& ev = inst_.events[static_cast<std::size_t>(vars[k])];
      for (const auto& [res, count] : ev.inputs) col[static_cast<std::size_t>(res)][k] -= static_cast<double>(count);
      col[static_cast<std::size_t>(ev.output)][k] += static_cast<double>(ev.yield);
    }
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double ci = static_cast<double>(std::max<std::int64_t>(sc_.credit[i], 0));
      bool consumed = false;
      for (std::size_t k = 0; k < n; ++k) {
        c[k] += ci * col[i][k];
        if (col[i][k] < 0) consumed = true;
      }
      if (!consumed) continue;
      std::vector<double> row(n);
      for (std::size_t k = 0; k < n; ++k) row[k] = -col[i][k];
      a.push_back(std::move(row));
      b.push_back(static_cast<double>(r_[i]));
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> row(n, 0.0);
      row[k] = 1.0;
      a.push_back(std::move(row));
      b.push_back(static_cast<double>(inst_.events[static_cast<std::size_t>(vars[k])].bound));
    }
    // x_j <= M_j b_k with b_k <= x_k relaxes to x_j <= M_j x_k.
    for (std::size_t k = 0; k < n; ++k) {
      for (int j : inst_.events[static_cast<std::size_t>(vars[k])].d) {
        auto it = std::find(vars.begin(), vars.end(), j);
        if (it == vars.end()) continue;
        std::vector<double> row(n, 0.0);
        row[k] = 1.0;
        row[static_cast<std::size_t>(it - vars.begin())] = -static_cast<double>(inst_.big_m(vars[k]));
        a.push_back(std::move(row));
        b.push_back(0.0);
      }
    }
    std::vector<double> primal;
    const double v = lp_max(a, b, c, primal);
    if (!vars.empty() && vars.front() == order_[depth]) hint_ = primal.front();
    return base + v;
  }

  void dfs(std::size_t depth) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (depth == order_.size()) {
      OracleSolution s;
      s.x = x_;
      const std::int64_t v = complete(inst_, sc_, s);
      if (!found_ || v > best_value_) {
        found_ = true;
        best_value_ = v;
        best_ = std::move(s);
      }
      return;
    }
    const double bar = static_cast<double>(best_value_) + 1.0 - 1e-6;
    if (found_ && potential(depth) < bar) return;
    const double lp = relaxation(depth);
    if (found_ && lp + 1e-7 * std::max(1.0, std::abs(lp)) < bar) return;

    const auto e = static_cast<std::size_t>(order_[depth]);
    const auto& ev = inst_.events[e];
    std::int64_t top = ev.bound;
    for (int j : ev.d)
      if (x_[static_cast<std::size_t>(j)] == 0) top = 0;
    for (const auto& [res, count] : ev.inputs) top = std::min(top, r_[static_cast<std::size_t>(res)] / count);
    // Values nearest the relaxed optimum first, then downward, then upward.
    std::int64_t start = top;
    if (hint_ >= 0) start = std::clamp<std::int64_t>(std::llround(hint_), 0, top);
    decided_[e] = true;
    for (std::int64_t v = start; v >= 0 && !exhausted_; --v) {
      apply(e, v);
      dfs(depth + 1);
      apply(e, -v);
    }
    for (std::int64_t v = start + 1; v <= top && !exhausted_; ++v) {
      apply(e, v);
      dfs(depth + 1);
      apply(e, -v);
    }
    x_[e] = 0;
    decided_[e] = false;
  }

  void apply(std::size_t e, std::int64_t v) {
    const auto& ev = inst_.events[e];
    for (const auto& [res, count] : ev.inputs) r_[static_cast<std::size_t>(res)] -= v * count;
    r_[static_cast<std::size_t>(ev.output)] += v * ev.yield;
    x_[e] += v;
  }

  const OracleInstance& inst_;
  Scaled sc_;
  std::vector<int> order_;
  std::int64_t budget_;
  std::vector<std::int64_t> x_, r_;
  std::vector<bool> decided_;
  std::vector<double> input_units_;
  double hint_ = -1;
  std::int64_t nodes_ = 0;
  bool exhausted_ = false;
  bool found_ = false;
  std::int64_t best_value_ = 0;
  OracleSolution best_;
};

struct Candidate {
  bool found = false;
  std::int64_t value = 0;
  std::int64_t index = 0;
  std::uint32_t mask = 0;

  // Higher value wins; ties go to the lowest (index, mask).
  bool better_than(const Candidate& o) const {
    if (!o.found) return found;
    if (!found) return false;
    if (value != o.value) return value > o.value;
    return index != o.index ? index < o.index : mask < o.mask;
  }
};

std::vector<std::int64_t> decode(const OracleInstance& inst, std::int64_t index) {
  std::vector<std::int64_t> x(inst.events.size());
  for (std::size_t e = 0; e < x.size(); ++e) {
    const std::int64_t radix = inst.events[e].bound + 1;
    x[e] = index % radix;
    index /= radix;
  }
  return x;
}

// Checks every constraint literally for one x and every beta; returns the
// best completion for this x.
Candidate evaluate_point(const OracleInstance& inst, const Scaled& sc, std::int64_t index) {
  Candidate best;
  const auto x = decode(inst, index);
  const auto r = leftovers(inst, x);
  if (std::any_of(r.begin(), r.end(), [](std::int64_t v) { return v < 0; })) return best;
  const std::size_t ne = inst.events.size();
  for (std::uint32_t mask = 0; mask < (1u << ne); ++mask) {
    auto beta = [&](std::size_t j) -> std::int64_t { return (mask >> j) & 1u; };
    bool ok = true;
    for (std::size_t j = 0; j < ne && ok; ++j) {
      if (beta(j) > x[j]) ok = false;  // b_j <= x_j
      for (int k : inst.events[j].d)
        if (x[j] > beta(static_cast<std::size_t>(k)) * inst.big_m(static_cast<int>(j))) ok = false;
    }
    if (!ok) continue;
    std::int64_t value = 0;
    for (std::size_t i = 0; i < inst.resources.size(); ++i) {
      const auto& res = inst.resources[i];
      const std::int64_t v = r[i] * sc.credit[i];
      if (res.natural) {
        // alpha_i may be 1 only if x_j >= 1 for all j in Q(i); pick it when it pays.
        bool allowed = true;
        for (int j : res.q)
          if (x[static_cast<std::size_t>(j)] < 1) allowed = false;
        if (allowed && v > 0) value += v;
      } else {
        const int p = inst.producer(static_cast<int>(i));
        if (p >= 0 && beta(static_cast<std::size_t>(p))) value += v;
      }
    }
    Candidate c{true, value, index, mask};
    if (c.better_than(best)) best = c;
  }
  return best;
}

OracleSolution finish(const OracleInstance& inst, const Scaled& sc, const Candidate& c) {
  OracleSolution s;
  s.x = decode(inst, c.index);
  s.left = leftovers(inst, s.x);
  s.beta.assign(inst.events.size(), 0);
  for (std::size_t j = 0; j < s.beta.size(); ++j) s.beta[j] = static_cast<int>((c.mask >> j) & 1u);
  s.alpha.assign(inst.resources.size(), 0);
  for (std::size_t i = 0; i < inst.resources.size(); ++i) {
    const auto& res = inst.resources[i];
    if (!res.natural) continue;
    bool allowed = true;
    for (int j : res.q)
      if (s.x[static_cast<std::size_t>(j)] < 1) allowed = false;
    s.alpha[i] = allowed && s.left[i] * sc.credit[i] > 0 ? 1 : 0;
  }
  s.objective = Rational(c.value, sc.denom);
  s.nodes = inst.search_space();
  return s;
}

void check_enumerable(const OracleInstance& inst) {
  if (inst.search_space() > 10'000'000) throw std::invalid_argument("search space exceeds 10^7 points");
  if (inst.events.size() > 20) throw std::invalid_argument("too many events for exhaustive search");
}

}  // namespace

Rational objective_of(const OracleInstance& inst, const OracleSolution& s) {
  Rational total;
  for (std::size_t i = 0; i < inst.resources.size(); ++i) {
    const auto& res = inst.resources[i];
    int bit = 0;
    if (res.natural) {
      bit = s.alpha[i];
    } else if (int p = inst.producer(static_cast<int>(i)); p >= 0) {
      bit = s.beta[static_cast<std::size_t>(p)];
    }
    if (bit) total += Rational(s.left[i]) * res.credit;
  }
  return total;
}

std::vector<std::string> constraint_violations(const OracleInstance& inst, const OracleSolution& s) {
  std::vector<std::string> out;
  const auto r = leftovers(inst, s.x);
  for (std::size_t i = 0; i < inst.resources.size(); ++i) {
    const auto& name = inst.resources[i].name;
    if (s.left[i] != r[i]) out.push_back("leftover of " + name + " does not match the balance equation");
    if (s.left[i] < 0) out.push_back("negative leftover of " + name);
    if (s.alpha[i] != 0 && s.alpha[i] != 1) out.push_back("alpha of " + name + " not binary");
    for (int j : inst.resources[i].q)
      if (s.alpha[i] > s.x[static_cast<std::size_t>(j)]) out.push_back("collection of " + name + " before its required event");
  }
  for (std::size_t j = 0; j < inst.events.size(); ++j) {
    const auto& name = inst.events[j].name;
    if (s.x[j] < 0 || s.x[j] > inst.events[j].bound) out.push_back("executions of " + name + " outside bounds");
    if (s.beta[j] != 0 && s.beta[j] != 1) out.push_back("beta of " + name + " not binary");
    if (s.beta[j] > s.x[j]) out.push_back("occurrence of " + name + " without execution");
    for (int k : inst.events[j].d) {
      if (s.x[j] > s.beta[static_cast<std::size_t>(k)] * inst.big_m(static_cast<int>(j))) {
        out.push_back(name + " executed before " + inst.events[static_cast<std::size_t>(k)].name);
      }
    }
  }
  return out;
}

OracleSolution solve(const OracleInstance& inst, std::int64_t node_budget) {
  auto s = BranchAndBound(inst, node_budget).run();
  if (s.x.empty()) {
    // Budget ran out before the first leaf; x = 0 is always feasible.
    const auto sc = scale_credits(inst);
    auto zero = finish(inst, sc, evaluate_point(inst, sc, 0));
    zero.proven = false;
    zero.nodes = s.nodes;
    return zero;
  }
  return s;
}

OracleSolution brute_force_serial(const OracleInstance& inst) {
  check_enumerable(inst);
  const auto sc = scale_credits(inst);
  Candidate best;
  const std::int64_t space = inst.search_space();
  for (std::int64_t idx = 0; idx < space; ++idx) {
    const auto c = evaluate_point(inst, sc, idx);
    if (c.better_than(best)) best = c;
  }
  return finish(inst, sc, best);
}

OracleSolution brute_force(const OracleInstance& inst) {
  check_enumerable(inst);
  const auto sc = scale_credits(inst);
  Candidate best;
  const std::int64_t space = inst.search_space();
#pragma omp parallel
  {
    Candidate local;
#pragma omp for schedule(static)
    for (std::int64_t idx = 0; idx < space; ++idx) {
      const auto c = evaluate_point(inst, sc, idx);
      if (c.better_than(local)) local = c;
    }
#pragma omp critical
    {
      if (local.better_than(best)) best = local;
    }
  }
  return finish(inst, sc, best);
}

OracleInstance random_instance(Rng& rng, int max_events, std::int64_t max_bound) {
  for (;;) {
    const int naturals = 1 + static_cast<int>(rng.below(3));
    const int events = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_events)));
    std::vector<ResourceKind> res;
    for (int i = 0; i < naturals; ++i) res.push_back({"n" + std::to_string(i), {}, Rational(1 + static_cast<std::int64_t>(rng.below(6))), false});
    for (int j = 0; j < events; ++j) res.push_back({"s" + std::to_string(j), {}, Rational(1 + static_cast<std::int64_t>(rng.below(20))), true});
    for (int i = 0; i < naturals; ++i) {
      if (rng.below(4) == 0) res[static_cast<std::size_t>(i)].requirement.push_back("s" + std::to_string(rng.below(static_cast<std::uint64_t>(events))));
    }
    std::vector<EventKind> evs;
    for (int j = 0; j < events; ++j) {
      // Inputs come from naturals and earlier outputs.
      const int pool = naturals + j;
      auto pick_name = [&](std::uint64_t k) {
        return k < static_cast<std::uint64_t>(naturals) ? "n" + std::to_string(k) : "s" + std::to_string(k - naturals);
      };
      EventKind ev;
      ev.name = "E" + std::to_string(j);
      std::set<std::uint64_t> chosen;
      const int n_in = 1 + static_cast<int>(rng.below(std::min(2, pool)));
      while (static_cast<int>(chosen.size()) < n_in) chosen.insert(rng.below(static_cast<std::uint64_t>(pool)));
      for (auto k : chosen) ev.inputs.push_back({pick_name(k), 1 + static_cast<std::int64_t>(rng.below(2))});
      ev.outputs.push_back({"s" + std::to_string(j), 1 + static_cast<std::int64_t>(rng.below(2))});
      if (rng.below(10) < 3) ev.requirement.push_back(pick_name(rng.below(static_cast<std::uint64_t>(pool))));
      evs.push_back(std::move(ev));
    }
    if (!validate_registry(res, evs).empty()) continue;
    ContentRegistry reg(res, evs);
    std::map<std::string, std::int64_t> amounts;
    std::map<std::string, Rational> pref;
    for (const auto& r : res) {
      if (!r.synthesized) amounts[r.name] = static_cast<std::int64_t>(rng.below(6));
      else if (rng.below(5) == 0) amounts[r.name] = 1;
      pref[r.name] = Rational(static_cast<std::int64_t>(rng.below(4)));
    }
    std::vector<bool> present(static_cast<std::size_t>(events));
    for (int j = 0; j < events; ++j) present[static_cast<std::size_t>(j)] = rng.below(10) != 0;
    return make_instance(reg, amounts, pref, present, max_bound);
  }
}

}  // namespace synthsoc
