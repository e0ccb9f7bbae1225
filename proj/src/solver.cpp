#include "rmcfence/solver.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace rmcfence::solver {

using encode::NodeOp;
using encode::Problem;

const char *to_string(Status s) { return s == Status::Optimal ? "optimal" : "budget_exceeded"; }

namespace {

struct BudgetHit {};

class Search {
 public:
  Search(const Problem &p, std::optional<std::chrono::milliseconds> budget)
      : p_(p), eval_(p), assign_(p.vars.size(), -1) {
    if (budget) deadline_ = std::chrono::steady_clock::now() + *budget;
    def_support_.resize(p.defs.size());
    for (std::size_t d = 0; d < p.defs.size(); ++d) def_support_[d] = support_of_def(static_cast<int>(d));
  }

  Stats stats;
  std::vector<signed char> assign_;  // -1 unassigned

  // Finds a satisfying completion of assign_ with cost <= limit. With
  // `minimize`, keeps searching for cheaper ones. Returns the best found.
  std::optional<std::vector<bool>> run(long limit, bool minimize) {
    limit_ = limit;
    minimize_ = minimize;
    best_.reset();
    found_ = false;
    dfs();
    return best_;
  }

  const std::optional<std::vector<bool>> &last_found() const { return best_; }

 private:
  std::vector<bool> completion(bool unassigned) const {
    std::vector<bool> v(assign_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = assign_[i] < 0 ? unassigned : assign_[i] == 1;
    return v;
  }

  long fixed_cost() const {
    long c = 0;
    for (std::size_t i = 0; i < assign_.size(); ++i)
      if (assign_[i] == 1) c += p_.vars[i].cost;
    return c;
  }

  void tick() {
    ++stats.nodes;
    if (deadline_ && (stats.nodes & 63) == 0 && std::chrono::steady_clock::now() > *deadline_) throw BudgetHit{};
  }

  std::set<int> support_of_def(int d) const {
    std::set<int> vars;
    std::vector<bool> seen_def(p_.defs.size(), false);
    std::vector<bool> seen_node(p_.nodes.size(), false);
    std::vector<int> work{p_.defs[d].expr};
    seen_def[d] = true;
    while (!work.empty()) {
      int n = work.back();
      work.pop_back();
      if (seen_node[n]) continue;
      seen_node[n] = true;
      const auto &node = p_.nodes[n];
      if (node.op == NodeOp::Out) vars.insert(node.ref);
      if (node.op == NodeOp::Def && !seen_def[node.ref]) {
        seen_def[node.ref] = true;
        work.push_back(p_.defs[node.ref].expr);
      }
      for (int k : node.kids) work.push_back(k);
    }
    return vars;
  }

  // Unassigned variables of which at least one must become true for node n
  // (false under `lo`, true under `hi`) to become true.
  void clause(int n, const std::vector<bool> &lo, const std::vector<bool> &hi, std::vector<bool> &on_stack,
              std::set<int> &out) const {
    const auto &node = p_.nodes[n];
    switch (node.op) {
      case NodeOp::Const: return;
      case NodeOp::Out:
        if (assign_[node.ref] < 0) out.insert(node.ref);
        return;
      case NodeOp::Def:
        if (on_stack[node.ref]) {
          for (int v : def_support_[node.ref])
            if (assign_[v] < 0) out.insert(v);
          return;
        }
        on_stack[node.ref] = true;
        clause(p_.defs[node.ref].expr, lo, hi, on_stack, out);
        on_stack[node.ref] = false;
        return;
      case NodeOp::And:
        for (int k : node.kids) {
          if (!lo[k]) {
            clause(k, lo, hi, on_stack, out);
            return;
          }
        }
        return;
      case NodeOp::Or:
        for (int k : node.kids)
          if (hi[k]) clause(k, lo, hi, on_stack, out);
        return;
    }
  }

  void dfs() {
    tick();
    long base = fixed_cost();
    if (base > limit_) return;
    auto hi = eval_.nodes(completion(true));
    for (const auto &a : p_.assertions)
      if (!hi[a.expr]) return;
    auto lo_assign = completion(false);
    auto lo = eval_.nodes(lo_assign);
    std::vector<std::vector<int>> clauses;
    std::vector<bool> on_stack(p_.defs.size(), false);
    for (const auto &a : p_.assertions) {
      if (lo[a.expr]) continue;
      std::set<int> c;
      clause(a.expr, lo, hi, on_stack, c);
      if (c.empty()) throw std::logic_error("solver: empty clause for a feasible assertion");
      clauses.emplace_back(c.begin(), c.end());
    }
    if (clauses.empty()) {
      best_ = lo_assign;
      found_ = true;
      if (minimize_) limit_ = base - 1;
      return;
    }
    // Lower bound from pairwise disjoint clauses.
    std::vector<std::size_t> by_size(clauses.size());
    for (std::size_t i = 0; i < by_size.size(); ++i) by_size[i] = i;
    std::stable_sort(by_size.begin(), by_size.end(),
                     [&](std::size_t a, std::size_t b) { return clauses[a].size() < clauses[b].size(); });
    std::set<int> used;
    long lb = base;
    for (std::size_t i : by_size) {
      const auto &c = clauses[i];
      if (std::any_of(c.begin(), c.end(), [&](int v) { return used.count(v) > 0; })) continue;
      long m = std::numeric_limits<long>::max();
      for (int v : c) {
        m = std::min(m, p_.vars[v].cost);
        used.insert(v);
      }
      lb += m;
    }
    if (lb > limit_) return;

    const auto &branch = clauses[by_size.front()];
    for (std::size_t i = 0; i < branch.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) assign_[branch[j]] = 0;
      assign_[branch[i]] = 1;
      ++stats.decisions;
      dfs();
      for (std::size_t j = 0; j <= i; ++j) assign_[branch[j]] = -1;
      if (found_ && !minimize_) return;
    }
  }

  const Problem &p_;
  encode::Evaluator eval_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::vector<std::set<int>> def_support_;
  long limit_ = 0;
  bool minimize_ = true;
  bool found_ = false;
  std::optional<std::vector<bool>> best_;
};

}  // namespace

Assignment solve_min(const Problem &p, std::optional<std::chrono::milliseconds> budget) {
  Assignment out;
  const std::size_t n = p.vars.size();
  std::vector<bool> all(n, true);
  encode::Evaluator eval(p);
  if (!eval.satisfied(all)) throw std::logic_error("solver: problem is unsatisfiable with every output set");
  out.values = all;
  out.cost = p.cost(all);

  Search s(p, budget);
  std::vector<bool> witness = all;
  bool phase1 = true;
  try {
    // Phase 1: optimal cost.
    auto best = s.run(out.cost, true);
    if (best) {
      out.values = *best;
      out.cost = p.cost(*best);
    }
    phase1 = false;
    // Phase 2: lexicographically smallest optimal assignment, fixing one
    // variable at a time and reusing the current witness when it agrees.
    witness = out.values;
    for (std::size_t i = 0; i < n; ++i) {
      if (!witness[i]) {
        s.assign_[i] = 0;
        continue;
      }
      s.assign_[i] = 0;
      auto alt = s.run(out.cost, false);
      if (alt) {
        witness = *alt;
      } else {
        s.assign_[i] = 1;
      }
    }
    out.values = witness;
    out.cost = p.cost(witness);
  } catch (const BudgetHit &) {
    out.status = Status::BudgetExceeded;
    if (phase1 && s.last_found()) witness = *s.last_found();
    if (phase1 && !s.last_found()) witness = out.values;
    out.values = witness;
    out.cost = p.cost(witness);
  }
  out.stats = s.stats;
  return out;
}

}  // namespace rmcfence::solver
