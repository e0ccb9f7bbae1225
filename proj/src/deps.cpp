#include "rmcfence/deps.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>

namespace rmcfence::deps {

using ir::Instruction;
using ir::kNone;

namespace {

std::vector<bool> reach(const NormalizedCFG &cfg, BlockId from, std::optional<BlockId> avoid, bool forward) {
  std::vector<bool> seen(cfg.num_blocks(), false);
  if (avoid && *avoid == from) return seen;
  std::vector<BlockId> work{from};
  seen[from] = true;
  while (!work.empty()) {
    BlockId x = work.back();
    work.pop_back();
    const auto &adj = forward ? cfg.out_edges[x] : cfg.in_edges[x];
    for (EdgeId e : adj) {
      BlockId y = forward ? cfg.edges[e].dst : cfg.edges[e].src;
      if (seen[y] || (avoid && *avoid == y)) continue;
      seen[y] = true;
      work.push_back(y);
    }
  }
  return seen;
}

const Instruction &def_of(const NormalizedCFG &cfg, ValueId v) {
  const auto &val = cfg.fn.values[v];
  return cfg.fn.blocks[val.block].instrs[val.index];
}

bool is_source(const NormalizedCFG &cfg, ActionId s, ValueId v) { return cfg.fn.actions[s].value == v; }

}  // namespace

std::vector<bool> admissible_region(const NormalizedCFG &cfg, const graph::Path &p, std::optional<BlockId> b) {
  auto fwd = reach(cfg, p.head(), b, true);
  auto bwd = reach(cfg, p.tail(), b, false);
  std::vector<bool> out(cfg.num_blocks(), false);
  for (BlockId x = 0; x < cfg.num_blocks(); ++x) out[x] = fwd[x] && bwd[x];
  for (BlockId x : p.blocks) out[x] = true;
  return out;
}

bool value_depends(const NormalizedCFG &cfg, ActionId s, ValueId v, const std::vector<bool> &region) {
  const int nv = static_cast<int>(cfg.fn.values.size());
  auto arm_ok = [&](const ir::PhiArm &arm) { return region[arm.pred]; };

  // Least fixpoint: some finite chain from s reaches the value.
  std::vector<bool> grounded(nv, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (ValueId x = 0; x < nv; ++x) {
      if (grounded[x]) continue;
      bool g = false;
      if (is_source(cfg, s, x)) {
        g = true;
      } else {
        const auto &in = def_of(cfg, x);
        if (in.kind == Instruction::Kind::Op) {
          for (const auto &a : in.args) g = g || (!a.is_literal && grounded[a.value]);
        } else if (in.kind == Instruction::Kind::Phi) {
          for (const auto &arm : in.arms) g = g || (arm_ok(arm) && !arm.value.is_literal && grounded[arm.value.value]);
        }
      }
      if (g) {
        grounded[x] = true;
        changed = true;
      }
    }
  }

  // Greatest fixpoint restricted to grounded values.
  std::vector<bool> dep = grounded;
  for (bool changed = true; changed;) {
    changed = false;
    for (ValueId x = 0; x < nv; ++x) {
      if (!dep[x] || is_source(cfg, s, x)) continue;
      const auto &in = def_of(cfg, x);
      bool d = false;
      if (in.kind == Instruction::Kind::Op) {
        for (const auto &a : in.args) d = d || (!a.is_literal && dep[a.value]);
      } else if (in.kind == Instruction::Kind::Phi) {
        bool any = false;
        d = true;
        for (const auto &arm : in.arms) {
          if (!arm_ok(arm)) continue;
          any = true;
          d = d && !arm.value.is_literal && dep[arm.value.value];
        }
        d = d && any;
      }
      if (!d) {
        dep[x] = false;
        changed = true;
      }
    }
  }
  return dep[v];
}

std::vector<ValueId> dependency_operands(const NormalizedCFG &cfg, ActionId t) {
  const auto &in = cfg.fn.action_instr(t);
  std::vector<ValueId> out;
  using ir::ActionKind;
  if (in.action == ActionKind::Read || in.action == ActionKind::Write || in.action == ActionKind::Rmw) {
    if (!in.loc.is_global) out.push_back(in.loc.pointer);
  }
  if ((in.action == ActionKind::Write || in.action == ActionKind::Rmw) && !in.data.is_literal) {
    out.push_back(in.data.value);
  }
  return out;
}

bool can_ctrl(const NormalizedCFG &cfg, ActionId s, EdgeId e, bool synth) {
  const auto &edge = cfg.edges[e];
  if (edge.pseudo || cfg.fn.actions[s].value == kNone) return false;
  BlockId sb = cfg.action_block[s];
  if (synth && sb != edge.src && cfg.dominates(sb, edge.src)) return true;
  const auto &term = cfg.fn.blocks[edge.src].term;
  if (term.kind != ir::Terminator::Kind::Branch || term.cond.is_literal) return false;
  std::vector<bool> all(cfg.num_blocks(), true);
  return value_depends(cfg, s, term.cond.value, all);
}

DataFact data_fact(const NormalizedCFG &cfg, std::optional<BlockId> b, ActionId s, ActionId t,
                   const graph::Path &p) {
  DataFact out;
  if (cfg.fn.actions[s].value == kNone) return out;
  if (graph::has_pseudo_edge(cfg, p)) return out;
  if (b && std::find(p.blocks.begin(), p.blocks.end(), *b) != p.blocks.end()) return out;
  auto operands = dependency_operands(cfg, t);
  if (operands.empty()) return out;

  // Backward operand cone of t's dependency operands.
  std::vector<ValueId> cone;
  std::map<ValueId, int> slot;
  std::vector<ValueId> work(operands.begin(), operands.end());
  while (!work.empty()) {
    ValueId v = work.back();
    work.pop_back();
    if (slot.count(v)) continue;
    slot[v] = static_cast<int>(cone.size());
    cone.push_back(v);
    const auto &in = def_of(cfg, v);
    if (in.kind == Instruction::Kind::Op) {
      for (const auto &a : in.args)
        if (!a.is_literal) work.push_back(a.value);
    } else if (in.kind == Instruction::Kind::Phi) {
      for (const auto &arm : in.arms)
        if (!arm.value.is_literal) work.push_back(arm.value.value);
    }
  }
  if (cone.size() > 64) return out;  // conservatively no dependency
  using Flags = std::uint64_t;
  auto bit = [&](ValueId v) -> Flags { return Flags{1} << slot.at(v); };
  auto flag_of = [&](Flags f, const ir::Operand &o) {
    return !o.is_literal && slot.count(o.value) && (f & bit(o.value));
  };

  // Per block: instructions defining cone values, in order.
  const int nb = cfg.num_blocks();
  std::vector<std::vector<ValueId>> defs(nb);
  for (ValueId v : cone) defs[cfg.fn.values[v].block].push_back(v);
  for (auto &d : defs)
    std::sort(d.begin(), d.end(), [&](ValueId x, ValueId y) { return cfg.fn.values[x].index < cfg.fn.values[y].index; });

  auto execute = [&](Flags f, BlockId from, BlockId to) {
    Flags next = f;
    for (ValueId v : defs[to]) {
      const auto &in = def_of(cfg, v);
      if (in.kind != Instruction::Kind::Phi) continue;
      bool val = false;
      for (const auto &arm : in.arms)
        if (arm.pred == from) val = flag_of(f, arm.value);  // parallel: read old flags
      next = val ? next | bit(v) : next & ~bit(v);
    }
    for (ValueId v : defs[to]) {
      const auto &in = def_of(cfg, v);
      bool val = false;
      if (in.kind == Instruction::Kind::Phi) continue;
      if (is_source(cfg, s, v)) {
        val = true;
      } else if (in.kind == Instruction::Kind::Op) {
        for (const auto &a : in.args) val = val || flag_of(next, a);
      }
      next = val ? next | bit(v) : next & ~bit(v);
    }
    return next;
  };

  // Index of each block on the path prefix p[0..n-1]; p[n] may equal p[0].
  const int n = static_cast<int>(p.blocks.size()) - 1;
  std::vector<int> pos(nb, -1);
  for (int i = n - 1; i >= 0; --i) pos[p.blocks[i]] = i;
  if (pos[p.blocks[n]] < 0) pos[p.blocks[n]] = n;

  // State: loop-erased walk is p[0..stage] (on) or p[0..stage] followed by
  // blocks off the path (off); current block; flags.
  struct State {
    int stage;
    bool on;
    BlockId at;
    Flags flags;
    auto operator<=>(const State &) const = default;
  };
  Flags init = 0;
  ValueId sv = cfg.fn.actions[s].value;
  if (slot.count(sv)) init |= bit(sv);
  std::set<State> seen;
  std::vector<State> queue{{0, true, p.blocks[0], init}};
  bool all = true;
  Flags ever = 0;
  while (!queue.empty()) {
    State st = queue.back();
    queue.pop_back();
    if (!seen.insert(st).second) continue;
    for (EdgeId e : cfg.out_edges[st.at]) {
      const auto &edge = cfg.edges[e];
      if (edge.pseudo) continue;
      BlockId y = edge.dst;
      if (b && *b == y) continue;
      if (st.on && st.stage == n - 1 && st.at == p.blocks[n - 1] && y == p.blocks[n]) {
        // Final arrival at t's block; t's operands are read before anything
        // in the block executes.
        bool d = false;
        for (ValueId o : operands) d = d || (st.flags & bit(o));
        all = all && d;
        ever |= st.flags;
      }
      Flags f = execute(st.flags, st.at, y);
      int k = pos[y];
      State next{st.stage, false, y, f};
      if (st.on && st.stage + 1 <= n && y == p.blocks[st.stage + 1] && k != 0) {
        next = {st.stage + 1, true, y, f};
      } else if (k >= 0 && k <= st.stage) {
        next = {k, true, y, f};
      }
      queue.push_back(next);
    }
  }
  out.can = all;
  if (all) {
    for (ValueId v : cone)
      if (ever & bit(v)) out.signature.push_back(v);
    std::sort(out.signature.begin(), out.signature.end());
  }
  return out;
}

}  // namespace rmcfence::deps
