#include "rmcfence/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "rmcfence/graph.hpp"

namespace rmcfence::verify {

using constraints::ConstraintEdge;
using constraints::Side;
using ir::ActionKind;
using ir::EdgeKind;
using ir::Instruction;
using ir::kNone;

namespace {

using BlockSeq = std::vector<BlockId>;

bool value_action(ActionKind k) { return k == ActionKind::Read || k == ActionKind::Rmw; }

// Plain recursive enumeration of simple paths (cycles when from == to).
std::vector<BlockSeq> all_paths(const NormalizedCFG &cfg, BlockId from, BlockId to, std::optional<BlockId> avoid) {
  std::vector<BlockSeq> out;
  if (avoid && (*avoid == from || *avoid == to)) return out;
  BlockSeq cur{from};
  std::function<void(BlockId)> rec = [&](BlockId at) {
    for (const auto &e : cfg.edges) {
      if (e.src != at) continue;
      if (avoid && e.dst == *avoid) continue;
      if (e.dst == to) {
        cur.push_back(to);
        out.push_back(cur);
        cur.pop_back();
      } else if (std::find(cur.begin(), cur.end(), e.dst) == cur.end()) {
        cur.push_back(e.dst);
        rec(e.dst);
        cur.pop_back();
      }
    }
  };
  rec(from);
  return out;
}

EdgeId edge_between(const NormalizedCFG &cfg, BlockId a, BlockId b) {
  for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e)
    if (cfg.edges[e].src == a && cfg.edges[e].dst == b) return e;
  return kNone;
}

std::vector<EdgeId> edges_of(const NormalizedCFG &cfg, const BlockSeq &p) {
  std::vector<EdgeId> out;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) out.push_back(edge_between(cfg, p[i], p[i + 1]));
  return out;
}

std::string seq_text(const NormalizedCFG &cfg, const BlockSeq &p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + cfg.block_name(p[i]);
  return s + "]";
}

const Instruction &instr_of(const NormalizedCFG &cfg, ActionId a) {
  for (const auto &bb : cfg.fn.blocks)
    for (const auto &in : bb.instrs)
      if (in.kind == Instruction::Kind::Action && in.action_id == a) return in;
  throw std::logic_error("verify: action without instruction");
}

const Instruction *definition(const NormalizedCFG &cfg, ValueId v) {
  for (const auto &bb : cfg.fn.blocks)
    for (const auto &in : bb.instrs)
      if (in.result == v) return &in;
  return nullptr;
}

std::vector<ValueId> operand_values(const NormalizedCFG &cfg, ActionId t) {
  const auto &in = instr_of(cfg, t);
  std::vector<ValueId> out;
  bool has_loc = in.action == ActionKind::Read || in.action == ActionKind::Write || in.action == ActionKind::Rmw;
  if (has_loc && !in.loc.is_global) out.push_back(in.loc.pointer);
  bool has_data = in.action == ActionKind::Write || in.action == ActionKind::Rmw;
  if (has_data && !in.data.is_literal) out.push_back(in.data.value);
  return out;
}

// Static dependence of v on s's value, computed as the complement of the
// values that can be shown independent.
bool depends_statically(const NormalizedCFG &cfg, ActionId s, ValueId v) {
  const ValueId sv = cfg.fn.actions[s].value;
  const int nv = static_cast<int>(cfg.fn.values.size());
  // Forward reachability from s through uses.
  std::vector<bool> reached(nv, false);
  std::vector<ValueId> work{sv};
  reached[sv] = true;
  while (!work.empty()) {
    ValueId x = work.back();
    work.pop_back();
    for (const auto &bb : cfg.fn.blocks) {
      for (const auto &in : bb.instrs) {
        bool uses = false;
        if (in.kind == Instruction::Kind::Op)
          for (const auto &a : in.args) uses = uses || (!a.is_literal && a.value == x);
        if (in.kind == Instruction::Kind::Phi)
          for (const auto &arm : in.arms) uses = uses || (!arm.value.is_literal && arm.value.value == x);
        if (uses && !reached[in.result]) {
          reached[in.result] = true;
          work.push_back(in.result);
        }
      }
    }
  }
  std::vector<bool> bad(nv, false);
  for (ValueId x = 0; x < nv; ++x) bad[x] = !reached[x];
  auto bad_operand = [&](const ir::Operand &o) { return o.is_literal || bad[o.value]; };
  for (bool grew = true; grew;) {
    grew = false;
    for (ValueId x = 0; x < nv; ++x) {
      if (bad[x] || x == sv) continue;
      const Instruction *in = definition(cfg, x);
      bool b = false;
      if (in->kind == Instruction::Kind::Op) {
        b = std::all_of(in->args.begin(), in->args.end(), bad_operand);
      } else if (in->kind == Instruction::Kind::Phi) {
        b = std::any_of(in->arms.begin(), in->arms.end(), [&](const ir::PhiArm &a) { return bad_operand(a.value); });
      } else {
        b = true;
      }
      if (b) {
        bad[x] = true;
        grew = true;
      }
    }
  }
  return !bad[v];
}

struct DataCheck {
  bool can = false;
  std::set<ValueId> signature;
};

// Explores executions that start at s and end on an arrival at t's block
// whose loop-erased history is the path. Tracks the loop-erased history
// explicitly together with per-value dependence flags.
DataCheck data_check(const NormalizedCFG &cfg, std::optional<BlockId> avoid, ActionId s, ActionId t,
                     const BlockSeq &p) {
  DataCheck out;
  const ValueId sv = cfg.fn.actions[s].value;
  if (sv == kNone || p.size() < 2) return out;
  for (EdgeId e : edges_of(cfg, p))
    if (e == kNone || cfg.edges[e].pseudo) return out;
  auto ops = operand_values(cfg, t);
  if (ops.empty()) return out;
  std::set<ValueId> cone;
  std::function<void(ValueId)> collect = [&](ValueId v) {
    if (!cone.insert(v).second) return;
    const Instruction *in = definition(cfg, v);
    if (in->kind == Instruction::Kind::Op)
      for (const auto &a : in->args)
        if (!a.is_literal) collect(a.value);
    if (in->kind == Instruction::Kind::Phi)
      for (const auto &arm : in->arms)
        if (!arm.value.is_literal) collect(arm.value.value);
  };
  for (ValueId o : ops) collect(o);

  const BlockSeq prefix(p.begin(), p.end() - 1);
  using Env = std::vector<char>;
  using State = std::tuple<BlockId, BlockSeq, Env>;
  std::set<State> seen;
  Env env0(cfg.fn.values.size(), 0);
  env0[sv] = 1;
  std::vector<State> work{{p.front(), BlockSeq{p.front()}, env0}};
  bool all = true;
  while (!work.empty()) {
    State st = work.back();
    work.pop_back();
    if (!seen.insert(st).second) continue;
    const auto &[at, le, env] = st;
    for (const auto &e : cfg.edges) {
      if (e.src != at || e.pseudo) continue;
      if (avoid && e.dst == *avoid) continue;
      if (at == p[p.size() - 2] && e.dst == p.back() && le == prefix) {
        bool d = std::any_of(ops.begin(), ops.end(), [&](ValueId o) { return env[o] != 0; });
        all = all && d;
        for (ValueId v : cone)
          if (env[v]) out.signature.insert(v);
      }
      Env next = env;
      const auto &bb = cfg.fn.blocks[e.dst];
      for (const auto &in : bb.instrs)
        if (in.kind == Instruction::Kind::Phi)
          for (const auto &arm : in.arms)
            if (arm.pred == at) next[in.result] = !arm.value.is_literal && env[arm.value.value];
      for (const auto &in : bb.instrs) {
        if (in.kind == Instruction::Kind::Op) {
          char v = 0;
          for (const auto &a : in.args) v = v || (!a.is_literal && next[a.value]);
          next[in.result] = v;
        } else if (in.kind == Instruction::Kind::Action && in.result != kNone) {
          next[in.result] = in.action_id == s;
        }
      }
      BlockSeq le2 = le;
      auto it = std::find(le2.begin(), le2.end(), e.dst);
      if (it != le2.end()) le2.erase(it + 1, le2.end());
      else le2.push_back(e.dst);
      work.emplace_back(e.dst, std::move(le2), std::move(next));
    }
  }
  out.can = all;
  if (!all) out.signature.clear();
  return out;
}

// What a plan switches on, resolved against the function.
struct Implied {
  std::set<std::pair<EdgeId, std::string>> barriers;
  std::set<std::pair<ActionId, EdgeId>> ctrl;
  std::map<std::tuple<ActionId, ActionId, std::optional<std::string>>, std::set<std::set<ValueId>>> data;
  std::set<ActionId> acquire, release;
};

class Checker {
 public:
  Checker(const NormalizedCFG &cfg, const arch::ArchProfile &profile, const Implied &plan)
      : cfg_(cfg), profile_(profile), plan_(plan) {}

  bool has_barrier(EdgeId e, const std::function<bool(const arch::BarrierKind &)> &ok) const {
    for (const auto &k : profile_.kinds)
      if (ok(k) && plan_.barriers.count({e, k.id})) return true;
    return false;
  }

  bool on_path(const BlockSeq &p, const std::function<bool(const arch::BarrierKind &)> &ok) const {
    for (EdgeId e : edges_of(cfg_, p))
      if (has_barrier(e, ok)) return true;
    return false;
  }

  ActionKind kind(ActionId a) const { return cfg_.fn.actions[a].kind; }

  bool push_cut(const BlockSeq &p) const {
    return on_path(p, [](const arch::BarrierKind &k) { return k.cuts_push; });
  }

  bool vis_cut(ActionId t, const BlockSeq &p) const {
    if (profile_.vis_exec_free) return true;
    if (kind(t) == ActionKind::Write && plan_.release.count(t)) return true;
    return on_path(p, [](const arch::BarrierKind &k) { return k.cuts_vis; });
  }

  bool ctrl_on(ActionId s, const BlockSeq &p) const {
    for (EdgeId e : edges_of(cfg_, p))
      if (plan_.ctrl.count({s, e})) return true;
    return false;
  }

  const std::vector<BlockSeq> &paths(BlockId a, BlockId b, std::optional<BlockId> avoid) {
    auto key = std::make_tuple(a, b, avoid);
    auto it = paths_.find(key);
    if (it == paths_.end()) it = paths_.emplace(key, all_paths(cfg_, a, b, avoid)).first;
    return it->second;
  }

  std::optional<BlockId> bind_block(const std::optional<std::string> &b) const {
    if (!b) return std::nullopt;
    return cfg_.bind_block.at(*b);
  }

  bool data_on(std::optional<BlockId> avoid, const std::optional<std::string> &bname, ActionId s, ActionId t,
               const BlockSeq &p) {
    auto it = plan_.data.find({s, t, bname});
    if (it == plan_.data.end()) return false;
    auto d = data_check(cfg_, avoid, s, t, p);
    return d.can && it->second.count(d.signature);
  }

  // Greatest fixpoint over the self-ordering facts xcut(b,s,s).
  void solve_self(const std::vector<std::pair<std::optional<std::string>, ActionId>> &keys) {
    for (const auto &k : keys) self_[k] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto &[bname, s] : keys) {
        if (!self_[{bname, s}]) continue;
        auto avoid = bind_block(bname);
        BlockId sb = cfg_.action_block[s];
        bool ok = true;
        for (const auto &c : paths(sb, sb, avoid)) ok = ok && exec_cut(bname, s, s, c);
        if (!ok) {
          self_[{bname, s}] = false;
          changed = true;
        }
      }
    }
  }

  bool self_ordered(const std::optional<std::string> &bname, ActionId s) const {
    auto it = self_.find({bname, s});
    return it != self_.end() && it->second;
  }

  bool ctrl_self(const std::optional<std::string> &bname, ActionId s) {
    BlockId sb = cfg_.action_block[s];
    for (const auto &c : paths(sb, sb, bind_block(bname)))
      if (!ctrl_on(s, c)) return false;
    return true;
  }

  bool exec_cut(const std::optional<std::string> &bname, ActionId s, ActionId t, const BlockSeq &p) {
    if (vis_cut(t, p)) return true;
    bool s_reads = value_action(kind(s));
    if (on_path(p, [&](const arch::BarrierKind &k) { return k.cuts_exec_any || (s_reads && k.cuts_exec_from_read); }))
      return true;
    if (!s_reads) return false;
    if (plan_.acquire.count(s)) return true;
    if (kind(t) == ActionKind::Write && ctrl_on(s, p) && (self_ordered(bname, s) || ctrl_self(bname, s))) return true;
    return data_on(bind_block(bname), bname, s, t, p) && self_ordered(bname, s);
  }

 private:
  const NormalizedCFG &cfg_;
  const arch::ArchProfile &profile_;
  const Implied &plan_;
  std::map<std::tuple<BlockId, BlockId, std::optional<BlockId>>, std::vector<BlockSeq>> paths_;
  std::map<std::pair<std::optional<std::string>, ActionId>, bool> self_;
};

struct Violations {
  std::vector<std::string> lines;
};

// Checks every constraint; returns uncut (constraint, path) descriptions.
std::vector<std::string> uncut(const NormalizedCFG &cfg, const std::vector<ConstraintEdge> &edges,
                               const std::vector<constraints::BoundaryConstraint> &boundaries,
                               const arch::ArchProfile &profile, const Implied &plan) {
  Checker ck(cfg, profile, plan);
  std::vector<std::pair<std::optional<std::string>, ActionId>> self_keys;
  for (const auto &e : edges)
    if (e.kind == EdgeKind::Xo && value_action(cfg.fn.actions[e.source].kind)) self_keys.push_back({e.binding, e.source});
  std::sort(self_keys.begin(), self_keys.end());
  self_keys.erase(std::unique(self_keys.begin(), self_keys.end()), self_keys.end());
  ck.solve_self(self_keys);

  std::vector<std::string> out;
  const auto &acts = cfg.fn.actions;
  for (const auto &e : edges) {
    auto avoid = ck.bind_block(e.binding);
    for (const auto &p : ck.paths(cfg.action_block[e.source], cfg.action_block[e.dest], avoid)) {
      bool ok = false;
      switch (e.kind) {
        case EdgeKind::Pu: ok = ck.push_cut(p); break;
        case EdgeKind::Vo: ok = ck.vis_cut(e.dest, p); break;
        case EdgeKind::Xo: ok = profile.vis_exec_free || ck.exec_cut(e.binding, e.source, e.dest, p); break;
      }
      if (!ok)
        out.push_back(fmt::format("UNCUT {} {}->{} via {}", ir::to_string(e.kind), acts[e.source].name,
                                  acts[e.dest].name, seq_text(cfg, p)));
    }
  }
  for (const auto &bc : boundaries) {
    if (profile.vis_exec_free) continue;
    ActionId a = bc.action;
    BlockId ab = cfg.action_block[a];
    bool vo = bc.kind == EdgeKind::Vo;
    bool reads = value_action(acts[a].kind);
    if (bc.side == Side::Pre) {
      bool release = acts[a].kind == ActionKind::Write && plan.release.count(a);
      for (const auto &e : cfg.edges) {
        if (e.dst != ab) continue;
        EdgeId id = edge_between(cfg, e.src, e.dst);
        bool ok = release || ck.has_barrier(id, [&](const arch::BarrierKind &k) { return vo ? k.cuts_vis : k.cuts_exec_any; });
        if (!ok)
          out.push_back(fmt::format("UNCUT {} pre->{} via {}", ir::to_string(bc.kind), acts[a].name,
                                    seq_text(cfg, {e.src, e.dst})));
      }
    } else {
      bool acquire = !vo && reads && plan.acquire.count(a);
      for (const auto &e : cfg.edges) {
        if (e.src != ab) continue;
        EdgeId id = edge_between(cfg, e.src, e.dst);
        bool ok = acquire || ck.has_barrier(id, [&](const arch::BarrierKind &k) {
                    return vo ? k.cuts_vis : (k.cuts_exec_any || (reads && k.cuts_exec_from_read));
                  });
        if (!ok)
          out.push_back(fmt::format("UNCUT {} {}->post via {}", ir::to_string(bc.kind), acts[a].name,
                                    seq_text(cfg, {e.src, e.dst})));
      }
    }
  }
  return out;
}

BlockId named_block(const NormalizedCFG &cfg, const std::string &name, std::vector<std::string> &errors) {
  for (BlockId b = 0; b < cfg.num_blocks(); ++b)
    if (cfg.fn.blocks[b].name == name) return b;
  errors.push_back(fmt::format("unknown block '{}'", name));
  return kNone;
}

ActionId named_action(const NormalizedCFG &cfg, const std::string &name, std::vector<std::string> &errors) {
  for (ActionId a = 0; a < static_cast<ActionId>(cfg.fn.actions.size()); ++a)
    if (cfg.fn.actions[a].name == name) return a;
  errors.push_back(fmt::format("unknown action '{}'", name));
  return kNone;
}

Implied resolve_plan(const NormalizedCFG &cfg, const arch::ArchProfile &profile, const emit::PlacementPlan &plan,
                     std::vector<std::string> &errors) {
  Implied im;
  auto edge = [&](const std::string &a, const std::string &b) -> EdgeId {
    BlockId x = named_block(cfg, a, errors), y = named_block(cfg, b, errors);
    if (x == kNone || y == kNone) return kNone;
    EdgeId e = edge_between(cfg, x, y);
    if (e == kNone) errors.push_back(fmt::format("no CFG edge {} -> {}", a, b));
    return e;
  };
  for (const auto &b : plan.barriers) {
    EdgeId e = edge(b.source_block, b.dest_block);
    bool known = std::any_of(profile.kinds.begin(), profile.kinds.end(), [&](const auto &k) { return k.id == b.kind; });
    if (!known) errors.push_back(fmt::format("barrier kind '{}' is not available on {}", b.kind, profile.name));
    if (e != kNone && known) im.barriers.insert({e, b.kind});
  }
  for (const auto &c : plan.ctrl_uses) {
    EdgeId e = edge(c.source_block, c.dest_block);
    ActionId s = named_action(cfg, c.source, errors);
    if (e == kNone || s == kNone) continue;
    if (!value_action(cfg.fn.actions[s].kind)) {
      errors.push_back(fmt::format("control dependency on '{}', which reads nothing", c.source));
      continue;
    }
    const auto &edge_ref = cfg.edges[e];
    bool usable = false;
    if (c.mode == "existing") {
      const auto &term = cfg.fn.blocks[edge_ref.src].term;
      usable = !edge_ref.pseudo && term.kind == ir::Terminator::Kind::Branch && !term.cond.is_literal &&
               depends_statically(cfg, s, term.cond.value);
    } else if (c.mode == "synth") {
      BlockId sb = cfg.action_block[s];
      usable = !edge_ref.pseudo && sb != edge_ref.src && cfg.dominates(sb, edge_ref.src);
    }
    if (!usable) {
      errors.push_back(fmt::format("no {} control dependency from {} on {} -> {}", c.mode, c.source, c.source_block,
                                   c.dest_block));
      continue;
    }
    im.ctrl.insert({s, e});
  }
  for (const auto &d : plan.data_uses) {
    ActionId s = named_action(cfg, d.source, errors), t = named_action(cfg, d.dest, errors);
    if (s == kNone || t == kNone) continue;
    BlockSeq p;
    for (const auto &n : d.path) p.push_back(named_block(cfg, n, errors));
    if (std::find(p.begin(), p.end(), kNone) != p.end()) continue;
    std::optional<BlockId> avoid;
    if (d.binding) {
      auto it = cfg.bind_block.find(*d.binding);
      if (it == cfg.bind_block.end()) {
        errors.push_back(fmt::format("unknown binding '{}'", *d.binding));
        continue;
      }
      avoid = it->second;
    }
    bool shaped = p.size() >= 2 && p.front() == cfg.action_block[s] && p.back() == cfg.action_block[t];
    auto check = shaped ? data_check(cfg, avoid, s, t, p) : DataCheck{};
    if (!check.can) {
      errors.push_back(fmt::format("no data dependency {}->{} along {}", d.source, d.dest, seq_text(cfg, p)));
      continue;
    }
    im.data[{s, t, d.binding}].insert(check.signature);
  }
  for (const auto &m : plan.action_modes) {
    ActionId a = named_action(cfg, m.action, errors);
    if (a == kNone) continue;
    auto k = cfg.fn.actions[a].kind;
    if (m.mode == "acquire" && profile.has_mode(arch::Mode::Acquire) && value_action(k)) {
      im.acquire.insert(a);
    } else if (m.mode == "release" && profile.has_mode(arch::Mode::Release) && k == ActionKind::Write) {
      im.release.insert(a);
    } else {
      errors.push_back(fmt::format("mode '{}' is not applicable to '{}' on {}", m.mode, m.action, profile.name));
    }
  }
  return im;
}

}  // namespace

Verdict check_plan(const NormalizedCFG &cfg, const std::vector<ConstraintEdge> &edges,
                   const std::vector<constraints::BoundaryConstraint> &boundaries, const arch::ArchProfile &profile,
                   const emit::PlacementPlan &plan) {
  Verdict v;
  auto implied = resolve_plan(cfg, profile, plan, v.errors);
  v.violations = uncut(cfg, edges, boundaries, profile, implied);
  v.valid = v.errors.empty() && v.violations.empty();
  return v;
}

long brute_min(const encode::Problem &p, std::size_t cap) {
  const std::size_t n = p.vars.size();
  if (n > cap) throw CapExceeded(fmt::format("{} output variables exceed the cap of {}", n, cap));
  std::function<bool(int, const std::vector<bool> &, const std::vector<bool> &)> val =
      [&](int id, const std::vector<bool> &assign, const std::vector<bool> &defs) -> bool {
    const auto &node = p.nodes[id];
    switch (node.op) {
      case encode::NodeOp::Const: return node.value;
      case encode::NodeOp::Out: return assign[node.ref];
      case encode::NodeOp::Def: return defs[node.ref];
      case encode::NodeOp::And:
        for (int k : node.kids)
          if (!val(k, assign, defs)) return false;
        return true;
      case encode::NodeOp::Or:
        for (int k : node.kids)
          if (val(k, assign, defs)) return true;
        return false;
    }
    return false;
  };
  long best = -1;
  std::vector<bool> assign(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    long cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      assign[i] = (mask >> i) & 1;
      if (assign[i]) cost += p.vars[i].cost;
    }
    if (best >= 0 && cost >= best) continue;
    std::vector<bool> defs(p.defs.size(), true);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t d = 0; d < defs.size(); ++d) {
        if (defs[d] && !val(p.defs[d].expr, assign, defs)) {
          defs[d] = false;
          changed = true;
        }
      }
    }
    bool ok = std::all_of(p.assertions.begin(), p.assertions.end(),
                          [&](const encode::Assertion &a) { return val(a.expr, assign, defs); });
    if (ok) best = cost;
  }
  if (best < 0) throw std::logic_error("brute_min: no satisfying assignment");
  return best;
}

emit::PlacementPlan greedy(const NormalizedCFG &cfg, const std::vector<ConstraintEdge> &edges,
                           const std::vector<constraints::BoundaryConstraint> &boundaries,
                           const arch::ArchProfile &profile, const arch::CostTable &costs) {
  auto weights = graph::edge_weights(cfg, costs.loop_factor);
  Implied im;
  auto cheapest = [&](const std::function<bool(const arch::BarrierKind &)> &ok) {
    const arch::BarrierKind *best = nullptr;
    for (const auto &k : profile.kinds)
      if (ok(k) && (!best || costs.kind.at(k.id) < costs.kind.at(best->id))) best = &k;
    return best->id;
  };
  const auto &acts = cfg.fn.actions;

  // Constraint edges and boundaries, merged by declaration.
  struct Item {
    int decl;
    bool boundary;
    int index;
  };
  std::vector<Item> items;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) items.push_back({edges[i].decl_index, false, i});
  for (int i = 0; i < static_cast<int>(boundaries.size()); ++i) items.push_back({boundaries[i].decl_index, true, i});
  std::stable_sort(items.begin(), items.end(), [](const Item &a, const Item &b) { return a.decl < b.decl; });

  for (const auto &item : items) {
    if (item.boundary) {
      if (profile.vis_exec_free) continue;
      const auto &bc = boundaries[item.index];
      bool vo = bc.kind == EdgeKind::Vo;
      bool reads = value_action(acts[bc.action].kind);
      BlockId ab = cfg.action_block[bc.action];
      std::function<bool(const arch::BarrierKind &)> ok = [&](const arch::BarrierKind &k) {
        if (vo) return k.cuts_vis;
        return k.cuts_exec_any || (bc.side == Side::Post && reads && k.cuts_exec_from_read);
      };
      std::string kind = cheapest(ok);
      for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e) {
        bool adjacent = bc.side == Side::Pre ? cfg.edges[e].dst == ab : cfg.edges[e].src == ab;
        if (!adjacent) continue;
        Checker ck(cfg, profile, im);
        if (!ck.has_barrier(e, ok)) im.barriers.insert({e, kind});
      }
      continue;
    }
    const auto &ce = edges[item.index];
    bool reads = value_action(acts[ce.source].kind);
    std::function<bool(const arch::BarrierKind &)> ok = [&](const arch::BarrierKind &k) {
      switch (ce.kind) {
        case EdgeKind::Pu: return k.cuts_push;
        case EdgeKind::Vo: return k.cuts_vis;
        case EdgeKind::Xo: return k.cuts_exec_any || (reads && k.cuts_exec_from_read);
      }
      return false;
    };
    if (profile.vis_exec_free && ce.kind != EdgeKind::Pu) continue;
    std::string kind = cheapest(ok);
    std::optional<BlockId> avoid;
    if (ce.binding) avoid = cfg.bind_block.at(*ce.binding);
    for (const auto &p : all_paths(cfg, cfg.action_block[ce.source], cfg.action_block[ce.dest], avoid)) {
      Checker ck(cfg, profile, im);
      if (ck.on_path(p, ok)) continue;
      im.barriers.insert({edges_of(cfg, p).back(), kind});
    }
  }

  emit::PlacementPlan plan;
  plan.function_name = cfg.fn.name;
  plan.arch_name = profile.name;
  plan.solver_status = "greedy";
  for (const auto &[e, kind] : im.barriers) {
    plan.barriers.push_back(
        {cfg.block_name(cfg.edges[e].src), cfg.block_name(cfg.edges[e].dst), kind, emit::realization(cfg, e)});
    plan.total_cost += static_cast<long>(weights[e]) * costs.kind.at(kind);
  }
  return plan;
}

}  // namespace rmcfence::verify
