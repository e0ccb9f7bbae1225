#include "rmcfence/encode.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "rmcfence/deps.hpp"

namespace rmcfence::encode {

using constraints::ConstraintEdge;
using constraints::Side;
using ir::EdgeKind;
using ir::kNone;

const char *to_string(VarType t) {
  switch (t) {
    case VarType::Barrier: return "Barrier";
    case VarType::UseCtrl: return "UseCtrl";
    case VarType::UseData: return "UseData";
    case VarType::Acquire: return "Acquire";
    case VarType::Release: return "Release";
  }
  return "?";
}

long Problem::cost(const std::vector<bool> &assign) const {
  long total = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (assign[i]) total += vars[i].cost;
  return total;
}

std::vector<bool> Evaluator::nodes(const std::vector<bool> &assign) const {
  std::vector<bool> def(p_.defs.size(), true);
  std::vector<bool> val(p_.nodes.size(), false);
  for (;;) {
    for (std::size_t i = 0; i < p_.nodes.size(); ++i) {
      const Node &n = p_.nodes[i];
      switch (n.op) {
        case NodeOp::Const: val[i] = n.value; break;
        case NodeOp::Out: val[i] = assign[n.ref]; break;
        case NodeOp::Def: val[i] = def[n.ref]; break;
        case NodeOp::And:
          val[i] = std::all_of(n.kids.begin(), n.kids.end(), [&](int k) { return bool(val[k]); });
          break;
        case NodeOp::Or:
          val[i] = std::any_of(n.kids.begin(), n.kids.end(), [&](int k) { return bool(val[k]); });
          break;
      }
    }
    bool changed = false;
    for (std::size_t d = 0; d < p_.defs.size(); ++d) {
      if (def[d] && !val[p_.defs[d].expr]) {
        def[d] = false;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return val;
}

bool Evaluator::satisfied(const std::vector<bool> &assign) const { return failing(assign).empty(); }

std::vector<int> Evaluator::failing(const std::vector<bool> &assign) const {
  auto val = nodes(assign);
  std::vector<int> out;
  for (std::size_t a = 0; a < p_.assertions.size(); ++a)
    if (!val[p_.assertions[a].expr]) out.push_back(static_cast<int>(a));
  return out;
}

namespace {

bool reads(ir::ActionKind k) { return ir::defines_value(k); }

using VarKey = std::tuple<int, std::string, EdgeId, ActionId, ActionId, ActionId, std::optional<std::string>,
                          std::vector<ValueId>>;

VarKey key_of(const OutputVar &v) {
  return {static_cast<int>(v.type), v.kind, v.edge, v.source, v.dest, v.action, v.binding, v.signature};
}

class Builder {
 public:
  Builder(const Input &in, const Options &opt)
      : in_(in), opt_(opt), cfg_(in.cfg), weights_(graph::edge_weights(in.cfg, in.costs.loop_factor)) {}

  Problem run() {
    const auto &f = cfg_.fn;
    for (int i = 0; i < static_cast<int>(in_.edges.size()); ++i) {
      const auto &e = in_.edges[i];
      Assertion a;
      a.label = fmt::format("{} {}->{}", ir::to_string(e.kind), f.actions[e.source].name, f.actions[e.dest].name);
      if (e.binding) a.label += fmt::format(" here({})", *e.binding);
      a.index = i;
      a.expr = constraint(e);
      p_.assertions.push_back(a);
    }
    for (int i = 0; i < static_cast<int>(in_.boundaries.size()); ++i) {
      const auto &bc = in_.boundaries[i];
      Assertion a;
      const auto &name = f.actions[bc.action].name;
      a.label = bc.side == Side::Pre ? fmt::format("{} pre->{}", ir::to_string(bc.kind), name)
                                     : fmt::format("{} {}->post", ir::to_string(bc.kind), name);
      a.boundary = true;
      a.index = i;
      a.expr = boundary(bc);
      p_.assertions.push_back(a);
    }
    canonicalize();
    return std::move(p_);
  }

 private:
  // Expression construction with folding and sharing.
  int add(Node n) {
    auto key = std::make_tuple(static_cast<int>(n.op), n.value, n.ref, n.kids);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    int id = static_cast<int>(p_.nodes.size());
    p_.nodes.push_back(std::move(n));
    memo_[key] = id;
    return id;
  }
  int konst(bool v) { return add({NodeOp::Const, v, -1, {}}); }
  bool is_const(int id, bool v) const { return p_.nodes[id].op == NodeOp::Const && p_.nodes[id].value == v; }
  int junction(NodeOp op, std::vector<int> kids) {
    bool unit = op == NodeOp::And;  // identity element
    std::vector<int> keep;
    for (int k : kids) {
      if (is_const(k, unit)) continue;
      if (is_const(k, !unit)) return konst(!unit);
      keep.push_back(k);
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    if (keep.empty()) return konst(unit);
    if (keep.size() == 1) return keep[0];
    return add({op, false, -1, std::move(keep)});
  }
  int all(std::vector<int> kids) { return junction(NodeOp::And, std::move(kids)); }
  int any(std::vector<int> kids) { return junction(NodeOp::Or, std::move(kids)); }

  int var(OutputVar v) {
    auto key = key_of(v);
    auto it = var_ids_.find(key);
    int id;
    if (it == var_ids_.end()) {
      id = static_cast<int>(p_.vars.size());
      p_.vars.push_back(std::move(v));
      var_ids_[key] = id;
    } else {
      id = it->second;
      // UseData keeps the lexicographically smallest representative path.
      if (v.type == VarType::UseData && v.path < p_.vars[id].path) p_.vars[id].path = v.path;
    }
    return add({NodeOp::Out, false, id, {}});
  }

  int barrier(EdgeId e, const arch::BarrierKind &k) {
    OutputVar v;
    v.type = VarType::Barrier;
    v.kind = k.id;
    v.edge = e;
    v.cost = static_cast<long>(weights_[e]) * in_.costs.kind.at(k.id);
    return var(std::move(v));
  }

  long block_weight(BlockId b) const {
    std::uint64_t w = 1;
    for (EdgeId e : cfg_.in_edges[b]) w = std::max(w, weights_[e]);
    return static_cast<long>(w);
  }

  int mode(arch::Mode m, ActionId a) {
    OutputVar v;
    v.type = m == arch::Mode::Acquire ? VarType::Acquire : VarType::Release;
    v.kind = arch::to_string(m);
    v.action = a;
    v.cost = block_weight(cfg_.action_block[a]) * in_.costs.mode_cost(m);
    return var(std::move(v));
  }

  const ir::ActionInfo &action(ActionId a) const { return cfg_.fn.actions[a]; }
  bool can_acquire(ActionId s) const { return reads(action(s).kind) && in_.profile.has_mode(arch::Mode::Acquire); }
  bool can_release(ActionId t) const {
    return ir::is_write_only(action(t).kind) && in_.profile.has_mode(arch::Mode::Release);
  }

  std::optional<BlockId> binding_block(const std::optional<std::string> &b) const {
    if (!b) return std::nullopt;
    return cfg_.bind_block.at(*b);
  }

  const std::vector<graph::Path> &paths(BlockId from, BlockId to, std::optional<BlockId> b) {
    auto key = std::make_tuple(from, to, b);
    auto it = paths_.find(key);
    if (it != paths_.end()) return it->second;
    return paths_[key] = graph::simple_paths(cfg_, from, to, b, opt_.max_paths);
  }

  // Barriers of kinds accepted by `pred` on the edges of p.
  template <class Pred>
  std::vector<int> barriers_on(const std::vector<EdgeId> &edges, Pred pred) {
    std::vector<int> out;
    for (EdgeId e : edges)
      for (const auto &k : in_.profile.kinds)
        if (pred(k)) out.push_back(barrier(e, k));
    return out;
  }

  int pcut_path(const graph::Path &p) {
    return any(barriers_on(p.edges, [](const arch::BarrierKind &k) { return k.cuts_push; }));
  }

  int vcut_path(ActionId t, const graph::Path &p) {
    if (in_.profile.vis_exec_free) return konst(true);
    auto ors = barriers_on(p.edges, [](const arch::BarrierKind &k) { return k.cuts_vis; });
    if (can_release(t)) ors.push_back(mode(arch::Mode::Release, t));
    return any(std::move(ors));
  }

  int ctrl_path(ActionId s, const graph::Path &p) {
    std::vector<int> ors;
    for (EdgeId e : p.edges) {
      std::string m;
      if (deps::can_ctrl(cfg_, s, e, false)) m = "existing";
      else if (opt_.synth_ctrl && deps::can_ctrl(cfg_, s, e, true)) m = "synth";
      else continue;
      OutputVar v;
      v.type = VarType::UseCtrl;
      v.kind = m;
      v.edge = e;
      v.source = s;
      long c = m == "existing" ? in_.costs.ctrl_existing : in_.costs.ctrl_synth;
      v.cost = static_cast<long>(weights_[e]) * c;
      ors.push_back(var(std::move(v)));
    }
    return any(std::move(ors));
  }

  int define(const std::string &name) {
    int d = static_cast<int>(p_.defs.size());
    p_.defs.push_back({name, -1});
    return d;
  }

  std::string self_name(const char *what, std::optional<BlockId> b, ActionId s) const {
    return fmt::format("{}({}{})", what, b ? cfg_.block_name(*b) + "," : "", action(s).name);
  }

  // ctrl(b,s,s): every cycle at s carries a usable control dependency.
  int ctrl_self(std::optional<BlockId> b, ActionId s) {
    auto key = std::make_pair(b, s);
    auto it = ctrl_self_.find(key);
    if (it != ctrl_self_.end()) return it->second;
    int d = define(self_name("ctrl", b, s));
    int node = add({NodeOp::Def, false, d, {}});
    ctrl_self_[key] = node;
    BlockId sb = cfg_.action_block[s];
    std::vector<int> ands;
    for (const auto &p : paths(sb, sb, b)) ands.push_back(ctrl_path(s, p));
    p_.defs[d].expr = all(std::move(ands));
    return node;
  }

  // xcut(b,s,s): successive executions of s are ordered.
  int xcut_self(std::optional<BlockId> b, const std::optional<std::string> &bname, ActionId s) {
    auto key = std::make_pair(b, s);
    auto it = xcut_self_.find(key);
    if (it != xcut_self_.end()) return it->second;
    int d = define(self_name("xcut", b, s));
    int node = add({NodeOp::Def, false, d, {}});
    xcut_self_[key] = node;
    BlockId sb = cfg_.action_block[s];
    std::vector<int> ands;
    for (const auto &p : paths(sb, sb, b)) ands.push_back(xcut_path(b, bname, s, s, p));
    p_.defs[d].expr = all(std::move(ands));
    return node;
  }

  int xcut_path(std::optional<BlockId> b, const std::optional<std::string> &bname, ActionId s, ActionId t,
                const graph::Path &p) {
    if (in_.profile.vis_exec_free) return konst(true);
    bool s_reads = reads(action(s).kind);
    std::vector<int> ors{vcut_path(t, p)};
    auto exec = barriers_on(p.edges, [&](const arch::BarrierKind &k) {
      return k.cuts_exec_any || (s_reads && k.cuts_exec_from_read);
    });
    ors.insert(ors.end(), exec.begin(), exec.end());
    if (can_acquire(s)) ors.push_back(mode(arch::Mode::Acquire, s));
    if (s_reads && opt_.ctrl_deps && ir::is_write_only(action(t).kind)) {
      int c = ctrl_path(s, p);
      if (!is_const(c, false)) {
        int side = opt_.self_ordering ? any({ctrl_self(b, s), xcut_self(b, bname, s)}) : konst(true);
        ors.push_back(all({c, side}));
      }
    }
    if (s_reads && opt_.data_deps) {
      auto fact = deps::data_fact(cfg_, b, s, t, p);
      if (fact.can) {
        OutputVar v;
        v.type = VarType::UseData;
        v.kind = "existing";
        v.source = s;
        v.dest = t;
        v.binding = bname;
        v.signature = fact.signature;
        v.path = p.blocks;
        v.cost = in_.costs.data_existing;
        int u = var(std::move(v));
        int side = opt_.self_ordering ? xcut_self(b, bname, s) : konst(true);
        ors.push_back(all({u, side}));
      }
    }
    return any(std::move(ors));
  }

  int constraint(const ConstraintEdge &e) {
    auto b = binding_block(e.binding);
    const auto &ps = paths(cfg_.action_block[e.source], cfg_.action_block[e.dest], b);
    std::vector<int> ands;
    for (const auto &p : ps) {
      switch (e.kind) {
        case EdgeKind::Pu: ands.push_back(pcut_path(p)); break;
        case EdgeKind::Vo: ands.push_back(vcut_path(e.dest, p)); break;
        case EdgeKind::Xo: ands.push_back(xcut_path(b, e.binding, e.source, e.dest, p)); break;
      }
    }
    return all(std::move(ands));
  }

  int boundary(const constraints::BoundaryConstraint &bc) {
    if (in_.profile.vis_exec_free) return konst(true);
    ActionId a = bc.action;
    BlockId ab = cfg_.action_block[a];
    bool vo = bc.kind == EdgeKind::Vo;
    std::vector<int> ands;
    if (bc.side == Side::Pre) {
      for (EdgeId e : cfg_.in_edges[ab]) {
        auto ors = barriers_on({e}, [&](const arch::BarrierKind &k) { return vo ? k.cuts_vis : k.cuts_exec_any; });
        if (can_release(a)) ors.push_back(mode(arch::Mode::Release, a));
        ands.push_back(any(std::move(ors)));
      }
      return all(std::move(ands));
    }
    bool r = reads(action(a).kind);
    for (EdgeId e : cfg_.out_edges[ab]) {
      ands.push_back(any(barriers_on({e}, [&](const arch::BarrierKind &k) {
        return vo ? k.cuts_vis : (k.cuts_exec_any || (r && k.cuts_exec_from_read));
      })));
    }
    int edges = all(std::move(ands));
    if (!vo && can_acquire(a)) return any({edges, mode(arch::Mode::Acquire, a)});
    return edges;
  }

  // Sort variables canonically and renumber the Out nodes.
  void canonicalize() {
    std::vector<int> order(p_.vars.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return key_of(p_.vars[a]) < key_of(p_.vars[b]); });
    std::vector<int> rank(order.size());
    std::vector<OutputVar> sorted;
    for (std::size_t i = 0; i < order.size(); ++i) {
      rank[order[i]] = static_cast<int>(i);
      sorted.push_back(std::move(p_.vars[order[i]]));
    }
    p_.vars = std::move(sorted);
    for (auto &n : p_.nodes)
      if (n.op == NodeOp::Out) n.ref = rank[n.ref];
  }

  const Input &in_;
  const Options &opt_;
  const NormalizedCFG &cfg_;
  std::vector<std::uint64_t> weights_;
  Problem p_;
  std::map<std::tuple<int, bool, int, std::vector<int>>, int> memo_;
  std::map<VarKey, int> var_ids_;
  std::map<std::tuple<BlockId, BlockId, std::optional<BlockId>>, std::vector<graph::Path>> paths_;
  std::map<std::pair<std::optional<BlockId>, ActionId>, int> ctrl_self_, xcut_self_;
};

}  // namespace

Problem build(const Input &in, const Options &opt) { return Builder(in, opt).run(); }

std::string var_name(const NormalizedCFG &cfg, const OutputVar &v) {
  auto edge = [&](EdgeId e) {
    return fmt::format("{}->{}", cfg.block_name(cfg.edges[e].src), cfg.block_name(cfg.edges[e].dst));
  };
  const auto &acts = cfg.fn.actions;
  switch (v.type) {
    case VarType::Barrier: return fmt::format("Barrier({}, {})", edge(v.edge), v.kind);
    case VarType::UseCtrl: return fmt::format("UseCtrl({}, {}, {})", acts[v.source].name, edge(v.edge), v.kind);
    case VarType::UseData: {
      std::string path;
      for (std::size_t i = 0; i < v.path.size(); ++i) path += (i ? "," : "") + cfg.block_name(v.path[i]);
      return fmt::format("UseData({}{}->{}, [{}])", v.binding ? *v.binding + ", " : "", acts[v.source].name,
                         acts[v.dest].name, path);
    }
    case VarType::Acquire:
    case VarType::Release: return fmt::format("{}({})", to_string(v.type), acts[v.action].name);
  }
  return "?";
}

std::string dump(const NormalizedCFG &cfg, const Problem &p) {
  std::string out = "vars:\n";
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    out += fmt::format("  v{} {} cost {}\n", i, var_name(cfg, p.vars[i]), p.vars[i].cost);
  std::function<std::string(int)> expr = [&](int id) -> std::string {
    const Node &n = p.nodes[id];
    switch (n.op) {
      case NodeOp::Const: return n.value ? "true" : "false";
      case NodeOp::Out: return fmt::format("v{}", n.ref);
      case NodeOp::Def: return p.defs[n.ref].name;
      case NodeOp::And:
      case NodeOp::Or: {
        std::string s = n.op == NodeOp::And ? "(and" : "(or";
        for (int k : n.kids) s += " " + expr(k);
        return s + ")";
      }
    }
    return "?";
  };
  out += "defs:\n";
  for (const auto &d : p.defs) out += fmt::format("  {} = {}\n", d.name, expr(d.expr));
  out += "assertions:\n";
  for (const auto &a : p.assertions) out += fmt::format("  {}: {}\n", a.label, expr(a.expr));
  out += "objective:";
  if (p.vars.empty()) out += " 0";
  for (std::size_t i = 0; i < p.vars.size(); ++i) out += fmt::format("{} {}*v{}", i ? " +" : "", p.vars[i].cost, i);
  out += "\n";
  return out;
}

}  // namespace rmcfence::encode
