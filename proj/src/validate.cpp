#include "rmcfence/ir.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

namespace rmcfence::ir {

std::vector<Diagnostic> validate(const FunctionIR &f) {
  std::vector<Diagnostic> diags;
  auto report = [&](SourcePos p, std::string msg) { diags.push_back({p, std::move(msg)}); };

  const int n = static_cast<int>(f.blocks.size());
  std::vector<std::vector<BlockId>> succs(n), preds(n);
  for (int b = 0; b < n; ++b) {
    const auto &t = f.blocks[b].term;
    if (t.kind == Terminator::Kind::Branch && t.target == t.else_target) {
      report(t.pos, "conditional branch targets must differ");
    }
    for (BlockId s : t.successors()) {
      succs[b].push_back(s);
      preds[s].push_back(b);
    }
  }
  if (!preds[f.entry].empty()) {
    report(f.blocks[f.entry].pos,
           fmt::format("entry block '{}' must not have predecessors", f.blocks[f.entry].name));
  }

  auto idom = dominators(succs, f.entry);
  for (int b = 0; b < n; ++b) {
    if (idom[b] == kNone) report(f.blocks[b].pos, fmt::format("block '{}' is unreachable", f.blocks[b].name));
  }

  auto check_use = [&](const Operand &o, BlockId use_block, int use_index, SourcePos pos) {
    if (o.is_literal) return;
    const Value &v = f.values[o.value];
    if (v.block == kNone) return;  // reported by the parser
    bool ok = v.block == use_block ? v.index < use_index
                                   : (idom[use_block] != kNone && dominates(idom, v.block, use_block));
    if (!ok) report(pos, fmt::format("value %{} used before its definition", v.name));
  };

  for (int b = 0; b < n; ++b) {
    const auto &bb = f.blocks[b];
    bool seen_non_phi = false;
    for (int i = 0; i < static_cast<int>(bb.instrs.size()); ++i) {
      const auto &in = bb.instrs[i];
      if (in.kind == Instruction::Kind::Phi) {
        if (seen_non_phi) report(in.pos, "phi must appear at the start of its block");
        std::set<BlockId> arms;
        for (const auto &arm : in.arms) {
          bool is_pred = std::find(preds[b].begin(), preds[b].end(), arm.pred) != preds[b].end();
          if (!is_pred) {
            report(in.pos, fmt::format("phi names '{}', which is not a predecessor of '{}'",
                                       f.blocks[arm.pred].name, bb.name));
            continue;
          }
          if (!arms.insert(arm.pred).second) {
            report(in.pos, fmt::format("phi has two arms for '{}'", f.blocks[arm.pred].name));
          }
          // The incoming value must be available at the end of the predecessor.
          check_use(arm.value, arm.pred, static_cast<int>(f.blocks[arm.pred].instrs.size()), in.pos);
        }
        if (arms.size() != std::set<BlockId>(preds[b].begin(), preds[b].end()).size()) {
          report(in.pos, "phi must have exactly one arm per predecessor");
        }
        continue;
      }
      seen_non_phi = true;
      if (in.kind == Instruction::Kind::Op) {
        for (const auto &a : in.args) check_use(a, b, i, in.pos);
      } else if (in.kind == Instruction::Kind::Action) {
        if (!in.loc.is_global && in.loc.pointer != kNone &&
            (in.action == ActionKind::Read || in.action == ActionKind::Write || in.action == ActionKind::Rmw)) {
          check_use(Operand::of_value(in.loc.pointer), b, i, in.pos);
        }
        if (in.action == ActionKind::Write || in.action == ActionKind::Rmw) check_use(in.data, b, i, in.pos);
      }
    }
    const auto &t = bb.term;
    const int end = static_cast<int>(bb.instrs.size());
    if (t.kind == Terminator::Kind::Branch) check_use(t.cond, b, end, t.pos);
    if (t.kind == Terminator::Kind::Return && t.value) check_use(*t.value, b, end, t.pos);
  }

  // Binding points.
  std::map<std::string, int> bind_count;
  for (const auto &bb : f.blocks)
    for (const auto &in : bb.instrs)
      if (in.kind == Instruction::Kind::Bind && ++bind_count[in.bind] == 2)
        report(in.pos, fmt::format("binding point '{}' bound more than once", in.bind));

  // Tags.
  for (const auto &d : f.decls) {
    for (const auto *tag : {&d.source, &d.dest}) {
      if (*tag == "pre" || *tag == "post") continue;
      auto acts = f.actions_with_tag(*tag);
      if (acts.empty()) report(d.pos, fmt::format("tag '{}' labels no action", *tag));
      bool boundary = d.source == "pre" || d.dest == "post";
      if (boundary) {
        for (ActionId a : acts)
          if (f.actions[a].kind == ActionKind::Noop)
            report(d.pos, fmt::format("noop '{}' cannot take a pre/post edge", f.actions[a].name));
      }
    }
    if (d.binding && !bind_count.count(*d.binding)) {
      report(d.pos, fmt::format("binding point '{}' is never bound", *d.binding));
    }
  }
  for (const auto &a : f.actions) {
    if (a.kind == ActionKind::Noop && a.labels.empty()) report({}, "noop must be labeled");
  }
  return diags;
}

}  // namespace rmcfence::ir
