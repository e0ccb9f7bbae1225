#include "rmcfence/ir.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace rmcfence::ir {

std::string to_string(const Diagnostic &d) {
  return fmt::format("{}:{}: {}", d.pos.line, d.pos.column, d.message);
}

const char *to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Read: return "read";
    case ActionKind::Write: return "write";
    case ActionKind::Rmw: return "rmw";
    case ActionKind::Push: return "push";
    case ActionKind::Noop: return "noop";
  }
  return "?";
}

const char *to_string(EdgeKind k) {
  switch (k) {
    case EdgeKind::Xo: return "xo";
    case EdgeKind::Vo: return "vo";
    case EdgeKind::Pu: return "pu";
  }
  return "?";
}

std::vector<BlockId> Terminator::successors() const {
  switch (kind) {
    case Kind::Jump: return {target};
    case Kind::Branch: return {target, else_target};
    case Kind::Return: return {};
  }
  return {};
}

BlockId FunctionIR::find_block(const std::string &n) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].name == n) return static_cast<BlockId>(i);
  return kNone;
}

ValueId FunctionIR::find_value(const std::string &n) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].name == n) return static_cast<ValueId>(i);
  return kNone;
}

ActionId FunctionIR::find_action(const std::string &n) const {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i].name == n) return static_cast<ActionId>(i);
  return kNone;
}

std::vector<ActionId> FunctionIR::actions_with_tag(const std::string &tag) const {
  std::vector<ActionId> out;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto &ls = actions[i].labels;
    if (std::find(ls.begin(), ls.end(), tag) != ls.end()) out.push_back(static_cast<ActionId>(i));
  }
  return out;
}

const Instruction &FunctionIR::action_instr(ActionId a) const {
  for (const auto &bb : blocks)
    for (const auto &in : bb.instrs)
      if (in.kind == Instruction::Kind::Action && in.action_id == a) return in;
  throw std::out_of_range("no such action");
}

void rebuild_tables(FunctionIR &f) {
  for (auto &v : f.values) {
    v.block = kNone;
    v.index = kNone;
  }
  bool fresh = f.actions.empty();
  int next_action = 0;
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    auto &bb = f.blocks[b];
    for (std::size_t i = 0; i < bb.instrs.size(); ++i) {
      auto &in = bb.instrs[i];
      if (in.result != kNone && in.result < static_cast<int>(f.values.size())) {
        f.values[in.result].block = static_cast<BlockId>(b);
        f.values[in.result].index = static_cast<int>(i);
      }
      if (in.kind != Instruction::Kind::Action) continue;
      if (fresh) {
        in.action_id = next_action++;
        ActionInfo info;
        info.kind = in.action;
        info.labels = in.labels;
        info.orig_block = bb.name;
        info.orig_index = static_cast<int>(i);
        info.value = in.result;
        f.actions.push_back(std::move(info));
      }
    }
  }
  if (!fresh) return;

  // Display names: a label that tags only this action, else "<label>#k",
  // else a position.
  std::map<std::string, int> tag_count;
  for (const auto &a : f.actions)
    for (const auto &l : a.labels) ++tag_count[l];
  std::map<std::string, int> ordinal;
  for (auto &a : f.actions) {
    if (a.labels.empty()) {
      a.name = fmt::format("@{}:{}", a.orig_block, a.orig_index);
    } else if (tag_count[a.labels.front()] == 1) {
      a.name = a.labels.front();
    } else {
      a.name = fmt::format("{}#{}", a.labels.front(), ordinal[a.labels.front()]++);
    }
  }
}

std::vector<BlockId> dominators(const std::vector<std::vector<BlockId>> &succs, BlockId entry) {
  const int n = static_cast<int>(succs.size());
  std::vector<std::vector<BlockId>> preds(n);
  for (int b = 0; b < n; ++b)
    for (BlockId s : succs[b]) preds[s].push_back(b);

  // Reverse postorder from entry.
  std::vector<int> rpo_index(n, -1);
  std::vector<BlockId> order;
  std::vector<char> seen(n, 0);
  std::vector<std::pair<BlockId, std::size_t>> stack{{entry, 0}};
  seen[entry] = 1;
  while (!stack.empty()) {
    auto &[b, k] = stack.back();
    if (k < succs[b].size()) {
      BlockId s = succs[b][k++];
      if (!seen[s]) {
        seen[s] = 1;
        stack.emplace_back(s, 0);
      }
    } else {
      order.push_back(b);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) rpo_index[order[i]] = static_cast<int>(i);

  std::vector<BlockId> idom(n, kNone);
  idom[entry] = entry;
  auto intersect = [&](BlockId a, BlockId b) {
    while (a != b) {
      while (rpo_index[a] > rpo_index[b]) a = idom[a];
      while (rpo_index[b] > rpo_index[a]) b = idom[b];
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (BlockId b : order) {
      if (b == entry) continue;
      BlockId cand = kNone;
      for (BlockId p : preds[b]) {
        if (idom[p] == kNone) continue;
        cand = cand == kNone ? p : intersect(p, cand);
      }
      if (cand != idom[b]) {
        idom[b] = cand;
        changed = true;
      }
    }
  }
  return idom;
}

bool dominates(const std::vector<BlockId> &idom, BlockId a, BlockId b) {
  if (idom[b] == kNone || idom[a] == kNone) return false;
  while (true) {
    if (a == b) return true;
    if (idom[b] == b) return false;
    b = idom[b];
  }
}

}  // namespace rmcfence::ir
