#include "rmcfence/cfg.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace rmcfence {

using ir::BasicBlock;
using ir::Instruction;
using ir::kNone;
using ir::Terminator;

EdgeId NormalizedCFG::find_edge(BlockId src, BlockId dst) const {
  for (EdgeId e : out_edges[src])
    if (edges[e].dst == dst) return e;
  return kNone;
}

std::vector<BlockId> NormalizedCFG::real_succs(BlockId b) const {
  std::vector<BlockId> out;
  for (EdgeId e : out_edges[b])
    if (!edges[e].pseudo) out.push_back(edges[e].dst);
  return out;
}

std::vector<BlockId> NormalizedCFG::real_preds(BlockId b) const {
  std::vector<BlockId> out;
  for (EdgeId e : in_edges[b])
    if (!edges[e].pseudo) out.push_back(edges[e].src);
  return out;
}

namespace {

class NameTable {
 public:
  explicit NameTable(const ir::FunctionIR &f) {
    for (const auto &bb : f.blocks) used_.insert(bb.name);
  }
  std::string fresh(const std::string &base) {
    std::string name = base;
    for (int k = 1; used_.count(name); ++k) name = fmt::format("{}.{}", base, k);
    used_.insert(name);
    return name;
  }
 private:
  std::set<std::string> used_;
};

Terminator jump_to(BlockId target) {
  Terminator t;
  t.kind = Terminator::Kind::Jump;
  t.target = target;
  return t;
}

}  // namespace

NormalizedCFG normalize(const ir::FunctionIR &f) {
  NormalizedCFG out;
  out.fn.name = f.name;
  out.fn.decls = f.decls;
  out.fn.values = f.values;
  out.fn.actions = f.actions;
  out.fn.pos = f.pos;

  NameTable names(f);
  const int n_orig = static_cast<int>(f.blocks.size());
  std::vector<BlockId> first_piece(n_orig), last_piece(n_orig);

  // Isolate labeled actions. Pieces of one original block are laid out
  // consecutively; the entry keeps a (possibly empty) prologue so that every
  // labeled action has a real in-edge.
  auto &blocks = out.fn.blocks;
  for (int b = 0; b < n_orig; ++b) {
    const BasicBlock &src = f.blocks[b];
    struct Piece {
      int first, last;
    };
    std::vector<Piece> pieces;
    int seg_start = 0;
    bool first_segment = true;
    const int n_instr = static_cast<int>(src.instrs.size());
    for (int i = 0; i < n_instr; ++i) {
      if (!src.instrs[i].is_labeled_action()) continue;
      if (i > seg_start || (first_segment && b == f.entry)) pieces.push_back({seg_start, i});
      pieces.push_back({i, i + 1});
      seg_start = i + 1;
      first_segment = false;
    }
    // A trailing labeled action may keep an unconditional jump; any other
    // terminator gets a block of its own.
    bool ends_with_action = n_instr > 0 && src.instrs.back().is_labeled_action();
    if (!(ends_with_action && src.term.kind == Terminator::Kind::Jump)) {
      pieces.push_back({seg_start, n_instr});
    }

    first_piece[b] = static_cast<BlockId>(blocks.size());
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      BasicBlock bb;
      bb.name = k == 0 ? src.name : names.fresh(fmt::format("{}.{}", src.name, k));
      bb.pos = src.pos;
      bb.instrs.assign(src.instrs.begin() + pieces[k].first, src.instrs.begin() + pieces[k].last);
      if (k + 1 < pieces.size()) bb.term = jump_to(static_cast<BlockId>(blocks.size() + 1));
      else bb.term = src.term;  // targets fixed below
      blocks.push_back(std::move(bb));
      BlockOrigin o;
      o.orig_block = b;
      o.first = pieces[k].first;
      o.last = pieces[k].last;
      out.origin.push_back(o);
    }
    last_piece[b] = static_cast<BlockId>(blocks.size() - 1);
  }
  for (int b = 0; b < n_orig; ++b) {
    auto &t = blocks[last_piece[b]].term;
    if (t.target != kNone) t.target = first_piece[t.target];
    if (t.else_target != kNone) t.else_target = first_piece[t.else_target];
    for (auto &in : blocks[first_piece[b]].instrs)
      for (auto &arm : in.arms) arm.pred = last_piece[arm.pred];
  }
  out.fn.entry = first_piece[f.entry];

  // Split critical edges.
  const int n_pieces = static_cast<int>(blocks.size());
  std::vector<int> pred_count(n_pieces, 0);
  for (const auto &bb : blocks)
    for (BlockId s : bb.term.successors()) ++pred_count[s];
  for (BlockId a = 0; a < n_pieces; ++a) {
    auto succs = blocks[a].term.successors();
    if (succs.size() < 2) continue;
    for (int which = 0; which < 2; ++which) {
      auto slot = [&]() -> BlockId & {
        return which == 0 ? blocks[a].term.target : blocks[a].term.else_target;
      };
      BlockId d = slot();
      if (pred_count[d] < 2) continue;
      BasicBlock mid;
      mid.name = names.fresh(fmt::format("{}.to.{}", blocks[a].name, blocks[d].name));
      mid.pos = blocks[a].pos;
      mid.term = jump_to(d);
      BlockId m = static_cast<BlockId>(blocks.size());
      slot() = m;
      for (auto &in : blocks[d].instrs)
        for (auto &arm : in.arms)
          if (arm.pred == a) arm.pred = m;
      BlockOrigin o;
      o.orig_block = out.origin[a].orig_block;
      o.first = o.last = out.origin[a].last;
      o.edge_block = true;
      o.edge_src = a;
      o.edge_dst = d;
      blocks.push_back(std::move(mid));
      out.origin.push_back(o);
    }
  }
  ir::rebuild_tables(out.fn);

  // Edges: real ones from terminators, pseudo ones from every return.
  const int n = static_cast<int>(blocks.size());
  for (BlockId b = 0; b < n; ++b) {
    for (BlockId s : blocks[b].term.successors()) out.edges.push_back({b, s, false});
    if (blocks[b].term.kind == Terminator::Kind::Return) out.edges.push_back({b, out.fn.entry, true});
  }
  std::sort(out.edges.begin(), out.edges.end(), [](const CfgEdge &x, const CfgEdge &y) {
    return std::tie(x.src, x.dst) < std::tie(y.src, y.dst);
  });
  out.out_edges.assign(n, {});
  out.in_edges.assign(n, {});
  for (EdgeId e = 0; e < static_cast<EdgeId>(out.edges.size()); ++e) {
    out.out_edges[out.edges[e].src].push_back(e);
    out.in_edges[out.edges[e].dst].push_back(e);
  }

  std::vector<std::vector<BlockId>> succs(n);
  for (BlockId b = 0; b < n; ++b) succs[b] = blocks[b].term.successors();
  out.idom = ir::dominators(succs, out.fn.entry);

  out.action_block.assign(out.fn.actions.size(), kNone);
  for (BlockId b = 0; b < n; ++b) {
    for (const auto &in : blocks[b].instrs) {
      if (in.kind == Instruction::Kind::Action) out.action_block[in.action_id] = b;
      if (in.kind == Instruction::Kind::Bind) out.bind_block[in.bind] = b;
    }
  }
  return out;
}

}  // namespace rmcfence
