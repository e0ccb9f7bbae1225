#pragma once

#include <map>
#include <string>
#include <vector>

#include "rmcfence/ir.hpp"

namespace rmcfence {

using ir::ActionId;
using ir::BlockId;
using ir::ValueId;
using EdgeId = int;

struct CfgEdge {
  BlockId src = ir::kNone;
  BlockId dst = ir::kNone;
  bool pseudo = false;  // return -> entry, models the next invocation
};

/// Where a normalized block came from, for mapping placements back to source.
struct BlockOrigin {
  BlockId orig_block = ir::kNone;
  int first = 0;  // instruction range [first, last) of the original block
  int last = 0;
  bool edge_block = false;  // inserted on a critical edge
  BlockId edge_src = ir::kNone;  // normalized source of the split edge
  BlockId edge_dst = ir::kNone;
};

/// A function after labeled-action isolation, critical-edge splitting and the
/// addition of exit -> entry pseudo edges.
struct NormalizedCFG {
  ir::FunctionIR fn;  // values and action ids are shared with the input
  std::vector<CfgEdge> edges;  // sorted by (src, dst)
  std::vector<std::vector<EdgeId>> out_edges;
  std::vector<std::vector<EdgeId>> in_edges;
  std::vector<BlockId> action_block;
  std::map<std::string, BlockId> bind_block;
  std::vector<BlockOrigin> origin;
  std::vector<BlockId> idom;  // over real edges

  int num_blocks() const { return static_cast<int>(fn.blocks.size()); }
  const std::string &block_name(BlockId b) const { return fn.blocks[b].name; }
  EdgeId find_edge(BlockId src, BlockId dst) const;
  std::vector<BlockId> real_succs(BlockId b) const;
  std::vector<BlockId> real_preds(BlockId b) const;
  bool dominates(BlockId a, BlockId b) const { return ir::dominates(idom, a, b); }
};

/// Total on validated input.
NormalizedCFG normalize(const ir::FunctionIR &f);

}  // namespace rmcfence
