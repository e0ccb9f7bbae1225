#pragma once

#include <optional>
#include <vector>

#include "rmcfence/cfg.hpp"
#include "rmcfence/graph.hpp"

namespace rmcfence::deps {

/// Blocks reachable from head(p) and co-reachable to tail(p) without
/// touching b, plus the blocks of p. Indexed by BlockId.
std::vector<bool> admissible_region(const NormalizedCFG &cfg, const graph::Path &p, std::optional<BlockId> b);

/// Static dependence of v on the value defined by action s, restricted to
/// phi arms whose predecessor lies in `region`.
bool value_depends(const NormalizedCFG &cfg, ActionId s, ValueId v, const std::vector<bool> &region);

/// Operands of t through which a data dependency orders it: the address for
/// reads, address and data for writes and rmws.
std::vector<ValueId> dependency_operands(const NormalizedCFG &cfg, ActionId t);

bool can_ctrl(const NormalizedCFG &cfg, ActionId s, EdgeId e, bool synth);

struct DataFact {
  bool can = false;
  /// Values of t's operand cone that carry s on some execution following
  /// p. Paths with equal signatures share one dependency-use variable.
  std::vector<ValueId> signature;
};

/// Whether every execution that follows p (with detours that avoid b and
/// return to p) delivers s's value into a dependency operand of t.
DataFact data_fact(const NormalizedCFG &cfg, std::optional<BlockId> b, ActionId s, ActionId t,
                   const graph::Path &p);

inline bool can_data(const NormalizedCFG &cfg, std::optional<BlockId> b, ActionId s, ActionId t,
                     const graph::Path &p) {
  return data_fact(cfg, b, s, t, p).can;
}

}  // namespace rmcfence::deps
