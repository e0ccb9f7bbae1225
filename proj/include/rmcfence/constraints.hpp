#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmcfence/cfg.hpp"

namespace rmcfence::constraints {

using ir::EdgeKind;

struct ConstraintEdge {
  EdgeKind kind = EdgeKind::Xo;
  ActionId source = ir::kNone;
  ActionId dest = ir::kNone;
  std::optional<std::string> binding;
  bool derived = false;
  int decl_index = 0;       // declaration the edge came from (last one for derived edges)
  std::vector<int> chain;   // derived only: input edge indices, in order

  bool operator==(const ConstraintEdge &) const = default;
};

enum class Side { Pre, Post };

/// pre: every program-order predecessor of `action` is ordered before it.
/// post: `action` is ordered before every program-order successor.
struct BoundaryConstraint {
  EdgeKind kind = EdgeKind::Xo;
  Side side = Side::Pre;
  ActionId action = ir::kNone;
  int decl_index = 0;

  bool operator==(const BoundaryConstraint &) const = default;
};

struct Resolved {
  std::vector<ConstraintEdge> edges;
  std::vector<BoundaryConstraint> boundaries;
  std::vector<ir::Diagnostic> diagnostics;
};

Resolved resolve(const ir::FunctionIR &f);

/// Noop-mediated closure. `is_noop[a]` tells whether action a is a noop.
std::vector<ConstraintEdge> close(const std::vector<ConstraintEdge> &edges, const std::vector<bool> &is_noop);

std::vector<bool> noop_mask(const ir::FunctionIR &f);

}  // namespace rmcfence::constraints
