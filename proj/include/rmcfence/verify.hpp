#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "rmcfence/arch.hpp"
#include "rmcfence/cfg.hpp"
#include "rmcfence/constraints.hpp"
#include "rmcfence/emit.hpp"
#include "rmcfence/encode.hpp"

namespace rmcfence::verify {

struct Verdict {
  bool valid = true;
  std::vector<std::string> violations;  // "UNCUT kind s->t via [b0,...]"
  std::vector<std::string> errors;  // plan entries that do not fit the function
};

/// Re-derives paths and dependency facts from scratch and evaluates every
/// constraint under the plan.
Verdict check_plan(const NormalizedCFG &cfg, const std::vector<constraints::ConstraintEdge> &edges,
                   const std::vector<constraints::BoundaryConstraint> &boundaries, const arch::ArchProfile &profile,
                   const emit::PlacementPlan &plan);

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultBruteCap = 16;

/// Minimum objective over all assignments that satisfy the problem.
long brute_min(const encode::Problem &p, std::size_t cap = kDefaultBruteCap);

/// Barrier-only baseline: constraints in declaration order, cheapest
/// sufficient barrier on the last edge of each path still uncut.
emit::PlacementPlan greedy(const NormalizedCFG &cfg, const std::vector<constraints::ConstraintEdge> &edges,
                           const std::vector<constraints::BoundaryConstraint> &boundaries,
                           const arch::ArchProfile &profile, const arch::CostTable &costs);

}  // namespace rmcfence::verify
