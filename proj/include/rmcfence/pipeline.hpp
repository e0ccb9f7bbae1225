#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "rmcfence/arch.hpp"
#include "rmcfence/cfg.hpp"
#include "rmcfence/constraints.hpp"
#include "rmcfence/emit.hpp"
#include "rmcfence/encode.hpp"
#include "rmcfence/solver.hpp"

namespace rmcfence::pipeline {

/// A validated function with its normalized CFG and closed constraints.
struct Prepared {
  ir::FunctionIR original;
  NormalizedCFG cfg;
  std::vector<constraints::ConstraintEdge> edges;
  std::vector<constraints::BoundaryConstraint> boundaries;
};

struct Loaded {
  std::vector<Prepared> functions;
  std::vector<ir::Diagnostic> diagnostics;  // non-empty means invalid input
};

Loaded load(const std::string &text);
Prepared prepare(const ir::FunctionIR &f, std::vector<ir::Diagnostic> &diags);

struct Compiled {
  encode::Problem problem;
  solver::Assignment assignment;
  emit::PlacementPlan plan;
};

Compiled compile(const Prepared &p, const arch::ArchProfile &profile, const arch::CostTable &costs,
                 const encode::Options &opt = {}, std::optional<std::chrono::milliseconds> budget = std::nullopt);

encode::Problem build_problem(const Prepared &p, const arch::ArchProfile &profile, const arch::CostTable &costs,
                              const encode::Options &opt = {});

}  // namespace rmcfence::pipeline
