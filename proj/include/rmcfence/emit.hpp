#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmcfence/cfg.hpp"
#include "rmcfence/encode.hpp"
#include "rmcfence/solver.hpp"

namespace rmcfence::emit {

struct BarrierEntry {
  std::string source_block;
  std::string dest_block;
  std::string kind;
  std::string realization;  // "src-end" or "dst-begin"
  bool operator==(const BarrierEntry &) const = default;
};

struct CtrlUse {
  std::string source;
  std::string source_block;
  std::string dest_block;
  std::string mode;  // "existing" or "synth"
  bool operator==(const CtrlUse &) const = default;
};

struct DataUse {
  std::string source;
  std::string dest;
  std::optional<std::string> binding;
  std::vector<std::string> path;
  bool operator==(const DataUse &) const = default;
};

struct ActionMode {
  std::string action;
  std::string mode;  // "acquire" or "release"
  bool operator==(const ActionMode &) const = default;
};

struct PlacementPlan {
  std::string function_name;
  std::string arch_name;
  long total_cost = 0;
  std::vector<BarrierEntry> barriers;
  std::vector<CtrlUse> ctrl_uses;
  std::vector<DataUse> data_uses;
  std::vector<ActionMode> action_modes;
  std::string solver_status = "optimal";
  long solver_nodes = 0;
  long solver_decisions = 0;
  bool operator==(const PlacementPlan &) const = default;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "src-end" when the edge's source has a single successor, else "dst-begin".
std::string realization(const NormalizedCFG &cfg, EdgeId e);

PlacementPlan to_plan(const solver::Assignment &a, const encode::Problem &p, const NormalizedCFG &cfg,
                      const std::string &arch_name);

std::string serialize(const std::vector<PlacementPlan> &plans);
/// Accepts an array of plans, a single plan object, or empty input.
std::vector<PlacementPlan> parse_plans(const std::string &text);

/// The original function printed with placement comments.
std::string annotate(const ir::FunctionIR &original, const NormalizedCFG &cfg, const PlacementPlan &plan);

}  // namespace rmcfence::emit
