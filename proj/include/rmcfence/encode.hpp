#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmcfence/arch.hpp"
#include "rmcfence/cfg.hpp"
#include "rmcfence/constraints.hpp"
#include "rmcfence/graph.hpp"

namespace rmcfence::encode {

/// Canonical order of output variable types.
enum class VarType { Barrier = 0, UseCtrl = 1, UseData = 2, Acquire = 3, Release = 4 };
const char *to_string(VarType t);

struct OutputVar {
  VarType type = VarType::Barrier;
  std::string kind;  // barrier kind, "existing"/"synth", or the mode name
  EdgeId edge = ir::kNone;  // Barrier, UseCtrl
  ActionId source = ir::kNone;  // UseCtrl, UseData
  ActionId dest = ir::kNone;  // UseData
  ActionId action = ir::kNone;  // Acquire, Release
  std::optional<std::string> binding;  // UseData
  std::vector<ValueId> signature;  // UseData: shared dependency chain
  std::vector<BlockId> path;  // UseData: representative path
  long cost = 0;
};

enum class NodeOp { Const, Out, Def, And, Or };

struct Node {
  NodeOp op = NodeOp::Const;
  bool value = false;  // Const
  int ref = -1;  // Out: variable, Def: definition
  std::vector<int> kids;  // And, Or
};

struct Definition {
  std::string name;
  int expr = -1;
};

struct Assertion {
  std::string label;  // e.g. "xo a->b" or "pre vo t"
  int expr = -1;
  // Which constraint it encodes.
  bool boundary = false;
  int index = 0;  // into the closed edge list or the boundary list
};

/// Positive Boolean problem. Definitions may be mutually recursive; their
/// meaning is the greatest fixpoint.
struct Problem {
  std::vector<OutputVar> vars;
  std::vector<Node> nodes;
  std::vector<Definition> defs;
  std::vector<Assertion> assertions;

  long cost(const std::vector<bool> &assign) const;
};

/// Greatest-fixpoint evaluator. Nodes are stored children first, so one
/// linear pass evaluates every node for fixed definition values.
class Evaluator {
 public:
  explicit Evaluator(const Problem &p) : p_(p) {}
  /// Value of every node, with definitions at the greatest fixpoint.
  std::vector<bool> nodes(const std::vector<bool> &assign) const;
  bool satisfied(const std::vector<bool> &assign) const;
  /// Indices of assertions that fail.
  std::vector<int> failing(const std::vector<bool> &assign) const;

 private:
  const Problem &p_;
};

struct Options {
  bool data_deps = true;
  bool ctrl_deps = true;
  bool synth_ctrl = false;
  std::size_t max_paths = graph::kDefaultMaxPaths;
  /// Test hook: drop the ctrl(s,s) / xcut(s,s) side condition of dependency
  /// cuts. Unsound; used only to show the condition matters.
  bool self_ordering = true;
};

struct Input {
  const NormalizedCFG &cfg;
  const std::vector<constraints::ConstraintEdge> &edges;  // closed
  const std::vector<constraints::BoundaryConstraint> &boundaries;
  const arch::ArchProfile &profile;
  const arch::CostTable &costs;
};

/// Throws graph::PathExplosion.
Problem build(const Input &in, const Options &opt = {});

std::string var_name(const NormalizedCFG &cfg, const OutputVar &v);
std::string dump(const NormalizedCFG &cfg, const Problem &p);

}  // namespace rmcfence::encode
