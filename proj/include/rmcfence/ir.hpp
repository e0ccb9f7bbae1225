#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmcfence::ir {

using ValueId = int;
using BlockId = int;
using ActionId = int;

inline constexpr int kNone = -1;

/// A source position, 1-based.
struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Diagnostic {
  SourcePos pos;
  std::string message;
};

std::string to_string(const Diagnostic &d);

enum class ActionKind { Read, Write, Rmw, Push, Noop };
enum class RmwOp { Xchg, Add };
enum class EdgeKind { Xo = 0, Vo = 1, Pu = 2 };

const char *to_string(ActionKind k);
const char *to_string(EdgeKind k);

/// Strength order used when constraint edges compose: pu > vo > xo.
inline EdgeKind stronger(EdgeKind a, EdgeKind b) {
  return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

struct Operand {
  bool is_literal = true;
  std::int64_t literal = 0;
  ValueId value = kNone;

  static Operand of_value(ValueId v) { return Operand{false, 0, v}; }
  static Operand of_literal(std::int64_t n) { return Operand{true, n, kNone}; }
  bool operator==(const Operand &) const = default;
};

struct Location {
  bool is_global = true;
  std::string global;       // without the '@'
  ValueId pointer = kNone;  // for '*%v'
};

struct PhiArm {
  BlockId pred = kNone;
  Operand value;
};

struct Instruction {
  enum class Kind { Action, Op, Phi, Bind };

  Kind kind = Kind::Op;
  ValueId result = kNone;
  SourcePos pos;

  // Kind::Action
  ActionKind action = ActionKind::Noop;
  ActionId action_id = kNone;
  Location loc;
  RmwOp rmw = RmwOp::Xchg;
  Operand data;
  std::vector<std::string> labels;

  // Kind::Op
  std::string op_name;
  std::vector<Operand> args;

  // Kind::Phi
  std::vector<PhiArm> arms;

  // Kind::Bind
  std::string bind;

  bool is_labeled_action() const { return kind == Kind::Action && !labels.empty(); }
};

struct Terminator {
  enum class Kind { Jump, Branch, Return };
  Kind kind = Kind::Return;
  Operand cond;                  // Branch
  BlockId target = kNone;        // Jump target, or Branch "then"
  BlockId else_target = kNone;   // Branch "else"
  std::optional<Operand> value;  // Return
  SourcePos pos;

  std::vector<BlockId> successors() const;
};

struct BasicBlock {
  std::string name;
  std::vector<Instruction> instrs;
  Terminator term;
  SourcePos pos;
};

struct Value {
  std::string name;  // without the '%'
  BlockId block = kNone;
  int index = kNone;  // instruction index inside the block
};

/// Resolved view of one action, stable across normalization.
struct ActionInfo {
  ActionKind kind = ActionKind::Noop;
  std::vector<std::string> labels;
  std::string name;  // display name, unique within the function
  std::string orig_block;
  int orig_index = 0;
  ValueId value = kNone;  // read / rmw result
};

struct ConstraintDecl {
  EdgeKind kind = EdgeKind::Xo;
  std::string source;
  std::string dest;
  std::optional<std::string> binding;
  SourcePos pos;
};

struct FunctionIR {
  std::string name;
  std::vector<BasicBlock> blocks;
  BlockId entry = 0;
  std::vector<ConstraintDecl> decls;
  std::vector<Value> values;
  std::vector<ActionInfo> actions;
  SourcePos pos;

  BlockId find_block(const std::string &name) const;
  ValueId find_value(const std::string &name) const;
  ActionId find_action(const std::string &name) const;
  std::vector<ActionId> actions_with_tag(const std::string &tag) const;
  const Instruction &action_instr(ActionId a) const;
};

inline bool defines_value(ActionKind k) { return k == ActionKind::Read || k == ActionKind::Rmw; }
inline bool is_write_only(ActionKind k) { return k == ActionKind::Write; }

struct ParseResult {
  std::vector<FunctionIR> functions;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

/// Parses IR text. On any diagnostic no functions are returned.
ParseResult parse(const std::string &text);

/// Structural checks that need the whole function: SSA dominance, phi
/// predecessors, tag usage, reachability.
std::vector<Diagnostic> validate(const FunctionIR &f);

std::string print(const FunctionIR &f);
std::string print(const std::vector<FunctionIR> &fs);

/// Comment lines to splice into printed IR, keyed by (block, instruction
/// index). Index == instrs.size() places the lines before the terminator.
using Annotations = std::map<std::pair<BlockId, int>, std::vector<std::string>>;
std::string print(const FunctionIR &f, const Annotations &notes);

/// Recomputes `values`, `actions` and per-instruction action ids from the
/// block contents.
void rebuild_tables(FunctionIR &f);

/// Dominator tree over real CFG edges. idom[entry] == entry; unreachable
/// blocks get kNone.
std::vector<BlockId> dominators(const std::vector<std::vector<BlockId>> &succs, BlockId entry);
bool dominates(const std::vector<BlockId> &idom, BlockId a, BlockId b);

}  // namespace rmcfence::ir
