#include "rmcfence/ir.hpp"

#include <fmt/format.h>

namespace rmcfence::ir {

namespace {

std::string operand(const FunctionIR &f, const Operand &o) {
  if (o.is_literal) return std::to_string(o.literal);
  return "%" + f.values[o.value].name;
}

std::string location(const FunctionIR &f, const Location &l) {
  if (l.is_global) return "@" + l.global;
  return "*%" + f.values[l.pointer].name;
}

std::string tags(const Instruction &in) {
  std::string out;
  for (const auto &l : in.labels) out += " label " + l;
  return out;
}

std::string instr(const FunctionIR &f, const Instruction &in) {
  auto res = [&] { return "%" + f.values[in.result].name + " = "; };
  switch (in.kind) {
    case Instruction::Kind::Action:
      switch (in.action) {
        case ActionKind::Read: return res() + "read " + location(f, in.loc) + tags(in);
        case ActionKind::Write:
          return "write " + location(f, in.loc) + " " + operand(f, in.data) + tags(in);
        case ActionKind::Rmw:
          return res() + "rmw " + location(f, in.loc) + (in.rmw == RmwOp::Xchg ? " xchg " : " add ") +
                 operand(f, in.data) + tags(in);
        case ActionKind::Push: return "push" + tags(in);
        case ActionKind::Noop: return "noop" + tags(in);
      }
      break;
    case Instruction::Kind::Op: {
      std::string args;
      for (std::size_t i = 0; i < in.args.size(); ++i) {
        if (i) args += ", ";
        args += operand(f, in.args[i]);
      }
      return res() + "op " + in.op_name + "(" + args + ")";
    }
    case Instruction::Kind::Phi: {
      std::string arms;
      for (std::size_t i = 0; i < in.arms.size(); ++i) {
        if (i) arms += ", ";
        arms += "[" + f.blocks[in.arms[i].pred].name + ": " + operand(f, in.arms[i].value) + "]";
      }
      return res() + "phi " + arms;
    }
    case Instruction::Kind::Bind: return "bind " + in.bind;
  }
  return "";
}

std::string term(const FunctionIR &f, const Terminator &t) {
  switch (t.kind) {
    case Terminator::Kind::Jump: return "jmp " + f.blocks[t.target].name;
    case Terminator::Kind::Branch:
      return "br " + operand(f, t.cond) + " ? " + f.blocks[t.target].name + " : " +
             f.blocks[t.else_target].name;
    case Terminator::Kind::Return: return t.value ? "ret " + operand(f, *t.value) : "ret";
  }
  return "";
}

}  // namespace

std::string print(const FunctionIR &f, const Annotations &notes) {
  std::string out = fmt::format("func {} {{\n", f.name);
  for (const auto &d : f.decls) {
    out += fmt::format("  edge {}{} {} -> {};\n", to_string(d.kind),
                       d.binding ? " here(" + *d.binding + ")" : "", d.source, d.dest);
  }
  auto emit_notes = [&](BlockId b, int i) {
    auto it = notes.find({b, i});
    if (it == notes.end()) return;
    for (const auto &line : it->second) out += "    ;; " + line + "\n";
  };
  for (std::size_t b = 0; b < f.blocks.size(); ++b) {
    const auto &bb = f.blocks[b];
    out += fmt::format("  block {}:\n", bb.name);
    for (std::size_t i = 0; i < bb.instrs.size(); ++i) {
      emit_notes(static_cast<BlockId>(b), static_cast<int>(i));
      out += "    " + instr(f, bb.instrs[i]) + "\n";
    }
    emit_notes(static_cast<BlockId>(b), static_cast<int>(bb.instrs.size()));
    out += "    " + term(f, bb.term) + "\n";
  }
  out += "}\n";
  return out;
}

std::string print(const FunctionIR &f) { return print(f, Annotations{}); }

std::string print(const std::vector<FunctionIR> &fs) {
  std::string out;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (i) out += "\n";
    out += print(fs[i]);
  }
  return out;
}

}  // namespace rmcfence::ir
