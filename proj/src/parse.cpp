#include "rmcfence/ir.hpp"

#include <cctype>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

namespace rmcfence::ir {

namespace {

enum class Tok { Ident, Val, Global, Int, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

struct SyntaxError : std::runtime_error {
  SourcePos pos;
  SyntaxError(SourcePos p, const std::string &msg) : std::runtime_error(msg), pos(p) {}
};

std::vector<Token> lex(const std::string &text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    // '#' and ';;' both start a comment running to end of line.
    if (c == '#' || (c == ';' && i + 1 < text.size() && text[i + 1] == ';')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (c == '%' || c == '@') {
      std::size_t j = i + 1;
      if (j >= text.size() || !ident_start(text[j]))
        throw SyntaxError(pos, fmt::format("expected identifier after '{}'", c));
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({c == '%' ? Tok::Val : Tok::Global, text.substr(i + 1, j - i - 1), pos});
      advance(j - i);
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      out.push_back({Tok::Ident, text.substr(i, j - i), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Int, text.substr(i, j - i), pos});
      advance(j - i);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Tok::Punct, "->", pos});
      advance(2);
      continue;
    }
    if (std::string_view("{}:=()[],;?*").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), pos});
      advance(1);
      continue;
    }
    throw SyntaxError(pos, fmt::format("unexpected character '{}'", c));
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void parse_file(ParseResult &res) {
    while (peek().kind != Tok::End) {
      FunctionIR f = parse_func();
      res.functions.push_back(std::move(f));
    }
    for (auto &d : pending_diags_) res.diagnostics.push_back(std::move(d));
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  std::vector<Diagnostic> pending_diags_;

  // Per-function resolution state.
  std::map<std::string, int> block_mention_;
  std::vector<std::pair<std::string, SourcePos>> block_mentions_;
  std::map<std::string, ValueId> value_ids_;
  std::vector<SourcePos> value_first_use_;
  std::vector<bool> value_defined_;

  const Token &peek(std::size_t ahead = 0) const {
    return toks_[std::min(at_ + ahead, toks_.size() - 1)];
  }
  Token next() {
    Token t = peek();
    if (at_ < toks_.size() - 1) ++at_;
    return t;
  }
  bool is_punct(const char *p) const { return peek().kind == Tok::Punct && peek().text == p; }
  bool is_word(const char *w) const { return peek().kind == Tok::Ident && peek().text == w; }

  Token expect_punct(const char *p) {
    if (!is_punct(p)) fail(fmt::format("expected '{}'", p));
    return next();
  }
  Token expect_word(const char *w) {
    if (!is_word(w)) fail(fmt::format("expected '{}'", w));
    return next();
  }
  Token expect_ident(const char *what) {
    if (peek().kind != Tok::Ident) fail(fmt::format("expected {}", what));
    return next();
  }
  [[noreturn]] void fail(const std::string &msg) const {
    const Token &t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : fmt::format("'{}'", t.text);
    throw SyntaxError(t.pos, fmt::format("{}, found {}", msg, found));
  }

  int mention_block(const std::string &name, SourcePos pos) {
    auto it = block_mention_.find(name);
    if (it != block_mention_.end()) return it->second;
    int id = static_cast<int>(block_mentions_.size());
    block_mention_.emplace(name, id);
    block_mentions_.emplace_back(name, pos);
    return id;
  }

  ValueId mention_value(const std::string &name, SourcePos pos) {
    auto it = value_ids_.find(name);
    if (it != value_ids_.end()) return it->second;
    ValueId id = static_cast<ValueId>(value_defined_.size());
    value_ids_.emplace(name, id);
    value_first_use_.push_back(pos);
    value_defined_.push_back(false);
    return id;
  }

  ValueId define_value(const Token &t, FunctionIR &f) {
    ValueId id = mention_value(t.text, t.pos);
    if (value_defined_[id]) {
      pending_diags_.push_back({t.pos, fmt::format("duplicate definition of value %{}", t.text)});
    }
    value_defined_[id] = true;
    if (static_cast<int>(f.values.size()) <= id) f.values.resize(id + 1);
    f.values[id].name = t.text;
    return id;
  }

  Operand parse_operand() {
    if (peek().kind == Tok::Val) {
      Token t = next();
      return Operand::of_value(mention_value(t.text, t.pos));
    }
    if (peek().kind == Tok::Int) {
      Token t = next();
      return Operand::of_literal(std::stoll(t.text));
    }
    fail("expected operand");
  }

  Location parse_loc() {
    Location loc;
    if (peek().kind == Tok::Global) {
      loc.is_global = true;
      loc.global = next().text;
      return loc;
    }
    if (is_punct("*")) {
      next();
      if (peek().kind != Tok::Val) fail("expected pointer value after '*'");
      Token t = next();
      loc.is_global = false;
      loc.pointer = mention_value(t.text, t.pos);
      return loc;
    }
    fail("expected location ('@name' or '*%value')");
  }

  std::vector<std::string> parse_opt_tag() {
    if (!is_word("label")) return {};
    next();
    Token t = expect_ident("tag name");
    if (t.text == "pre" || t.text == "post")
      pending_diags_.push_back({t.pos, fmt::format("tag '{}' is reserved", t.text)});
    return {t.text};
  }

  ConstraintDecl parse_decl() {
    ConstraintDecl d;
    d.pos = expect_word("edge").pos;
    Token k = expect_ident("edge kind");
    if (k.text == "vo") d.kind = EdgeKind::Vo;
    else if (k.text == "xo") d.kind = EdgeKind::Xo;
    else if (k.text == "pu") d.kind = EdgeKind::Pu;
    else throw SyntaxError(k.pos, fmt::format("unknown edge kind '{}'", k.text));
    if (is_word("here")) {
      next();
      expect_punct("(");
      d.binding = expect_ident("binding name").text;
      expect_punct(")");
    }
    Token src = expect_ident("source tag");
    expect_punct("->");
    Token dst = expect_ident("destination tag");
    expect_punct(";");
    d.source = src.text;
    d.dest = dst.text;
    if (d.source == "post")
      pending_diags_.push_back({src.pos, "'post' may only appear as a destination"});
    if (d.dest == "pre")
      pending_diags_.push_back({dst.pos, "'pre' may only appear as a source"});
    if (d.source == "pre" && d.dest == "post")
      pending_diags_.push_back({d.pos, "'pre' and 'post' cannot appear in one declaration"});
    if (d.binding && (d.source == "pre" || d.dest == "post"))
      pending_diags_.push_back({d.pos, "'pre'/'post' cannot be combined with a binding point"});
    return d;
  }

  Instruction parse_instr(FunctionIR &f) {
    Instruction in;
    in.pos = peek().pos;
    if (peek().kind == Tok::Val) {
      Token def = next();
      expect_punct("=");
      Token op = expect_ident("instruction");
      in.result = define_value(def, f);
      if (op.text == "read") {
        in.kind = Instruction::Kind::Action;
        in.action = ActionKind::Read;
        in.loc = parse_loc();
        in.labels = parse_opt_tag();
      } else if (op.text == "rmw") {
        in.kind = Instruction::Kind::Action;
        in.action = ActionKind::Rmw;
        in.loc = parse_loc();
        Token rop = expect_ident("rmw operator");
        if (rop.text == "xchg") in.rmw = RmwOp::Xchg;
        else if (rop.text == "add") in.rmw = RmwOp::Add;
        else throw SyntaxError(rop.pos, fmt::format("unknown rmw operator '{}'", rop.text));
        in.data = parse_operand();
        in.labels = parse_opt_tag();
      } else if (op.text == "op") {
        in.kind = Instruction::Kind::Op;
        in.op_name = expect_ident("operator name").text;
        expect_punct("(");
        if (!is_punct(")")) {
          in.args.push_back(parse_operand());
          while (is_punct(",")) {
            next();
            in.args.push_back(parse_operand());
          }
        }
        expect_punct(")");
      } else if (op.text == "phi") {
        in.kind = Instruction::Kind::Phi;
        do {
          if (!in.arms.empty()) next();  // ','
          expect_punct("[");
          Token b = expect_ident("predecessor block");
          expect_punct(":");
          PhiArm arm;
          arm.pred = mention_block(b.text, b.pos);
          arm.value = parse_operand();
          expect_punct("]");
          in.arms.push_back(arm);
        } while (is_punct(","));
      } else {
        throw SyntaxError(op.pos, fmt::format("unknown instruction '{}'", op.text));
      }
      return in;
    }
    Token w = expect_ident("instruction");
    if (w.text == "write") {
      in.kind = Instruction::Kind::Action;
      in.action = ActionKind::Write;
      in.loc = parse_loc();
      in.data = parse_operand();
      in.labels = parse_opt_tag();
    } else if (w.text == "push") {
      in.kind = Instruction::Kind::Action;
      in.action = ActionKind::Push;
      in.labels = parse_opt_tag();
    } else if (w.text == "noop") {
      in.kind = Instruction::Kind::Action;
      in.action = ActionKind::Noop;
      if (!is_word("label")) fail("expected 'label' after 'noop'");
      in.labels = parse_opt_tag();
    } else if (w.text == "bind") {
      in.kind = Instruction::Kind::Bind;
      in.bind = expect_ident("binding name").text;
    } else {
      throw SyntaxError(w.pos, fmt::format("unknown instruction '{}'", w.text));
    }
    return in;
  }

  bool at_terminator() const { return is_word("jmp") || is_word("br") || is_word("ret"); }

  Terminator parse_term() {
    Terminator t;
    t.pos = peek().pos;
    Token w = next();
    if (w.text == "jmp") {
      t.kind = Terminator::Kind::Jump;
      Token b = expect_ident("block name");
      t.target = mention_block(b.text, b.pos);
    } else if (w.text == "br") {
      t.kind = Terminator::Kind::Branch;
      t.cond = parse_operand();
      expect_punct("?");
      Token a = expect_ident("block name");
      expect_punct(":");
      Token b = expect_ident("block name");
      t.target = mention_block(a.text, a.pos);
      t.else_target = mention_block(b.text, b.pos);
    } else {
      t.kind = Terminator::Kind::Return;
      if (peek().kind == Tok::Val || peek().kind == Tok::Int) t.value = parse_operand();
    }
    return t;
  }

  FunctionIR parse_func() {
    block_mention_.clear();
    block_mentions_.clear();
    value_ids_.clear();
    value_first_use_.clear();
    value_defined_.clear();

    FunctionIR f;
    f.pos = expect_word("func").pos;
    f.name = expect_ident("function name").text;
    expect_punct("{");
    while (is_word("edge")) f.decls.push_back(parse_decl());

    std::vector<int> mention_of_block;
    std::map<std::string, SourcePos> defined_blocks;
    while (is_word("block")) {
      BasicBlock bb;
      bb.pos = next().pos;
      Token name = expect_ident("block name");
      expect_punct(":");
      bb.name = name.text;
      if (defined_blocks.count(bb.name)) {
        pending_diags_.push_back({name.pos, fmt::format("duplicate block '{}'", bb.name)});
      }
      defined_blocks.emplace(bb.name, name.pos);
      mention_of_block.push_back(mention_block(bb.name, name.pos));
      while (!at_terminator()) {
        if (is_word("block") || is_punct("}") || peek().kind == Tok::End)
          fail("expected instruction or terminator");
        bb.instrs.push_back(parse_instr(f));
      }
      bb.term = parse_term();
      f.blocks.push_back(std::move(bb));
    }
    if (f.blocks.empty()) fail("expected 'block'");
    expect_punct("}");

    // Block names -> indices.
    std::vector<BlockId> remap(block_mentions_.size(), kNone);
    for (std::size_t i = 0; i < mention_of_block.size(); ++i) {
      if (remap[mention_of_block[i]] == kNone) remap[mention_of_block[i]] = static_cast<BlockId>(i);
    }
    for (std::size_t m = 0; m < block_mentions_.size(); ++m) {
      if (remap[m] == kNone) {
        pending_diags_.push_back({block_mentions_[m].second,
                                  fmt::format("unknown block '{}'", block_mentions_[m].first)});
      }
    }
    auto fix = [&](BlockId &b) {
      if (b != kNone) b = remap[b];
    };
    for (auto &bb : f.blocks) {
      for (auto &in : bb.instrs)
        for (auto &arm : in.arms) fix(arm.pred);
      fix(bb.term.target);
      fix(bb.term.else_target);
    }

    // Values mentioned but never defined.
    f.values.resize(value_defined_.size());
    for (const auto &[name, id] : value_ids_) {
      if (!value_defined_[id]) {
        pending_diags_.push_back({value_first_use_[id], fmt::format("undefined value %{}", name)});
        f.values[id].name = name;
      }
    }
    rebuild_tables(f);
    return f;
  }
};

}  // namespace

ParseResult parse(const std::string &text) {
  ParseResult res;
  try {
    Parser p(lex(text));
    p.parse_file(res);
  } catch (const SyntaxError &e) {
    res.diagnostics.push_back({e.pos, e.what()});
  }
  if (!res.diagnostics.empty()) res.functions.clear();
  return res;
}

}  // namespace rmcfence::ir
