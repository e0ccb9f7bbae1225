#pragma once

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "rmcfence/cfg.hpp"
#include "rmcfence/ir.hpp"

namespace testutil {

using namespace rmcfence;

inline ir::FunctionIR parse_one(const std::string &text) {
  auto r = ir::parse(text);
  for (const auto &d : r.diagnostics) INFO(ir::to_string(d));
  REQUIRE(r.ok());
  REQUIRE(r.functions.size() == 1);
  auto diags = ir::validate(r.functions[0]);
  for (const auto &d : diags) FAIL_CHECK(ir::to_string(d));
  return r.functions[0];
}

inline NormalizedCFG norm(const std::string &text) { return normalize(parse_one(text)); }

inline BlockId blk(const NormalizedCFG &cfg, const std::string &name) {
  BlockId b = cfg.fn.find_block(name);
  REQUIRE_MESSAGE(b != ir::kNone, "no block " << name);
  return b;
}

inline ActionId act(const NormalizedCFG &cfg, const std::string &name) {
  ActionId a = cfg.fn.find_action(name);
  REQUIRE_MESSAGE(a != ir::kNone, "no action " << name);
  return a;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus_path(const std::string &name) {
  return std::string(RMCFENCE_CORPUS_DIR) + "/" + name + ".rmcir";
}

/// A random function with `n` blocks whose terminators are random jumps,
/// branches and returns. Retries until the result validates.
inline std::string random_cfg_text(std::mt19937 &rng, int n) {
  for (;;) {
    std::string text = "func r {\n";
    for (int b = 0; b < n; ++b) {
      text += fmt::format("  block b{}:\n", b);
      int pick = std::uniform_int_distribution<int>(0, 9)(rng);
      auto target = [&] { return std::uniform_int_distribution<int>(1, n - 1)(rng); };
      if (n == 1 || pick < 2) {
        text += "    ret\n";
      } else if (pick < 5) {
        text += fmt::format("    jmp b{}\n", target());
      } else {
        int x = target(), y = target();
        if (x == y) {
          text += fmt::format("    jmp b{}\n", x);
        } else {
          text += fmt::format("    br 1 ? b{} : b{}\n", x, y);
        }
      }
    }
    text += "}\n";
    auto r = ir::parse(text);
    if (!r.ok() || !ir::validate(r.functions[0]).empty()) continue;
    return text;
  }
}

}  // namespace testutil
