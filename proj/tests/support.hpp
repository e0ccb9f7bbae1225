#pragma once

// Shared by the unit tests and the acceptance binary; no test framework here.

#include <array>
#include <cstdio>
#include <sys/wait.h>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmcfence/encode.hpp"
#include "rmcfence/pipeline.hpp"

namespace support {

using namespace rmcfence;

inline const std::vector<std::string> kCorpus = {"mp",     "mp_loop",         "sb_push", "overlap",
                                                  "cond",   "loop",            "selfdep", "widget",
                                                  "widget_unscoped", "ringbuf", "spinlock"};
inline const std::vector<std::string> kArchs = {"x86", "armv7", "armv8", "power"};

inline std::string corpus_file(const std::string &name) {
  return std::string(RMCFENCE_CORPUS_DIR) + "/" + name + ".rmcir";
}

inline std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<pipeline::Prepared> load_text(const std::string &text) {
  auto loaded = pipeline::load(text);
  if (!loaded.diagnostics.empty()) throw std::runtime_error(ir::to_string(loaded.diagnostics.front()));
  return loaded.functions;
}

inline std::vector<pipeline::Prepared> load_corpus(const std::string &name) {
  return load_text(slurp(corpus_file(name)));
}

inline const pipeline::Prepared &function(const std::vector<pipeline::Prepared> &fns, const std::string &name) {
  for (const auto &f : fns)
    if (f.cfg.fn.name == name) return f;
  throw std::runtime_error("no function " + name);
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

/// Runs the CLI with `args` (already shell-quoted), capturing stdout.
/// `env` is prepended as shell variable assignments.
inline RunResult run_cli(const std::string &args, const std::string &env = "") {
  std::string cmd = env + " " + std::string(RMCFENCE_CLI) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

/// A random positive problem over `n` output variables, with possibly
/// recursive definitions. The all-true assignment always satisfies it.
inline encode::Problem random_problem(std::mt19937 &rng, int n) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    encode::Problem p;
    for (int i = 0; i < n; ++i) {
      encode::OutputVar v;
      v.kind = "k" + std::to_string(i);
      v.edge = i;
      v.cost = pick(1, 20);
      p.vars.push_back(v);
    }
    int ndefs = pick(0, 3);
    p.defs.resize(ndefs);
    auto leaf = [&]() {
      encode::Node node;
      int r = pick(0, 9);
      if (r < 7 || ndefs == 0) {
        node.op = encode::NodeOp::Out;
        node.ref = pick(0, n - 1);
      } else if (r < 9) {
        node.op = encode::NodeOp::Def;
        node.ref = pick(0, ndefs - 1);
      } else {
        node.op = encode::NodeOp::Const;
        node.value = pick(0, 1) == 1;
      }
      p.nodes.push_back(node);
      return static_cast<int>(p.nodes.size()) - 1;
    };
    std::function<int(int)> expr = [&](int depth) {
      if (depth == 0 || pick(0, 3) == 0) return leaf();
      encode::Node node;
      node.op = pick(0, 1) ? encode::NodeOp::And : encode::NodeOp::Or;
      int k = pick(1, 3);
      for (int i = 0; i < k; ++i) node.kids.push_back(expr(depth - 1));
      p.nodes.push_back(node);
      return static_cast<int>(p.nodes.size()) - 1;
    };
    for (int d = 0; d < ndefs; ++d) p.defs[d] = {"d" + std::to_string(d), expr(3)};
    int nassert = pick(1, 5);
    for (int a = 0; a < nassert; ++a) p.assertions.push_back({"a" + std::to_string(a), expr(3), false, a});
    if (encode::Evaluator(p).satisfied(std::vector<bool>(n, true))) return p;
  }
}

}  // namespace support
