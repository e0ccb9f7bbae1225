// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "support.hpp"

#include "rmcfence/graph.hpp"
#include "rmcfence/pipeline.hpp"
#include "rmcfence/verify.hpp"

using namespace rmcfence;
using support::load_corpus;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string &why) {
    if (!cond && ok) detail = why;
    ok = ok && cond;
  }
};

struct Ctx {
  const pipeline::Prepared &fn;
  arch::ArchProfile profile;
  arch::CostTable costs;
};

Ctx ctx(const pipeline::Prepared &fn, const std::string &arch_name) {
  Ctx c{fn, arch::builtin_profile(arch_name), {}};
  c.costs = arch::load_costs(c.profile).table;
  return c;
}

pipeline::Compiled compile(const Ctx &c, const encode::Options &opt = {}) {
  return pipeline::compile(c.fn, c.profile, c.costs, opt);
}

bool valid(const Ctx &c, const emit::PlacementPlan &plan) {
  return verify::check_plan(c.fn.cfg, c.fn.edges, c.fn.boundaries, c.profile, plan).valid;
}

EdgeId plan_edge(const NormalizedCFG &cfg, const emit::BarrierEntry &b) {
  return cfg.find_edge(cfg.fn.find_block(b.source_block), cfg.fn.find_block(b.dest_block));
}

Outcome overlap() {
  Outcome o;
  auto fns = load_corpus("overlap");
  auto c = ctx(fns[0], "armv7");
  auto plan = compile(c).plan;
  o.require(plan.barriers.size() == 1, fmt::format("{} barriers", plan.barriers.size()));
  if (!o.ok) return o;
  o.require(plan.barriers[0].kind == "dmb", "kind " + plan.barriers[0].kind);
  const auto &cfg = c.fn.cfg;
  EdgeId e = plan_edge(cfg, plan.barriers[0]);
  auto between = graph::simple_paths(cfg, cfg.action_block[cfg.fn.find_action("wb")],
                                     cfg.action_block[cfg.fn.find_action("wc")]);
  bool on = between.size() == 1 &&
            std::find(between[0].edges.begin(), between[0].edges.end(), e) != between[0].edges.end();
  o.require(on, "barrier is not between wb and wc");
  // The same program with its declarations swapped.
  auto text = support::slurp(support::corpus_file("overlap"));
  const std::string first = "  edge vo wa -> wc;\n", second = "  edge vo wb -> wd;\n";
  auto pos = text.find(first + second);
  o.require(pos != std::string::npos, "unexpected overlap source");
  if (!o.ok) return o;
  text.replace(pos, first.size() + second.size(), second + first);
  auto reversed = support::load_text(text);
  auto r = ctx(reversed[0], "armv7");
  auto greedy = verify::greedy(r.fn.cfg, r.fn.edges, r.fn.boundaries, r.profile, r.costs);
  o.require(plan.total_cost < greedy.total_cost,
            fmt::format("solver {} vs reversed greedy {}", plan.total_cost, greedy.total_cost));
  o.detail = o.ok ? fmt::format("dmb on {}->{}, cost {} < reversed greedy {}", plan.barriers[0].source_block,
                                plan.barriers[0].dest_block, plan.total_cost, greedy.total_cost)
                  : o.detail;
  return o;
}

Outcome conditional() {
  Outcome o;
  auto fns = load_corpus("cond");
  auto c = ctx(fns[0], "armv7");
  auto plan = compile(c).plan;
  o.require(plan.barriers.size() == 1, fmt::format("{} barriers", plan.barriers.size()));
  if (!o.ok) return o;
  const auto &cfg = c.fn.cfg;
  EdgeId e = plan_edge(cfg, plan.barriers[0]);
  // The block ending in the branch on `something`, and the arm it guards.
  BlockId branch = ir::kNone;
  for (BlockId b = 0; b < cfg.num_blocks(); ++b)
    if (cfg.fn.blocks[b].term.kind == ir::Terminator::Kind::Branch) branch = b;
  BlockId arm = cfg.action_block[cfg.fn.find_action("wb")];
  o.require(branch != ir::kNone, "no branch");
  if (!o.ok) return o;
  o.require(cfg.dominates(branch, cfg.edges[e].src), "source not dominated by the branch");
  o.require(cfg.dominates(arm, cfg.edges[e].dst), "barrier not in the arm");
  if (o.ok)
    o.detail = fmt::format("dmb on {}->{} inside the arm", plan.barriers[0].source_block, plan.barriers[0].dest_block);
  return o;
}

Outcome loop() {
  Outcome o;
  auto fns = load_corpus("loop");
  auto c = ctx(fns[0], "armv7");
  auto plan = compile(c).plan;
  o.require(plan.barriers.size() == 1, fmt::format("{} barriers", plan.barriers.size()));
  if (!o.ok) return o;
  const auto &cfg = c.fn.cfg;
  EdgeId e = plan_edge(cfg, plan.barriers[0]);
  auto depth = graph::loop_depths(cfg);
  BlockId header = cfg.fn.find_block("head");
  o.require(depth[e] == 0, "barrier inside the loop");
  o.require(cfg.dominates(cfg.edges[e].dst, header), "barrier does not precede the header");
  if (o.ok)
    o.detail = fmt::format("dmb on {}->{} at depth 0", plan.barriers[0].source_block, plan.barriers[0].dest_block);
  return o;
}

Outcome x86_free() {
  Outcome o;
  int programs = 0;
  for (const auto &name : support::kCorpus) {
    auto fns = load_corpus(name);
    bool has_push = false;
    for (const auto &fn : fns)
      for (const auto &e : fn.edges) has_push = has_push || e.kind == ir::EdgeKind::Pu;
    for (const auto &fn : fns) {
      auto plan = compile(ctx(fn, "x86")).plan;
      if (!has_push) {
        bool empty = plan.barriers.empty() && plan.ctrl_uses.empty() && plan.data_uses.empty() &&
                     plan.action_modes.empty() && plan.total_cost == 0;
        o.require(empty, fn.cfg.fn.name + " is not free on x86");
      }
    }
    programs += has_push ? 0 : 1;
  }
  int mfences = 0;
  for (const auto &fn : load_corpus("sb_push")) {
    auto plan = compile(ctx(fn, "x86")).plan;
    o.require(!plan.barriers.empty(), fn.cfg.fn.name + " has no barrier");
    for (const auto &b : plan.barriers) o.require(b.kind == "mfence", "sb_push uses " + b.kind);
    o.require(plan.ctrl_uses.empty() && plan.data_uses.empty() && plan.action_modes.empty(), "sb_push uses more");
    mfences += static_cast<int>(plan.barriers.size());
  }
  if (o.ok) o.detail = fmt::format("{} programs free, sb_push uses {} mfence", programs, mfences);
  return o;
}

Outcome widget() {
  Outcome o;
  auto scoped = load_corpus("widget");
  const auto &use = support::function(scoped, "use_widget");
  long scoped_cost = 0;
  for (const char *a : {"armv7", "power"}) {
    auto plan = compile(ctx(use, a)).plan;
    o.require(plan.barriers.empty(), fmt::format("{} barriers on {}", plan.barriers.size(), a));
    o.require(plan.data_uses.size() == 2, fmt::format("{} data uses on {}", plan.data_uses.size(), a));
    if (std::string(a) == "armv7") scoped_cost = plan.total_cost;
  }
  auto unscoped = load_corpus("widget_unscoped");
  long unscoped_cost = compile(ctx(support::function(unscoped, "use_widget"), "armv7")).plan.total_cost;
  o.require(unscoped_cost > scoped_cost, fmt::format("unscoped {} vs scoped {}", unscoped_cost, scoped_cost));
  if (o.ok) o.detail = fmt::format("no barriers, 2 data uses; unscoped cost {} > {}", unscoped_cost, scoped_cost);
  return o;
}

Outcome self_dependency() {
  Outcome o;
  // Every plan that leans on a control dependency must satisfy the checker,
  // which evaluates the self-ordering side condition on its own.
  int with_ctrl = 0;
  for (const auto &name : support::kCorpus) {
    for (const auto &fn : load_corpus(name)) {
      for (const auto &a : support::kArchs) {
        auto c = ctx(fn, a);
        encode::Options synth;
        synth.synth_ctrl = true;
        for (const auto &opt : {encode::Options{}, synth}) {
          auto plan = compile(c, opt).plan;
          if (plan.ctrl_uses.empty()) continue;
          ++with_ctrl;
          o.require(valid(c, plan), fmt::format("{} on {} fails the checker", fn.cfg.fn.name, a));
        }
      }
    }
  }
  auto fns = load_corpus("selfdep");
  auto c = ctx(fns[0], "armv7");
  auto plan = compile(c).plan;
  o.require(valid(c, plan), "selfdep plan invalid");
  encode::Options unsound;
  unsound.self_ordering = false;
  auto cheap = compile(c, unsound).plan;
  o.require(!cheap.ctrl_uses.empty(), "without the side condition no control use was chosen");
  o.require(!valid(c, cheap), "without the side condition the plan still checks");
  if (o.ok)
    o.detail = fmt::format("{} plans with control uses check; unguarded plan (cost {}) rejected", with_ctrl,
                           cheap.total_cost);
  return o;
}

Outcome armv8() {
  Outcome o;
  auto fns = load_corpus("mp");
  auto recv = compile(ctx(support::function(fns, "mp_recv"), "armv8")).plan;
  auto send = compile(ctx(support::function(fns, "mp_send"), "armv8")).plan;
  std::set<std::string> recv_used, send_used;
  for (const auto &b : recv.barriers) recv_used.insert(b.kind);
  for (const auto &m : recv.action_modes) recv_used.insert(m.mode);
  for (const auto &b : send.barriers) send_used.insert(b.kind);
  for (const auto &m : send.action_modes) send_used.insert(m.mode);
  o.require(!recv_used.empty() && !send_used.empty(), "empty plan");
  for (const auto &k : recv_used) o.require(k == "dmb_ld" || k == "acquire", "receive side uses " + k);
  for (const auto &k : send_used)
    o.require(k == "dmb_ldst" || k == "release" || k == "dmb_ld", "send side uses " + k);
  if (o.ok) {
    auto join = [](const std::set<std::string> &s) {
      std::string r;
      for (const auto &x : s) r += (r.empty() ? "" : ",") + x;
      return r;
    };
    o.detail = fmt::format("receive {}, send {}", join(recv_used), join(send_used));
  }
  return o;
}

Outcome oracle() {
  Outcome o;
  int corpus_checked = 0;
  for (const auto &name : support::kCorpus) {
    for (const auto &fn : load_corpus(name)) {
      for (const auto &a : support::kArchs) {
        auto compiled = compile(ctx(fn, a));
        if (compiled.problem.vars.size() > verify::kDefaultBruteCap) continue;
        ++corpus_checked;
        long brute = verify::brute_min(compiled.problem);
        o.require(brute == compiled.plan.total_cost,
                  fmt::format("{} on {}: brute {} vs solver {}", fn.cfg.fn.name, a, brute, compiled.plan.total_cost));
      }
    }
  }
  std::mt19937 rng(2024);
  for (int i = 0; i < 200; ++i) {
    int n = std::uniform_int_distribution<int>(1, 14)(rng);
    auto p = support::random_problem(rng, n);
    long brute = verify::brute_min(p);
    long solved = solver::solve_min(p).cost;
    o.require(brute == solved, fmt::format("random problem {}: brute {} vs solver {}", i, brute, solved));
  }
  if (o.ok) o.detail = fmt::format("{} corpus problems and 200 random problems agree", corpus_checked);
  return o;
}

Outcome soundness() {
  Outcome o;
  int plans = 0, mutants = 0;
  for (const auto &name : support::kCorpus) {
    for (const auto &fn : load_corpus(name)) {
      for (const auto &a : support::kArchs) {
        auto c = ctx(fn, a);
        auto plan = compile(c).plan;
        auto greedy = verify::greedy(fn.cfg, fn.edges, fn.boundaries, c.profile, c.costs);
        std::string where = fmt::format("{} on {}", fn.cfg.fn.name, a);
        o.require(valid(c, plan), where + ": solver plan invalid");
        o.require(valid(c, greedy), where + ": greedy plan invalid");
        plans += 2;
        auto try_drop = [&](auto member) {
          for (std::size_t i = 0; i < (plan.*member).size(); ++i) {
            auto smaller = plan;
            (smaller.*member).erase((smaller.*member).begin() + i);
            ++mutants;
            o.require(!valid(c, smaller), where + ": a plan element is redundant");
          }
        };
        try_drop(&emit::PlacementPlan::barriers);
        try_drop(&emit::PlacementPlan::ctrl_uses);
        try_drop(&emit::PlacementPlan::data_uses);
        try_drop(&emit::PlacementPlan::action_modes);
      }
    }
  }
  if (o.ok) o.detail = fmt::format("{} plans valid, {} single deletions all invalid", plans, mutants);
  return o;
}

Outcome determinism() {
  Outcome o;
  int pairs = 0;
  for (const auto &name : support::kCorpus) {
    for (const auto &a : support::kArchs) {
      std::string args = "compile --arch " + a + " " + support::corpus_file(name);
      auto first = support::run_cli(args), second = support::run_cli(args);
      o.require(first.exit_code == 0 && second.exit_code == 0, name + " on " + a + ": compile failed");
      o.require(!first.out.empty() && first.out == second.out, name + " on " + a + ": outputs differ");
      ++pairs;
    }
  }
  if (o.ok) o.detail = fmt::format("{} corpus/arch pairs byte-identical", pairs);
  return o;
}

struct Criterion {
  int id;
  const char *name;
  std::function<Outcome()> run;
  double limit_s;  // 0 for no time limit
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "overlap", overlap, 1},
      {2, "conditional", conditional, 1},
      {3, "loop", loop, 1},
      {4, "x86 free", x86_free, 0},
      {5, "widget", widget, 0},
      {6, "self-dependency", self_dependency, 0},
      {7, "armv8", armv8, 0},
      {8, "oracle equivalence", oracle, 60},
      {9, "soundness", soundness, 30},
      {10, "determinism", determinism, 0},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.ok = false;
      o.detail = fmt::format("took {:.2f}s, limit {}s; {}", secs, c.limit_s, o.detail);
    }
    failures += o.ok ? 0 : 1;
    fmt::print("{} criterion {} ({}): {} [{:.3f}s]\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail, secs);
  }
  return failures;
}
