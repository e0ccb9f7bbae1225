#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rmcfence/deps.hpp"
#include "rmcfence/graph.hpp"
#include "rmcfence/pipeline.hpp"
#include "rmcfence/verify.hpp"

using namespace rmcfence;

namespace {

enum Exit { kOk = 0, kInvalidInput = 1, kPathExplosion = 2, kBudget = 3, kPlanInvalid = 4 };

// Thrown for problems with user input; carries the exit code.
struct Failure {
  int code;
  std::string message;
};

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kInvalidInput, fmt::format("cannot read '{}'", path)};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Common {
  std::string arch;
  std::string input;
  std::string costs_file;
  bool no_data = false;
  bool no_ctrl = false;
  bool synth = false;
  std::size_t max_paths = graph::kDefaultMaxPaths;
  std::optional<int> loop_factor;

  void add_to(CLI::App &cmd, bool deps_flags) {
    cmd.add_option("--arch", arch, "Target architecture")
        ->required()
        ->check(CLI::IsMember(arch::profile_names()));
    cmd.add_option("--costs", costs_file, "Cost override file (key = integer)");
    cmd.add_option("--max-paths", max_paths, "Simple-path cap per action pair")->check(CLI::PositiveNumber);
    cmd.add_option("--loop-factor", loop_factor, "Weight multiplier per loop level")->check(CLI::PositiveNumber);
    if (deps_flags) {
      cmd.add_flag("--no-data-deps", no_data, "Never use data dependencies");
      cmd.add_flag("--no-ctrl-deps", no_ctrl, "Never use control dependencies");
      cmd.add_flag("--synth-deps", synth, "Allow synthesized control dependencies");
    }
  }

  arch::ArchProfile profile() const { return arch::builtin_profile(arch); }

  arch::CostTable costs(const arch::ArchProfile &p) const {
    std::optional<std::string> text;
    if (!costs_file.empty()) {
      text = slurp(costs_file);
    } else if (const char *env = std::getenv("RMCFENCE_COSTS"); env && *env) {
      text = slurp(env);
    }
    arch::LoadedCosts loaded;
    try {
      loaded = arch::load_costs(p, text);
    } catch (const arch::ConfigError &e) {
      throw Failure{kInvalidInput, fmt::format("cost config: {}", e.what())};
    }
    for (const auto &w : loaded.warnings) fmt::print(stderr, "warning: {}\n", w);
    if (loop_factor) loaded.table.loop_factor = *loop_factor;
    return loaded.table;
  }

  encode::Options options() const {
    encode::Options o;
    o.data_deps = !no_data;
    o.ctrl_deps = !no_ctrl;
    o.synth_ctrl = synth;
    o.max_paths = max_paths;
    return o;
  }

  pipeline::Loaded load() const {
    auto loaded = pipeline::load(slurp(input));
    if (!loaded.diagnostics.empty()) {
      std::string msg;
      for (const auto &d : loaded.diagnostics) msg += fmt::format("{}: {}\n", input, ir::to_string(d));
      msg.pop_back();
      throw Failure{kInvalidInput, msg};
    }
    return loaded;
  }
};

void write_output(const std::string &out, const std::string &text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Failure{kInvalidInput, fmt::format("cannot write '{}'", out)};
  f << text;
}

int run_compile(const Common &c, const std::string &format, const std::string &out,
                std::optional<long> budget_ms) {
  auto loaded = c.load();
  auto profile = c.profile();
  auto costs = c.costs(profile);
  std::optional<std::chrono::milliseconds> budget;
  if (budget_ms) budget = std::chrono::milliseconds(*budget_ms);
  std::vector<emit::PlacementPlan> plans;
  std::string annotated;
  bool timed_out = false;
  for (const auto &fn : loaded.functions) {
    auto compiled = pipeline::compile(fn, profile, costs, c.options(), budget);
    timed_out = timed_out || compiled.assignment.status == solver::Status::BudgetExceeded;
    if (!annotated.empty()) annotated += "\n";
    annotated += emit::annotate(fn.original, fn.cfg, compiled.plan);
    plans.push_back(std::move(compiled.plan));
  }
  write_output(out, format == "annotated" ? annotated : emit::serialize(plans));
  if (timed_out) {
    fmt::print(stderr, "solver budget exhausted; the plan is valid but may not be minimal\n");
    return kBudget;
  }
  return kOk;
}

int run_check(const Common &c, const std::string &plan_file) {
  auto loaded = c.load();
  auto profile = c.profile();
  std::vector<emit::PlacementPlan> plans;
  try {
    plans = emit::parse_plans(slurp(plan_file));
  } catch (const emit::PlanError &e) {
    throw Failure{kPlanInvalid, fmt::format("{}: {}", plan_file, e.what())};
  }
  std::map<std::string, emit::PlacementPlan> by_name;
  bool valid = true;
  for (auto &p : plans) {
    if (by_name.count(p.function_name)) {
      fmt::print(stderr, "duplicate plan for function '{}'\n", p.function_name);
      valid = false;
    }
    by_name[p.function_name] = p;
  }
  for (const auto &[name, p] : by_name) {
    bool known = false;
    for (const auto &fn : loaded.functions) known = known || fn.cfg.fn.name == name;
    if (!known) {
      fmt::print(stderr, "plan names unknown function '{}'\n", name);
      valid = false;
    }
  }
  for (const auto &fn : loaded.functions) {
    emit::PlacementPlan plan;
    plan.function_name = fn.cfg.fn.name;
    plan.arch_name = profile.name;
    if (auto it = by_name.find(fn.cfg.fn.name); it != by_name.end()) plan = it->second;
    if (plan.arch_name != profile.name)
      fmt::print(stderr, "warning: plan for '{}' was made for {}\n", plan.function_name, plan.arch_name);
    auto verdict = verify::check_plan(fn.cfg, fn.edges, fn.boundaries, profile, plan);
    for (const auto &e : verdict.errors) fmt::print("{}: ERROR {}\n", fn.cfg.fn.name, e);
    for (const auto &v : verdict.violations) fmt::print("{}: {}\n", fn.cfg.fn.name, v);
    if (verdict.valid) fmt::print("{}: valid\n", fn.cfg.fn.name);
    valid = valid && verdict.valid;
  }
  return valid ? kOk : kPlanInvalid;
}

std::string binding_text(const std::optional<std::string> &b) { return b ? *b : "-"; }

std::string path_text(const NormalizedCFG &cfg, const graph::Path &p) {
  std::string s = "[";
  for (std::size_t i = 0; i < p.blocks.size(); ++i) s += (i ? "," : "") + cfg.block_name(p.blocks[i]);
  return s + "]";
}

int run_explain(const Common &c, bool dump_problem) {
  auto loaded = c.load();
  auto profile = c.profile();
  auto costs = c.costs(profile);
  auto opt = c.options();
  std::string out;
  for (const auto &fn : loaded.functions) {
    const auto &cfg = fn.cfg;
    const auto &acts = cfg.fn.actions;
    out += fmt::format("function {} on {}\n", cfg.fn.name, profile.name);
    out += "constraints:\n";
    out += fmt::format("  {:<4} {:<12} {:<12} {:<8} {}\n", "kind", "source", "dest", "binding", "origin");
    for (const auto &e : fn.edges) {
      std::string origin = "declared";
      if (e.derived) origin = fmt::format("derived ({} links)", e.chain.size());
      out += fmt::format("  {:<4} {:<12} {:<12} {:<8} {}\n", ir::to_string(e.kind), acts[e.source].name,
                         acts[e.dest].name, binding_text(e.binding), origin);
    }
    for (const auto &b : fn.boundaries) {
      bool pre = b.side == constraints::Side::Pre;
      out += fmt::format("  {:<4} {:<12} {:<12} {:<8} declared\n", ir::to_string(b.kind),
                         pre ? "pre" : acts[b.action].name, pre ? acts[b.action].name : "post", "-");
    }
    if (std::any_of(fn.edges.begin(), fn.edges.end(), [](const auto &e) { return e.derived; }))
      out += "  note: derived edges take the stronger kind of their chain\n";

    auto weights = graph::edge_weights(cfg, costs.loop_factor);
    auto depths = graph::loop_depths(cfg);
    out += "cfg edges:\n";
    for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e)
      out += fmt::format("  {} -> {}{} depth={} w={}\n", cfg.block_name(cfg.edges[e].src),
                         cfg.block_name(cfg.edges[e].dst), cfg.edges[e].pseudo ? " (pseudo)" : "", depths[e],
                         weights[e]);

    std::set<ActionId> sources;
    for (const auto &e : fn.edges)
      if (e.kind == ir::EdgeKind::Xo && ir::defines_value(acts[e.source].kind)) sources.insert(e.source);
    out += "can_ctrl:\n";
    for (ActionId s : sources) {
      for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e) {
        bool existing = deps::can_ctrl(cfg, s, e, false);
        bool synth = deps::can_ctrl(cfg, s, e, true);
        if (!existing && !synth) continue;
        out += fmt::format("  {} on {} -> {}: {}\n", acts[s].name, cfg.block_name(cfg.edges[e].src),
                           cfg.block_name(cfg.edges[e].dst), existing ? "existing" : "synth only");
      }
    }
    out += "can_data:\n";
    for (const auto &ce : fn.edges) {
      if (ce.kind != ir::EdgeKind::Xo || !ir::defines_value(acts[ce.source].kind)) continue;
      std::optional<BlockId> b;
      if (ce.binding) b = cfg.bind_block.at(*ce.binding);
      for (const auto &p :
           graph::simple_paths(cfg, cfg.action_block[ce.source], cfg.action_block[ce.dest], b, opt.max_paths)) {
        auto fact = deps::data_fact(cfg, b, ce.source, ce.dest, p);
        std::string sig;
        for (ValueId v : fact.signature) sig += (sig.empty() ? "" : ",") + cfg.fn.values[v].name;
        out += fmt::format("  {} -> {} via {}: {}{}\n", acts[ce.source].name, acts[ce.dest].name,
                           path_text(cfg, p), fact.can ? "yes" : "no",
                           fact.can ? fmt::format(" (chain {{{}}})", sig) : "");
      }
    }
    if (!sources.empty())
      out += "  note: a dependency cut also needs the source ordered with its own later executions;"
             " that ordering may itself rest on dependencies\n";
    if (dump_problem) {
      auto problem = pipeline::build_problem(fn, profile, costs, opt);
      out += "problem:\n" + encode::dump(cfg, problem);
    }
    out += "\n";
  }
  std::cout << out;
  return kOk;
}

int run_oracle(const Common &c, std::size_t max_vars) {
  auto loaded = c.load();
  auto profile = c.profile();
  auto costs = c.costs(profile);
  bool ok = true;
  for (const auto &fn : loaded.functions) {
    auto compiled = pipeline::compile(fn, profile, costs, c.options());
    const auto &name = fn.cfg.fn.name;
    auto verdict = verify::check_plan(fn.cfg, fn.edges, fn.boundaries, profile, compiled.plan);
    auto greedy = verify::greedy(fn.cfg, fn.edges, fn.boundaries, profile, costs);
    auto gverdict = verify::check_plan(fn.cfg, fn.edges, fn.boundaries, profile, greedy);
    std::string brute = "skipped";
    bool match = true;
    try {
      long b = verify::brute_min(compiled.problem, max_vars);
      brute = std::to_string(b);
      match = b == compiled.plan.total_cost;
    } catch (const verify::CapExceeded &) {
      brute = fmt::format("skipped ({} vars)", compiled.problem.vars.size());
    }
    bool line_ok = match && verdict.valid && gverdict.valid && greedy.total_cost >= compiled.plan.total_cost;
    fmt::print("{}: solver={} brute={} greedy={} plan={} greedy_plan={} {}\n", name, compiled.plan.total_cost, brute,
               greedy.total_cost, verdict.valid ? "valid" : "INVALID", gverdict.valid ? "valid" : "INVALID",
               line_ok ? "ok" : "MISMATCH");
    for (const auto &v : verdict.violations) fmt::print("  {}\n", v);
    for (const auto &v : gverdict.violations) fmt::print("  greedy {}\n", v);
    ok = ok && line_ok;
  }
  return ok ? kOk : kPlanInvalid;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Minimal-cost barrier and dependency placement for RMC constraint edges"};
  app.require_subcommand(1);

  Common compile_opts, check_opts, explain_opts, oracle_opts;
  std::string format = "json", out, plan_file;
  std::optional<long> budget_ms;
  bool dump_problem = false;
  std::size_t max_vars = verify::kDefaultBruteCap;

  auto *compile = app.add_subcommand("compile", "Compute a placement plan");
  compile_opts.add_to(*compile, true);
  compile->add_option("--budget-ms", budget_ms, "Solver time budget")->check(CLI::PositiveNumber);
  compile->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "annotated"}));
  compile->add_option("--out", out, "Write the result here instead of stdout");
  compile->add_option("input", compile_opts.input, "IR file")->required();

  auto *check = app.add_subcommand("check", "Validate a plan against a program");
  check_opts.add_to(*check, false);
  check->add_option("input", check_opts.input, "IR file")->required();
  check->add_option("plan", plan_file, "Plan file")->required();

  auto *explain = app.add_subcommand("explain", "Show constraints, weights and dependency facts");
  explain_opts.add_to(*explain, true);
  explain->add_flag("--dump-problem", dump_problem, "Print the encoded problem");
  explain->add_option("input", explain_opts.input, "IR file")->required();

  auto *oracle = app.add_subcommand("oracle", "Compare the solver with brute force and greedy");
  oracle_opts.add_to(*oracle, true);
  oracle->add_option("--max-vars", max_vars, "Largest problem to brute-force")->check(CLI::PositiveNumber);
  oracle->add_option("input", oracle_opts.input, "IR file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*compile) return run_compile(compile_opts, format, out, budget_ms);
    if (*check) return run_check(check_opts, plan_file);
    if (*explain) return run_explain(explain_opts, dump_problem);
    if (*oracle) return run_oracle(oracle_opts, max_vars);
  } catch (const Failure &f) {
    fmt::print(stderr, "error: {}\n", f.message);
    return f.code;
  } catch (const graph::PathExplosion &e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kPathExplosion;
  }
  return kOk;
}
