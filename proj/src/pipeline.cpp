#include "rmcfence/pipeline.hpp"

namespace rmcfence::pipeline {

Prepared prepare(const ir::FunctionIR &f, std::vector<ir::Diagnostic> &diags) {
  Prepared p;
  p.original = f;
  p.cfg = normalize(f);
  auto r = constraints::resolve(p.cfg.fn);
  diags.insert(diags.end(), r.diagnostics.begin(), r.diagnostics.end());
  p.edges = constraints::close(r.edges, constraints::noop_mask(p.cfg.fn));
  p.boundaries = std::move(r.boundaries);
  return p;
}

Loaded load(const std::string &text) {
  Loaded out;
  auto parsed = ir::parse(text);
  if (!parsed.ok()) {
    out.diagnostics = parsed.diagnostics;
    return out;
  }
  for (const auto &f : parsed.functions) {
    auto diags = ir::validate(f);
    if (!diags.empty()) {
      out.diagnostics.insert(out.diagnostics.end(), diags.begin(), diags.end());
      continue;
    }
    out.functions.push_back(prepare(f, out.diagnostics));
  }
  if (!out.diagnostics.empty()) out.functions.clear();
  return out;
}

encode::Problem build_problem(const Prepared &p, const arch::ArchProfile &profile, const arch::CostTable &costs,
                              const encode::Options &opt) {
  encode::Input in{p.cfg, p.edges, p.boundaries, profile, costs};
  return encode::build(in, opt);
}

Compiled compile(const Prepared &p, const arch::ArchProfile &profile, const arch::CostTable &costs,
                 const encode::Options &opt, std::optional<std::chrono::milliseconds> budget) {
  Compiled c;
  c.problem = build_problem(p, profile, costs, opt);
  c.assignment = solver::solve_min(c.problem, budget);
  c.plan = emit::to_plan(c.assignment, c.problem, p.cfg, profile.name);
  return c;
}

}  // namespace rmcfence::pipeline
