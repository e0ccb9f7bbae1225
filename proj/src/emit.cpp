#include "rmcfence/emit.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

namespace rmcfence::emit {

using encode::VarType;
using nlohmann::json;

std::string realization(const NormalizedCFG &cfg, EdgeId e) {
  return cfg.out_edges[cfg.edges[e].src].size() == 1 ? "src-end" : "dst-begin";
}

PlacementPlan to_plan(const solver::Assignment &a, const encode::Problem &p, const NormalizedCFG &cfg,
                      const std::string &arch_name) {
  PlacementPlan plan;
  plan.function_name = cfg.fn.name;
  plan.arch_name = arch_name;
  plan.total_cost = a.cost;
  plan.solver_status = solver::to_string(a.status);
  plan.solver_nodes = a.stats.nodes;
  plan.solver_decisions = a.stats.decisions;
  const auto &acts = cfg.fn.actions;
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    if (!a.values[i]) continue;
    const auto &v = p.vars[i];
    switch (v.type) {
      case VarType::Barrier: {
        const auto &e = cfg.edges[v.edge];
        plan.barriers.push_back({cfg.block_name(e.src), cfg.block_name(e.dst), v.kind, realization(cfg, v.edge)});
        break;
      }
      case VarType::UseCtrl: {
        const auto &e = cfg.edges[v.edge];
        plan.ctrl_uses.push_back({acts[v.source].name, cfg.block_name(e.src), cfg.block_name(e.dst), v.kind});
        break;
      }
      case VarType::UseData: {
        DataUse d{acts[v.source].name, acts[v.dest].name, v.binding, {}};
        for (BlockId b : v.path) d.path.push_back(cfg.block_name(b));
        plan.data_uses.push_back(std::move(d));
        break;
      }
      case VarType::Acquire:
      case VarType::Release: plan.action_modes.push_back({acts[v.action].name, v.kind}); break;
    }
  }
  return plan;
}

namespace {

json to_json(const PlacementPlan &p) {
  json j;
  j["function_name"] = p.function_name;
  j["arch_name"] = p.arch_name;
  j["total_cost"] = p.total_cost;
  j["barriers"] = json::array();
  for (const auto &b : p.barriers)
    j["barriers"].push_back({{"source_block", b.source_block},
                             {"dest_block", b.dest_block},
                             {"kind", b.kind},
                             {"realization", b.realization}});
  j["ctrl_uses"] = json::array();
  for (const auto &c : p.ctrl_uses)
    j["ctrl_uses"].push_back(
        {{"source", c.source}, {"source_block", c.source_block}, {"dest_block", c.dest_block}, {"mode", c.mode}});
  j["data_uses"] = json::array();
  for (const auto &d : p.data_uses) {
    json e{{"source", d.source}, {"dest", d.dest}, {"path", d.path}};
    e["binding"] = d.binding ? json(*d.binding) : json(nullptr);
    j["data_uses"].push_back(std::move(e));
  }
  j["action_modes"] = json::array();
  for (const auto &m : p.action_modes) j["action_modes"].push_back({{"action", m.action}, {"mode", m.mode}});
  j["solver_status"] = p.solver_status;
  j["solver_stats"] = {{"nodes", p.solver_nodes}, {"decisions", p.solver_decisions}};
  return j;
}

template <class T>
T field(const json &j, const char *name) {
  if (!j.is_object() || !j.contains(name)) throw PlanError(fmt::format("plan: missing field '{}'", name));
  try {
    return j.at(name).get<T>();
  } catch (const json::exception &) {
    throw PlanError(fmt::format("plan: field '{}' has the wrong type", name));
  }
}

const json &array_field(const json &j, const char *name) {
  if (!j.contains(name)) {
    static const json empty = json::array();
    return empty;
  }
  if (!j.at(name).is_array()) throw PlanError(fmt::format("plan: field '{}' must be an array", name));
  return j.at(name);
}

PlacementPlan from_json(const json &j) {
  if (!j.is_object()) throw PlanError("plan: expected an object");
  PlacementPlan p;
  p.function_name = field<std::string>(j, "function_name");
  p.arch_name = j.contains("arch_name") ? field<std::string>(j, "arch_name") : "";
  p.total_cost = j.contains("total_cost") ? field<long>(j, "total_cost") : 0;
  for (const auto &b : array_field(j, "barriers")) {
    p.barriers.push_back({field<std::string>(b, "source_block"), field<std::string>(b, "dest_block"),
                          field<std::string>(b, "kind"),
                          b.contains("realization") ? field<std::string>(b, "realization") : ""});
  }
  for (const auto &c : array_field(j, "ctrl_uses")) {
    p.ctrl_uses.push_back({field<std::string>(c, "source"), field<std::string>(c, "source_block"),
                           field<std::string>(c, "dest_block"),
                           c.contains("mode") ? field<std::string>(c, "mode") : "existing"});
  }
  for (const auto &d : array_field(j, "data_uses")) {
    DataUse u{field<std::string>(d, "source"), field<std::string>(d, "dest"), std::nullopt,
              field<std::vector<std::string>>(d, "path")};
    if (d.contains("binding") && !d.at("binding").is_null()) u.binding = field<std::string>(d, "binding");
    p.data_uses.push_back(std::move(u));
  }
  for (const auto &m : array_field(j, "action_modes"))
    p.action_modes.push_back({field<std::string>(m, "action"), field<std::string>(m, "mode")});
  if (j.contains("solver_status")) p.solver_status = field<std::string>(j, "solver_status");
  if (j.contains("solver_stats")) {
    const auto &s = j.at("solver_stats");
    if (s.contains("nodes")) p.solver_nodes = field<long>(s, "nodes");
    if (s.contains("decisions")) p.solver_decisions = field<long>(s, "decisions");
  }
  return p;
}

}  // namespace

std::string serialize(const std::vector<PlacementPlan> &plans) {
  json j = json::array();
  for (const auto &p : plans) j.push_back(to_json(p));
  return j.dump(2) + "\n";
}

std::vector<PlacementPlan> parse_plans(const std::string &text) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return {};
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw PlanError(fmt::format("plan: {}", e.what()));
  }
  std::vector<PlacementPlan> out;
  if (j.is_array()) {
    for (const auto &e : j) out.push_back(from_json(e));
  } else {
    out.push_back(from_json(j));
  }
  return out;
}

std::string annotate(const ir::FunctionIR &original, const NormalizedCFG &cfg, const PlacementPlan &plan) {
  ir::Annotations notes;
  auto orig_name = [&](BlockId b) { return original.blocks[cfg.origin[b].orig_block].name; };
  // Where a comment for normalized block b goes, at its start or its end.
  auto at = [&](BlockId b, bool end, std::string text) {
    const auto &o = cfg.origin[b];
    if (o.edge_block) {
      BlockId src = o.edge_src;
      BlockId orig_src = cfg.origin[src].orig_block;
      text += fmt::format(" on edge {} -> {}", orig_name(src), orig_name(o.edge_dst));
      notes[{orig_src, static_cast<int>(original.blocks[orig_src].instrs.size())}].push_back(std::move(text));
      return;
    }
    notes[{o.orig_block, end ? o.last : o.first}].push_back(std::move(text));
  };
  auto place_on_edge = [&](const std::string &src, const std::string &dst, const std::string &text) {
    BlockId s = cfg.fn.find_block(src), d = cfg.fn.find_block(dst);
    if (s == ir::kNone || d == ir::kNone) return;
    EdgeId e = cfg.find_edge(s, d);
    if (e == ir::kNone) return;
    if (realization(cfg, e) == "src-end") at(s, true, text);
    else at(d, false, text);
  };
  for (const auto &b : plan.barriers) place_on_edge(b.source_block, b.dest_block, "BARRIER " + b.kind);
  for (const auto &c : plan.ctrl_uses)
    place_on_edge(c.source_block, c.dest_block, fmt::format("USE-CTRL {} ({})", c.source, c.mode));
  auto at_action = [&](const std::string &name, std::string text) {
    ActionId a = cfg.fn.find_action(name);
    if (a == ir::kNone) return;
    at(cfg.action_block[a], false, std::move(text));
  };
  for (const auto &d : plan.data_uses) at_action(d.dest, fmt::format("USE-DATA {}->{}", d.source, d.dest));
  for (const auto &m : plan.action_modes) {
    std::string up = m.mode == "acquire" ? "ACQUIRE" : "RELEASE";
    at_action(m.action, fmt::format("{} {}", up, m.action));
  }
  return ir::print(original, notes);
}

}  // namespace rmcfence::emit
