#include "rmcfence/arch.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <fmt/format.h>

namespace rmcfence::arch {

const char *to_string(Mode m) { return m == Mode::Acquire ? "acquire" : "release"; }

bool ArchProfile::has_mode(Mode m) const { return std::find(modes.begin(), modes.end(), m) != modes.end(); }

const BarrierKind *ArchProfile::find_kind(const std::string &id) const {
  for (const auto &k : kinds)
    if (k.id == id) return &k;
  return nullptr;
}

namespace {

BarrierKind full(const std::string &id) { return {id, true, true, true, true}; }

const std::map<std::string, long> kDefaultKindCosts = {
    {"mfence", 40}, {"sync", 80}, {"lwsync", 45}, {"dmb", 65}, {"dmb_ldst", 50}, {"dmb_ld", 35},
};

std::string trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> profile_names() { return {"x86", "armv7", "armv8", "power"}; }

ArchProfile builtin_profile(const std::string &name) {
  ArchProfile p;
  p.name = name;
  if (name == "x86") {
    p.kinds = {full("mfence")};
    p.vis_exec_free = true;
  } else if (name == "power") {
    p.kinds = {full("sync"), {"lwsync", false, true, true, true}};
  } else if (name == "armv7") {
    p.kinds = {full("dmb")};
  } else if (name == "armv8") {
    p.kinds = {full("dmb"), {"dmb_ldst", false, true, true, true}, {"dmb_ld", false, false, false, true}};
    p.modes = {Mode::Acquire, Mode::Release};
  } else {
    throw ConfigError(fmt::format("unknown architecture '{}'", name));
  }
  return p;
}

LoadedCosts load_costs(const ArchProfile &profile, const std::optional<std::string> &config) {
  LoadedCosts out;
  CostTable &t = out.table;
  for (const auto &k : profile.kinds) t.kind[k.id] = kDefaultKindCosts.at(k.id);
  if (config) {
    std::istringstream in(*config);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError(fmt::format("costs:{}: expected 'key = integer'", lineno));
      std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
      long v = 0;
      auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || ptr != val.data() + val.size())
        throw ConfigError(fmt::format("costs:{}: '{}' is not an integer", lineno, val));
      if (v <= 0) throw ConfigError(fmt::format("costs:{}: '{}' must be positive", lineno, key));
      if (key == "loop_factor") t.loop_factor = static_cast<int>(v);
      else if (key == "acquire") t.acquire = v;
      else if (key == "release") t.release = v;
      else if (key == "data_existing") t.data_existing = v;
      else if (key == "ctrl_existing") t.ctrl_existing = v;
      else if (key == "ctrl_synth") t.ctrl_synth = v;
      else if (kDefaultKindCosts.count(key)) {
        // Kinds of other profiles are accepted so one file can serve all.
        if (profile.find_kind(key)) t.kind[key] = v;
      } else {
        throw ConfigError(fmt::format("costs:{}: unknown key '{}'", lineno, key));
      }
    }
  }

  // Hierarchy: push-capable >= vis-capable >= exec-capable >= dependencies.
  auto tier = [](const BarrierKind &k) { return k.cuts_push ? 3 : k.cuts_vis ? 2 : 1; };
  long dep_max = std::max({t.data_existing, t.ctrl_existing});
  for (const auto &a : profile.kinds) {
    for (const auto &b : profile.kinds) {
      if (tier(a) > tier(b) && t.kind[a.id] < t.kind[b.id])
        out.warnings.push_back(fmt::format("cost of {} ({}) is below {} ({})", a.id, t.kind[a.id], b.id, t.kind[b.id]));
    }
    if (t.kind[a.id] < dep_max)
      out.warnings.push_back(fmt::format("cost of {} ({}) is below a dependency cost ({})", a.id, t.kind[a.id], dep_max));
  }
  return out;
}

}  // namespace rmcfence::arch
