#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmcfence::arch {

struct BarrierKind {
  std::string id;
  bool cuts_push = false;
  bool cuts_vis = false;
  bool cuts_exec_any = false;
  bool cuts_exec_from_read = false;
};

enum class Mode { Acquire, Release };
const char *to_string(Mode m);

struct ArchProfile {
  std::string name;
  std::vector<BarrierKind> kinds;  // strongest first
  std::vector<Mode> modes;
  bool vis_exec_free = false;

  bool has_mode(Mode m) const;
  const BarrierKind *find_kind(const std::string &id) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// x86, power, armv7 or armv8. Throws ConfigError for anything else.
ArchProfile builtin_profile(const std::string &name);
std::vector<std::string> profile_names();

struct CostTable {
  std::map<std::string, long> kind;  // barrier kind id -> cost
  long acquire = 25;
  long release = 25;
  long data_existing = 1;
  long ctrl_existing = 2;
  long ctrl_synth = 8;
  int loop_factor = 4;

  long mode_cost(Mode m) const { return m == Mode::Acquire ? acquire : release; }
};

struct LoadedCosts {
  CostTable table;
  std::vector<std::string> warnings;
};

/// Defaults for the profile, overridden by `config` (contents of a
/// `key = integer` file) when given.
LoadedCosts load_costs(const ArchProfile &profile, const std::optional<std::string> &config = std::nullopt);

}  // namespace rmcfence::arch
