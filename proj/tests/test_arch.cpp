#include <doctest.h>

#include "rmcfence/arch.hpp"

using namespace rmcfence::arch;

TEST_CASE("builtin profiles") {
  CHECK(builtin_profile("x86").vis_exec_free);
  auto power = builtin_profile("power");
  const auto *lw = power.find_kind("lwsync");
  REQUIRE(lw);
  CHECK(lw->cuts_vis);
  CHECK_FALSE(lw->cuts_push);
  auto v8 = builtin_profile("armv8");
  const auto *ld = v8.find_kind("dmb_ld");
  REQUIRE(ld);
  CHECK(ld->cuts_exec_from_read);
  CHECK_FALSE(ld->cuts_exec_any);
  CHECK_FALSE(ld->cuts_vis);
  CHECK_FALSE(ld->cuts_push);
  CHECK(v8.has_mode(Mode::Acquire));
  CHECK(v8.has_mode(Mode::Release));
  CHECK_FALSE(builtin_profile("armv7").has_mode(Mode::Acquire));
  CHECK_THROWS_AS(builtin_profile("sparc"), ConfigError);
}

TEST_CASE("capability monotonicity and push realizability") {
  for (const auto &name : profile_names()) {
    auto p = builtin_profile(name);
    bool push = false;
    for (const auto &k : p.kinds) {
      if (k.cuts_push) CHECK(k.cuts_vis);
      if (k.cuts_vis) CHECK(k.cuts_exec_any);
      if (k.cuts_exec_any) CHECK(k.cuts_exec_from_read);
      push = push || k.cuts_push;
    }
    CHECK(push);
  }
}

TEST_CASE("cost defaults and overrides") {
  auto arm = builtin_profile("armv8");
  auto d = load_costs(arm).table;
  CHECK(d.kind.at("dmb") == 65);
  CHECK(d.kind.at("dmb_ldst") == 50);
  CHECK(d.kind.at("dmb_ld") == 35);
  CHECK(d.acquire == 25);
  CHECK(d.release == 25);
  CHECK(d.data_existing == 1);
  CHECK(d.ctrl_existing == 2);
  CHECK(d.ctrl_synth == 8);
  CHECK(d.loop_factor == 4);
  CHECK(load_costs(builtin_profile("x86")).table.kind.at("mfence") == 40);
  CHECK(load_costs(builtin_profile("power")).table.kind.at("sync") == 80);
  CHECK(load_costs(builtin_profile("power")).table.kind.at("lwsync") == 45);
  CHECK(load_costs(builtin_profile("armv7")).table.kind.at("dmb") == 65);
  for (const auto &name : profile_names()) CHECK(load_costs(builtin_profile(name)).warnings.empty());

  auto power = builtin_profile("power");
  auto o = load_costs(power, std::string("lwsync = 100\n"));
  CHECK(o.table.kind.at("lwsync") == 100);
  CHECK(o.table.kind.at("sync") == 80);
  CHECK(!o.warnings.empty());
  auto e = load_costs(power, std::string(""));
  CHECK(e.table.kind == load_costs(power).table.kind);
  auto c = load_costs(power, std::string("# comment\nloop_factor = 2  # trailing\n"));
  CHECK(c.table.loop_factor == 2);

  CHECK_THROWS_AS(load_costs(power, std::string("sync = 0\n")), ConfigError);
  CHECK_THROWS_AS(load_costs(power, std::string("sync = -3\n")), ConfigError);
  CHECK_THROWS_AS(load_costs(power, std::string("bogus = 3\n")), ConfigError);
  CHECK_THROWS_AS(load_costs(power, std::string("sync 3\n")), ConfigError);
  CHECK_THROWS_AS(load_costs(power, std::string("sync = x\n")), ConfigError);
}
