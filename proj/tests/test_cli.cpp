#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "support.hpp"

using support::corpus_file;
using support::run_cli;

namespace {

std::string temp_file(const std::string &name, const std::string &text) {
  auto path = std::filesystem::temp_directory_path() / ("rmcfence_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("cli exit codes") {
  SUBCASE("compile overlap") {
    auto r = run_cli("compile --arch armv7 " + corpus_file("overlap"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("\"dmb\"") != std::string::npos);
  }
  SUBCASE("check an empty plan on x86") {
    auto plan = temp_file("empty.json", "");
    auto r = run_cli("check --arch x86 " + corpus_file("mp") + " " + plan);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "mp_send: valid\nmp_recv: valid\n");
  }
  SUBCASE("check an empty plan on armv7 fails") {
    auto plan = temp_file("empty.json", "[]");
    auto r = run_cli("check --arch armv7 " + corpus_file("mp") + " " + plan);
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("UNCUT vo wdata->wflag via [") != std::string::npos);
  }
  SUBCASE("compiled plans check") {
    for (const auto &arch : support::kArchs) {
      auto compiled = run_cli("compile --arch " + arch + " " + corpus_file("ringbuf"));
      REQUIRE(compiled.exit_code == 0);
      auto plan = temp_file("ringbuf.json", compiled.out);
      CHECK(run_cli("check --arch " + arch + " " + corpus_file("ringbuf") + " " + plan).exit_code == 0);
    }
  }
  SUBCASE("malformed plan") {
    auto plan = temp_file("bad.json", "{\"function_name\": 3}");
    CHECK(run_cli("check --arch x86 " + corpus_file("mp") + " " + plan).exit_code == 4);
  }
  SUBCASE("path explosion") {
    CHECK(run_cli("compile --arch armv7 --max-paths 1 " + corpus_file("ringbuf")).exit_code == 2);
    CHECK(run_cli("compile --arch armv7 --max-paths 2 " + corpus_file("ringbuf")).exit_code == 0);
  }
  SUBCASE("invalid input") {
    auto bad = temp_file("bad.rmcir", "func f { block e: write @x %v\n ret }");
    CHECK(run_cli("compile --arch armv7 " + bad).exit_code == 1);
    CHECK(run_cli("compile --arch vax " + corpus_file("mp")).exit_code == 1);
    CHECK(run_cli("compile --arch armv7 /nonexistent.rmcir").exit_code == 1);
    auto costs = temp_file("bad.costs", "dmb = 0\n");
    CHECK(run_cli("compile --arch armv7 --costs " + costs + " " + corpus_file("mp")).exit_code == 1);
  }
  SUBCASE("cost file and environment") {
    auto costs = temp_file("dmb.costs", "dmb = 100\n");
    auto r = run_cli("compile --arch armv7 --costs " + costs + " " + corpus_file("overlap"));
    CHECK(r.out.find("\"total_cost\": 100") != std::string::npos);
    auto env = run_cli("compile --arch armv7 " + corpus_file("overlap"), "RMCFENCE_COSTS=" + costs);
    CHECK(env.out == r.out);
    auto other = temp_file("dmb90.costs", "dmb = 90\n");
    auto both = run_cli("compile --arch armv7 --costs " + other + " " + corpus_file("overlap"), "RMCFENCE_COSTS=" + costs);
    CHECK(both.out.find("\"total_cost\": 90") != std::string::npos);
  }
  SUBCASE("oracle and explain") {
    CHECK(run_cli("oracle --arch armv8 " + corpus_file("widget")).exit_code == 0);
    auto r = run_cli("explain --arch armv7 --dump-problem " + corpus_file("overlap"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("objective: 65*v0 + 65*v1 + 65*v2") != std::string::npos);
  }
  SUBCASE("annotated output to a file") {
    auto out = std::filesystem::temp_directory_path() / "rmcfence_test_out.rmcir";
    auto r = run_cli("compile --arch armv7 --format annotated --out " + out.string() + " " + corpus_file("overlap"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    CHECK(testutil::read_file(out.string()).find(";; BARRIER dmb") != std::string::npos);
  }
}
