#include "helpers.hpp"

#include "rmcfence/constraints.hpp"

using namespace rmcfence;
using namespace testutil;
using constraints::ConstraintEdge;
using ir::EdgeKind;

namespace {

ConstraintEdge edge(EdgeKind k, ActionId s, ActionId t, int decl = 0, std::optional<std::string> b = {}) {
  ConstraintEdge e;
  e.kind = k;
  e.source = s;
  e.dest = t;
  e.decl_index = decl;
  e.binding = std::move(b);
  return e;
}

}  // namespace

TEST_CASE("resolve: examples") {
  SUBCASE("single vo edge") {
    auto f = parse_one(R"(func send {
      edge vo wdata -> wflag;
      block e: write @data 1 label wdata
        write @flag 1 label wflag
        ret })");
    auto r = constraints::resolve(f);
    CHECK(r.diagnostics.empty());
    REQUIRE(r.edges.size() == 1);
    CHECK(r.edges[0].kind == EdgeKind::Vo);
    CHECK(r.boundaries.empty());
  }
  SUBCASE("tag labeling two reads") {
    auto f = parse_one(R"(func lookup {
      edge xo lookup -> r;
      block e:
        %w = read @slot label lookup
        %a = op field(%w, 8)
        %b = op field(%w, 16)
        %x = read *%a label r
        %y = read *%b label r
        ret })");
    auto r = constraints::resolve(f);
    CHECK(r.edges.size() == 2);
  }
  SUBCASE("post boundary") {
    auto f = parse_one(R"(func lock {
      edge xo trylock -> post;
      block e: %o = rmw @l xchg 1 label trylock
        ret })");
    auto r = constraints::resolve(f);
    CHECK(r.edges.empty());
    REQUIRE(r.boundaries.size() == 1);
    CHECK(r.boundaries[0].kind == EdgeKind::Xo);
    CHECK(r.boundaries[0].side == constraints::Side::Post);
    CHECK(r.boundaries[0].action == f.find_action("trylock"));
  }
  SUBCASE("push with pre is rejected") {
    auto f = parse_one(R"(func f {
      edge pu pre -> w;
      block e: write @x 1 label w
        ret })");
    auto r = constraints::resolve(f);
    CHECK(!r.diagnostics.empty());
  }
}

TEST_CASE("close: examples") {
  // actions: 0 = a, 1 = n (noop), 2 = b
  std::vector<bool> noop{false, true, false};
  SUBCASE("vo then xo through a noop") {
    auto out = constraints::close({edge(EdgeKind::Vo, 0, 1), edge(EdgeKind::Xo, 1, 2)}, noop);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == EdgeKind::Vo);
    CHECK(out[0].source == 0);
    CHECK(out[0].dest == 2);
    CHECK(out[0].derived);
    CHECK(out[0].chain == std::vector<int>{0, 1});
  }
  SUBCASE("single edge unchanged") {
    std::vector<ConstraintEdge> in{edge(EdgeKind::Vo, 0, 2)};
    CHECK(constraints::close(in, noop) == in);
  }
  SUBCASE("vo then pu") {
    auto out = constraints::close({edge(EdgeKind::Vo, 0, 1), edge(EdgeKind::Pu, 1, 2)}, noop);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == EdgeKind::Pu);
  }
  SUBCASE("mismatched bindings do not compose") {
    auto out = constraints::close({edge(EdgeKind::Vo, 0, 1, 0, "h"), edge(EdgeKind::Xo, 1, 2)}, noop);
    CHECK(out.empty());
    out = constraints::close({edge(EdgeKind::Vo, 0, 1, 0, "h"), edge(EdgeKind::Xo, 1, 2, 1, "h")}, noop);
    REQUIRE(out.size() == 1);
    CHECK(out[0].binding == std::optional<std::string>("h"));
  }
  SUBCASE("no chain through non-noop") {
    std::vector<bool> none{false, false, false};
    auto out = constraints::close({edge(EdgeKind::Vo, 0, 1), edge(EdgeKind::Xo, 1, 2)}, none);
    CHECK(out.size() == 2);
  }
}

TEST_CASE("close: properties on random edge sets") {
  std::mt19937 rng(3);
  for (int iter = 0; iter < 300; ++iter) {
    int n = std::uniform_int_distribution<int>(2, 6)(rng);
    std::vector<bool> noop(n);
    for (int i = 0; i < n; ++i) noop[i] = std::uniform_int_distribution<int>(0, 2)(rng) == 0;
    std::vector<ConstraintEdge> in;
    int m = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int i = 0; i < m; ++i) {
      auto k = static_cast<EdgeKind>(std::uniform_int_distribution<int>(0, 2)(rng));
      int s = std::uniform_int_distribution<int>(0, n - 1)(rng);
      int t = std::uniform_int_distribution<int>(0, n - 1)(rng);
      std::optional<std::string> b;
      if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) b = "h";
      in.push_back(edge(k, s, t, i, b));
    }
    auto out = constraints::close(in, noop);
    CHECK(constraints::close(out, noop) == out);
    for (const auto &e : out) {
      CHECK_FALSE(noop[e.source]);
      CHECK_FALSE(noop[e.dest]);
      if (!e.derived) continue;
      REQUIRE(e.chain.size() >= 2);
      EdgeKind k = EdgeKind::Xo;
      for (std::size_t i = 0; i < e.chain.size(); ++i) {
        const auto &c = in[e.chain[i]];
        k = ir::stronger(k, c.kind);
        CHECK(c.binding == e.binding);
        if (i > 0) CHECK(in[e.chain[i - 1]].dest == c.source);
        if (i > 0) CHECK(noop[c.source]);
      }
      CHECK(in[e.chain.front()].source == e.source);
      CHECK(in[e.chain.back()].dest == e.dest);
      CHECK(k == e.kind);
    }
    for (const auto &e : in) {
      if (noop[e.source] || noop[e.dest]) continue;
      CHECK(std::find(out.begin(), out.end(), e) != out.end());
    }
  }
}
