#include "rmcfence/graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

namespace rmcfence::graph {

using ir::kNone;

PathExplosion::PathExplosion(BlockId from, BlockId to, std::size_t cap)
    : std::runtime_error(fmt::format("more than {} simple paths between blocks {} and {}", cap, from, to)),
      from(from),
      to(to),
      cap(cap) {}

bool has_pseudo_edge(const NormalizedCFG &cfg, const Path &p) {
  return std::any_of(p.edges.begin(), p.edges.end(), [&](EdgeId e) { return cfg.edges[e].pseudo; });
}

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b, std::uint64_t cap) { return std::min(cap, a + b); }

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b, std::uint64_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(cap, a * b);
}

// Tarjan over the subgraph induced by `nodes`, ignoring edges in `cut`.
std::vector<std::vector<BlockId>> sccs(const NormalizedCFG &cfg, const std::vector<BlockId> &nodes,
                                       const std::vector<bool> &cut) {
  const int n = cfg.num_blocks();
  std::vector<bool> in(n, false);
  for (BlockId b : nodes) in[b] = true;
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<BlockId> stack;
  std::vector<std::vector<BlockId>> out;
  int counter = 0;
  std::function<void(BlockId)> visit = [&](BlockId v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (EdgeId e : cfg.out_edges[v]) {
      const auto &edge = cfg.edges[e];
      if (edge.pseudo || cut[e] || !in[edge.dst]) continue;
      BlockId w = edge.dst;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<BlockId> comp;
      BlockId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (BlockId b : nodes)
    if (index[b] < 0) visit(b);
  return out;
}

void scc_depths(const NormalizedCFG &cfg, const std::vector<BlockId> &nodes, std::vector<bool> &cut,
                std::vector<int> &depth) {
  for (const auto &comp : sccs(cfg, nodes, cut)) {
    std::set<BlockId> members(comp.begin(), comp.end());
    bool nontrivial = comp.size() > 1;
    if (!nontrivial) {
      for (EdgeId e : cfg.out_edges[comp[0]])
        if (!cfg.edges[e].pseudo && !cut[e] && cfg.edges[e].dst == comp[0]) nontrivial = true;
    }
    if (!nontrivial) continue;
    std::vector<EdgeId> inner;
    for (BlockId b : comp)
      for (EdgeId e : cfg.out_edges[b])
        if (!cfg.edges[e].pseudo && !cut[e] && members.count(cfg.edges[e].dst)) inner.push_back(e);
    for (EdgeId e : inner) ++depth[e];
    // Entries: members with a real predecessor outside the component.
    std::set<BlockId> entries;
    for (BlockId b : comp)
      for (EdgeId e : cfg.in_edges[b])
        if (!cfg.edges[e].pseudo && !members.count(cfg.edges[e].src)) entries.insert(b);
    if (entries.empty()) entries.insert(comp.front());
    for (EdgeId e : inner)
      if (entries.count(cfg.edges[e].dst)) cut[e] = true;
    scc_depths(cfg, comp, cut, depth);
  }
}

std::vector<bool> dominator_back_edges(const NormalizedCFG &cfg) {
  std::vector<bool> back(cfg.edges.size(), false);
  for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e) {
    const auto &edge = cfg.edges[e];
    if (!edge.pseudo && cfg.dominates(edge.dst, edge.src)) back[e] = true;
  }
  return back;
}

// Topological order of the real-edge graph minus `removed`; empty if cyclic.
std::vector<BlockId> topo_order(const NormalizedCFG &cfg, const std::vector<bool> &removed) {
  const int n = cfg.num_blocks();
  std::vector<int> indeg(n, 0);
  for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e)
    if (!cfg.edges[e].pseudo && !removed[e]) ++indeg[cfg.edges[e].dst];
  std::vector<BlockId> ready, order;
  for (BlockId b = n - 1; b >= 0; --b)
    if (indeg[b] == 0) ready.push_back(b);
  while (!ready.empty()) {
    BlockId b = ready.back();
    ready.pop_back();
    order.push_back(b);
    for (EdgeId e : cfg.out_edges[b]) {
      if (cfg.edges[e].pseudo || removed[e]) continue;
      if (--indeg[cfg.edges[e].dst] == 0) ready.push_back(cfg.edges[e].dst);
    }
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

}  // namespace

bool is_reducible(const NormalizedCFG &cfg) {
  return !topo_order(cfg, dominator_back_edges(cfg)).empty() || cfg.num_blocks() == 0;
}

std::vector<bool> retreating_edges(const NormalizedCFG &cfg) {
  const int n = cfg.num_blocks();
  std::vector<bool> out(cfg.edges.size(), false);
  if (n == 0) return out;
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::function<void(BlockId)> dfs = [&](BlockId v) {
    state[v] = 1;
    for (EdgeId e : cfg.out_edges[v]) {
      if (cfg.edges[e].pseudo) continue;
      BlockId w = cfg.edges[e].dst;
      if (state[w] == 1) out[e] = true;
      else if (state[w] == 0) dfs(w);
    }
    state[v] = 2;
  };
  dfs(cfg.fn.entry);
  return out;
}

std::vector<int> loop_depths(const NormalizedCFG &cfg) {
  const int n = cfg.num_blocks();
  std::vector<int> depth(cfg.edges.size(), 0);
  auto back = dominator_back_edges(cfg);
  if (topo_order(cfg, back).empty() && n > 0) {
    std::vector<BlockId> all(n);
    for (BlockId b = 0; b < n; ++b) all[b] = b;
    std::vector<bool> cut(cfg.edges.size(), false);
    scc_depths(cfg, all, cut, depth);
    return depth;
  }
  // Natural loops, merged per header.
  std::map<BlockId, std::vector<bool>> body;
  for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e) {
    if (!back[e]) continue;
    BlockId h = cfg.edges[e].dst;
    auto &in = body.try_emplace(h, std::vector<bool>(n, false)).first->second;
    in[h] = true;
    std::vector<BlockId> work{cfg.edges[e].src};
    while (!work.empty()) {
      BlockId x = work.back();
      work.pop_back();
      if (in[x]) continue;
      in[x] = true;
      for (BlockId p : cfg.real_preds(x)) work.push_back(p);
    }
  }
  for (const auto &[h, in] : body)
    for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e)
      if (!cfg.edges[e].pseudo && in[cfg.edges[e].src] && in[cfg.edges[e].dst]) ++depth[e];
  return depth;
}

std::vector<std::uint64_t> path_counts(const NormalizedCFG &cfg) {
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max() / 2;
  const int n = cfg.num_blocks();
  std::vector<std::uint64_t> counts(cfg.edges.size(), 0);
  if (n == 0) return counts;
  auto removed = retreating_edges(cfg);
  auto order = topo_order(cfg, removed);
  std::vector<std::uint64_t> in(n, 0), out(n, 0);
  in[cfg.fn.entry] = 1;
  for (BlockId b : order)
    for (EdgeId e : cfg.out_edges[b])
      if (!cfg.edges[e].pseudo && !removed[e]) in[cfg.edges[e].dst] = sat_add(in[cfg.edges[e].dst], in[b], cap);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    BlockId b = *it;
    std::uint64_t total = cfg.fn.blocks[b].term.kind == ir::Terminator::Kind::Return ? 1 : 0;
    for (EdgeId e : cfg.out_edges[b]) {
      if (cfg.edges[e].pseudo) continue;
      total = sat_add(total, removed[e] ? 1 : out[cfg.edges[e].dst], cap);
    }
    out[b] = total;
  }
  for (EdgeId e = 0; e < static_cast<EdgeId>(cfg.edges.size()); ++e) {
    const auto &edge = cfg.edges[e];
    counts[e] = edge.pseudo || removed[e] ? in[edge.src] : sat_mul(in[edge.src], out[edge.dst], cap);
  }
  return counts;
}

std::vector<std::uint64_t> edge_weights(const NormalizedCFG &cfg, int loop_factor, std::uint64_t max_weight) {
  auto counts = path_counts(cfg);
  auto depth = loop_depths(cfg);
  std::vector<std::uint64_t> w(cfg.edges.size(), 1);
  const std::uint64_t factor = static_cast<std::uint64_t>(std::max(1, loop_factor));
  for (std::size_t e = 0; e < w.size(); ++e) {
    std::uint64_t v = std::max<std::uint64_t>(1, counts[e]);
    for (int d = 0; d < depth[e]; ++d) v = sat_mul(v, factor, max_weight);
    w[e] = std::clamp<std::uint64_t>(v, 1, std::max<std::uint64_t>(1, max_weight));
  }
  return w;
}

std::vector<Path> simple_paths(const NormalizedCFG &cfg, BlockId from, BlockId to, std::optional<BlockId> excluded,
                               std::size_t cap) {
  std::vector<Path> out;
  if (excluded && (*excluded == from || *excluded == to)) return out;
  const int n = cfg.num_blocks();
  std::vector<bool> visited(n, false);
  if (excluded) visited[*excluded] = true;
  Path cur;
  cur.blocks.push_back(from);
  visited[from] = true;
  std::function<void(BlockId)> dfs = [&](BlockId v) {
    // out_edges are sorted by destination, which gives lexicographic order.
    for (EdgeId e : cfg.out_edges[v]) {
      BlockId w = cfg.edges[e].dst;
      if (w == to) {
        if (excluded && *excluded == w) continue;
        cur.blocks.push_back(w);
        cur.edges.push_back(e);
        if (out.size() == cap) throw PathExplosion(from, to, cap);
        out.push_back(cur);
        cur.blocks.pop_back();
        cur.edges.pop_back();
        continue;
      }
      if (visited[w]) continue;
      visited[w] = true;
      cur.blocks.push_back(w);
      cur.edges.push_back(e);
      dfs(w);
      cur.blocks.pop_back();
      cur.edges.pop_back();
      visited[w] = false;
    }
  };
  dfs(from);
  return out;
}

}  // namespace rmcfence::graph
