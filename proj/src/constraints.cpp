#include "rmcfence/constraints.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace rmcfence::constraints {

std::vector<bool> noop_mask(const ir::FunctionIR &f) {
  std::vector<bool> out(f.actions.size());
  for (std::size_t a = 0; a < f.actions.size(); ++a) out[a] = f.actions[a].kind == ir::ActionKind::Noop;
  return out;
}

Resolved resolve(const ir::FunctionIR &f) {
  Resolved out;
  for (int i = 0; i < static_cast<int>(f.decls.size()); ++i) {
    const auto &d = f.decls[i];
    bool pre = d.source == "pre", post = d.dest == "post";
    if (pre || post) {
      if (d.kind == EdgeKind::Pu) {
        out.diagnostics.push_back({d.pos, "push edges cannot use pre or post"});
        continue;
      }
      for (ActionId a : f.actions_with_tag(pre ? d.dest : d.source))
        out.boundaries.push_back({d.kind, pre ? Side::Pre : Side::Post, a, i});
      continue;
    }
    for (ActionId s : f.actions_with_tag(d.source)) {
      for (ActionId t : f.actions_with_tag(d.dest)) {
        ConstraintEdge e;
        e.kind = d.kind;
        e.source = s;
        e.dest = t;
        e.binding = d.binding;
        e.decl_index = i;
        out.edges.push_back(std::move(e));
      }
    }
  }
  return out;
}

std::vector<ConstraintEdge> close(const std::vector<ConstraintEdge> &edges, const std::vector<bool> &is_noop) {
  std::vector<ConstraintEdge> out;
  for (const auto &e : edges)
    if (!is_noop[e.source] && !is_noop[e.dest]) out.push_back(e);

  using Key = std::tuple<ActionId, ActionId, std::optional<std::string>>;
  std::map<Key, ConstraintEdge> derived;

  // From every non-noop source, walk edges through noops only. Each state is
  // (current noop, kind so far); the chain reaching it first is kept.
  for (int start = 0; start < static_cast<int>(edges.size()); ++start) {
    const auto &first = edges[start];
    if (is_noop[first.source] || !is_noop[first.dest]) continue;
    struct State {
      ActionId at;
      EdgeKind kind;
      std::vector<int> chain;
    };
    std::set<std::pair<ActionId, int>> seen;
    std::vector<State> work{{first.dest, first.kind, {start}}};
    std::size_t head = 0;
    while (head < work.size()) {
      State st = work[head++];
      if (!seen.insert({st.at, static_cast<int>(st.kind)}).second) continue;
      for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
        const auto &e = edges[i];
        if (e.source != st.at || e.binding != first.binding) continue;
        EdgeKind k = ir::stronger(st.kind, e.kind);
        auto chain = st.chain;
        chain.push_back(i);
        if (is_noop[e.dest]) {
          work.push_back({e.dest, k, std::move(chain)});
          continue;
        }
        ConstraintEdge d;
        d.kind = k;
        d.source = first.source;
        d.dest = e.dest;
        d.binding = first.binding;
        d.derived = true;
        for (int c : chain) d.decl_index = std::max(d.decl_index, edges[c].decl_index);
        d.chain = std::move(chain);
        Key key{d.source, d.dest, d.binding};
        auto it = derived.find(key);
        if (it == derived.end() || static_cast<int>(it->second.kind) < static_cast<int>(k)) derived[key] = std::move(d);
      }
    }
  }

  std::vector<ConstraintEdge> extra;
  for (auto &[key, d] : derived) {
    bool implied = std::any_of(out.begin(), out.end(), [&](const ConstraintEdge &e) {
      return e.source == d.source && e.dest == d.dest && e.binding == d.binding &&
             static_cast<int>(e.kind) >= static_cast<int>(d.kind);
    });
    if (!implied) extra.push_back(std::move(d));
  }
  std::stable_sort(extra.begin(), extra.end(), [](const ConstraintEdge &a, const ConstraintEdge &b) {
    return a.decl_index < b.decl_index;
  });
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace rmcfence::constraints
