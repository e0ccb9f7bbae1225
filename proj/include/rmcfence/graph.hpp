#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rmcfence/cfg.hpp"

namespace rmcfence::graph {

/// A simple path (or a simple cycle when front() == back()).
struct Path {
  std::vector<BlockId> blocks;
  std::vector<EdgeId> edges;

  BlockId head() const { return blocks.front(); }
  BlockId tail() const { return blocks.back(); }
  bool operator==(const Path &) const = default;
};

bool has_pseudo_edge(const NormalizedCFG &cfg, const Path &p);

class PathExplosion : public std::runtime_error {
 public:
  PathExplosion(BlockId from, BlockId to, std::size_t cap);
  BlockId from, to;
  std::size_t cap;
};

inline constexpr std::size_t kDefaultMaxPaths = 4096;
inline constexpr std::uint64_t kDefaultMaxWeight = std::uint64_t{1} << 20;
inline constexpr int kDefaultLoopFactor = 4;

/// Loop nesting depth per edge (indexed by EdgeId). Natural loops over real
/// edges; nested strongly connected components when the CFG is irreducible.
/// Pseudo edges are always depth 0.
std::vector<int> loop_depths(const NormalizedCFG &cfg);

/// Real edges that close a cycle in a depth-first walk from the entry
/// (exactly the dominator back edges on a reducible CFG).
std::vector<bool> retreating_edges(const NormalizedCFG &cfg);

bool is_reducible(const NormalizedCFG &cfg);

/// w(e) = pathcount(e) * loop_factor^depth(e), clamped to [1, max_weight].
std::vector<std::uint64_t> edge_weights(const NormalizedCFG &cfg, int loop_factor = kDefaultLoopFactor,
                                        std::uint64_t max_weight = kDefaultMaxWeight);

/// Entry-to-exit path counts through each edge in the CFG without retreating
/// and pseudo edges. Sources of removed edges count as exits.
std::vector<std::uint64_t> path_counts(const NormalizedCFG &cfg);

/// Simple paths from `from` to `to` (simple cycles when equal) over real and
/// pseudo edges, never visiting `excluded`, in lexicographic block order.
/// Throws PathExplosion past `cap` paths.
std::vector<Path> simple_paths(const NormalizedCFG &cfg, BlockId from, BlockId to,
                               std::optional<BlockId> excluded = std::nullopt,
                               std::size_t cap = kDefaultMaxPaths);

}  // namespace rmcfence::graph
