#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "rmcfence/encode.hpp"

namespace rmcfence::solver {

enum class Status { Optimal, BudgetExceeded };
const char *to_string(Status s);

struct Stats {
  long nodes = 0;
  long decisions = 0;
};

struct Assignment {
  std::vector<bool> values;  // indexed like Problem::vars
  long cost = 0;
  Status status = Status::Optimal;
  Stats stats;
};

/// Minimum-cost satisfying assignment; among those of minimal cost, the
/// lexicographically smallest in variable order (false < true). On budget
/// exhaustion returns the best assignment found, flagged BudgetExceeded.
Assignment solve_min(const encode::Problem &p, std::optional<std::chrono::milliseconds> budget = std::nullopt);

}  // namespace rmcfence::solver
