#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "msched/search.hpp"

namespace msched {

struct OracleBudget {
  std::size_t max_jobs = 4;
  std::size_t max_machines = 5;
  std::uint64_t max_combinations = 10'000'000;  // n! * prod_j |candidate sets of j|
};

struct OracleResult {
  Rational value;
  Schedule witness;
  std::uint64_t combinations = 0;  // size of the enumeration space
  std::uint64_t nodes = 0;         // search nodes actually visited
};

/// Machine sets worth trying for a job: positive effective speed and no
/// machine that can be dropped without changing the processing time.
std::vector<std::vector<std::size_t>> candidate_sets(const Instance& inst, std::size_t job);

/// Enumeration size for the instance; saturates at UINT64_MAX.
std::uint64_t oracle_combinations(const Instance& inst);

/// Optimal makespan by exhaustive search over machine sets and start orders
/// with left-shifted placement. Throws BudgetExceeded instead of answering
/// outside the budget.
OracleResult brute_force_makespan(const Instance& inst, const OracleBudget& budget = {});

/// Optimal sum of w_j C_j (unit weights when the instance has none).
OracleResult brute_force_weighted(const Instance& inst, const OracleBudget& budget = {});

struct ThresholdResult {
  Rational lower;  // the threshold lies in [lower, upper]
  Rational upper;  // LP(upper) is feasible
  bool exact = false;  // upper is reported as the threshold itself
  std::size_t probes = 0;
};

/// Smallest LP-feasible value. With candidates: the smallest feasible one,
/// reported exact when LP(c - 1e-9) is infeasible (or c is the lower bound,
/// below which the LP is always infeasible). Throws DomainError when no
/// candidate is feasible.
ThresholdResult min_feasible_C(const Instance& inst, std::vector<Rational> candidates,
                               const SpeedNorm& norm = SpeedNorm::additive(), const ProbeHook& hook = {});
/// Bracket of relative width eps around the threshold by bisection.
ThresholdResult min_feasible_C(const Instance& inst, const Rational& eps,
                               const SpeedNorm& norm = SpeedNorm::additive(), const ProbeHook& hook = {});

/// All fractions a/b in [lo, hi] with b <= max_den, ascending.
std::vector<Rational> farey_candidates(const Rational& lo, const Rational& hi, unsigned max_den);

}  // namespace msched
