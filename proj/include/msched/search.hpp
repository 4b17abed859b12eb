#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "msched/lp.hpp"
#include "msched/rounding.hpp"

namespace msched {

/// Called with every feasible LP solution a search produces.
using ProbeHook = std::function<void(const FractionalAssignment&)>;

struct SearchConfig {
  Rational eps{1, 1000000};
  Scheme scheme = Scheme::Filtered;
  /// Exact mode: bisection over these values instead of over [LB, UB].
  std::optional<std::vector<Rational>> candidates;
  ProbeHook on_probe;
};

struct Bounds {
  Rational lower;  // max_j f_j(sigma_j(M)); LP(C) is infeasible below it
  Rational upper;  // sum_j f_j(sigma_j(M))
};

Bounds makespan_bounds(const Instance& inst);

/// Norm of the LP the scheme rounds: the instance's p for the p-norm scheme,
/// p = 1 otherwise. Throws DomainError when the scheme does not fit the
/// instance (variant or norm).
SpeedNorm scheme_norm(const Instance& inst, Scheme scheme);

struct Decision {
  FractionalAssignment fa;  // the point actually rounded (canonical for uniform)
  OrientedPseudoforest forest;
  RoundedAssignment rounded;
  Schedule schedule;
  CanonicalStats canonical;
};

/// The rounding half of the decision procedure at a solved point.
Decision round_point(const Instance& inst, const FractionalAssignment& fa, Scheme scheme);

/// The relaxed decision procedure: nullopt certifies C below the optimum.
std::optional<Decision> decide(const Instance& inst, const Rational& C, Scheme scheme);

struct ThresholdSearch {
  Rational C;  // smallest C found feasible
  FractionalAssignment fa;
  std::size_t probes = 0;
};

/// Bisection on [LB, UB] for the LP feasibility threshold under the norm.
ThresholdSearch find_threshold(const Instance& inst, const SpeedNorm& norm, const Rational& eps,
                               const ProbeHook& hook = {});
/// Smallest feasible value among the candidates.
ThresholdSearch find_threshold(const Instance& inst, const SpeedNorm& norm,
                               std::vector<Rational> candidates, const ProbeHook& hook = {});

/// solve_assignment that reports feasible results to the hook.
std::optional<FractionalAssignment> probe(const Instance& inst, const Rational& C, const SpeedNorm& norm,
                                          const ProbeHook& hook);

struct SearchResult {
  Rational C_found;
  Decision decision;
  std::size_t probes = 0;
  long double rho = 0;
};

SearchResult minimize_makespan(const Instance& inst, const SearchConfig& config);

/// Iteration cap ceil(log2((UB - LB) / (eps * LB))) + 2.
std::size_t bisection_cap(const Bounds& b, const Rational& eps);

}  // namespace msched
