#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msched/lp.hpp"
#include "msched/model.hpp"

namespace msched {

// ---------------------------------------------------------------------------
// Assignment graph
// ---------------------------------------------------------------------------

/// Node numbering used throughout: machines 0..m-1, then jobs m..m+n-1.
struct OrientedPseudoforest {
  std::size_t machines = 0;
  std::size_t jobs = 0;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;  // (tail, head) node ids
  std::vector<std::optional<std::size_t>> parent;         // per job, p(j)
  std::vector<std::vector<std::size_t>> children;         // per job, T(j) ascending
  std::vector<std::optional<std::size_t>> incoming_job;   // per machine

  std::size_t in_degree(std::size_t node) const;
};

struct PseudoforestReport {
  std::size_t components = 0;
  std::size_t max_cycles = 0;  // largest (edges - nodes + 1) over components
  bool ok() const { return max_cycles <= 1; }
};

PseudoforestReport check_pseudoforest(const MatrixQ& x);

/// Throws InternalError if some component has more than one cycle.
OrientedPseudoforest orient(const MatrixQ& x);

// ---------------------------------------------------------------------------
// Schemes
// ---------------------------------------------------------------------------

enum class Scheme { Simple, Filtered, BetaTuned, Restricted, Uniform, PNorm };

std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view text);

/// Threshold for the parent-or-children decision and the makespan factor it
/// guarantees relative to C.
struct Threshold {
  Rational beta;
  long double ratio = 0;
};

/// beta minimizing e^(1/b - 1) / (b (e^(1/b - 1) - 1)), about 0.465941.
Threshold tuned_threshold();
/// beta minimizing 1/b + (1 - b)^(-1/p); exactly 1/2 for p = 1.
Threshold pnorm_threshold(const SpeedNorm& p);
long double pnorm_bound(long double beta, long double p);

/// Guaranteed factor rho for the scheme (the p-norm factor uses inst.norm).
long double scheme_ratio(Scheme s, const SpeedNorm& p = SpeedNorm::additive());

struct JobDecision {
  bool to_parent = false;
  std::vector<std::size_t> machines;  // sorted
  std::optional<Rational> theta;      // filtered schemes only
  std::string rule;
};

struct RoundedAssignment {
  Scheme scheme = Scheme::Simple;
  Rational C;
  Rational beta;
  std::vector<JobDecision> decisions;
  std::vector<bool> first_class;  // j in J^(1)
  std::vector<Rational> load;     // per machine, LP load of J^(1) jobs

  std::vector<std::size_t> jobs_in(bool first) const;
};

/// J^(1) = {x_{p(j),j} >= beta}; everything else runs on its full T(j).
RoundedAssignment round_threshold(const Instance& inst, const FractionalAssignment& fa,
                                  const OrientedPseudoforest& forest, const Rational& beta);
RoundedAssignment round_simple(const Instance& inst, const FractionalAssignment& fa,
                               const OrientedPseudoforest& forest);
RoundedAssignment round_filtered(const Instance& inst, const FractionalAssignment& fa,
                                 const OrientedPseudoforest& forest, const Rational& beta);
RoundedAssignment round_restricted(const Instance& inst, const FractionalAssignment& fa,
                                   const OrientedPseudoforest& forest);
RoundedAssignment round_uniform(const Instance& inst, const FractionalAssignment& fa,
                                const OrientedPseudoforest& forest);
RoundedAssignment round_pnorm(const Instance& inst, const FractionalAssignment& fa,
                              const OrientedPseudoforest& forest);

struct CanonicalStats {
  std::size_t transfers = 0;
  std::size_t searched = 0;  // LP solves spent in the support search
  bool canonical = false;
};

/// For each job at most one slow machine shared with other jobs, and that one
/// is the slowest machine carrying the job.
bool is_uniform_canonical(const FractionalAssignment& fa, const Instance& inst);
/// Number of (job, shared slow machine) incidences.
std::size_t shared_slow_count(const FractionalAssignment& fa, const Instance& inst);

/// Mass exchange between slow machines (at most n + m rounds), then a re-solve
/// on the resulting support to return a vertex. Exchanges keep every job's
/// total slow mass, which can make the structure unreachable; in that case a
/// bounded search over vertices with some columns fixed to zero takes over.
/// stats->canonical reports whether the structure was reached.
FractionalAssignment canonicalize_uniform(const Instance& inst, const FractionalAssignment& fa,
                                          CanonicalStats* stats = nullptr);

/// J^(2) jobs start at 0, then every machine runs its J^(1) jobs back to back
/// in ascending job order.
Schedule assemble_schedule(const Instance& inst, const RoundedAssignment& rounded);

std::string rounding_to_json(const RoundedAssignment& rounded);

}  // namespace msched
