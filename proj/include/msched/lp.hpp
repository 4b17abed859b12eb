#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msched/model.hpp"
#include "msched/simplex.hpp"

namespace msched {

/// Cap on the critical-speed search; larger speeds are treated as undefined.
inline constexpr unsigned kCriticalSpeedLog2Cap = 62;

/// Smallest integer q >= 1 with f(q) <= C, or nullopt if none up to 2^62.
std::optional<Integer> critical_speed(const ProcTimeFn& fn, const Rational& C);

struct LpColumn {
  std::size_t machine = 0;
  std::size_t job = 0;
  std::size_t interval = 0;  // 1-based for the interval LP, 0 otherwise
};

struct LpRowInfo {
  SparseRow<Rational> row;
  std::string tag;  // "assign_j3", "load_i2", "load_i2_l4"
};

struct LpProblem {
  std::vector<LpColumn> columns;
  std::vector<LpRowInfo> rows;
  std::optional<VectorQ> objective;  // minimized when present

  std::size_t num_columns() const { return columns.size(); }
};

/// LP(C) or its p-norm analogue together with the data needed to interpret
/// a solution: critical speeds, the per-pair J+ classification and the
/// machine-row coefficients.
struct AssignmentLp {
  LpProblem problem;
  Rational C;
  SpeedNorm norm;
  std::vector<Integer> gamma;  // per job
  Matrix<bool> fast;           // (i, j) in J+_i
  MatrixQ coef;                // machine-row coefficient, zero if no column
};

/// Optional restriction of the column set, e.g. to the support of a point.
using ColumnMask = Matrix<bool>;

/// nullopt when some critical speed is undefined (LP(C) infeasible).
std::optional<AssignmentLp> build_lp(const Instance& inst, const Rational& C,
                                     const ColumnMask* mask = nullptr);
/// Same construction with the J- coefficient f(gamma) * (gamma / s)^p.
std::optional<AssignmentLp> build_lp_pnorm(const Instance& inst, const Rational& C,
                                           const SpeedNorm& p, const ColumnMask* mask = nullptr);

struct FractionalAssignment {
  Rational C;
  SpeedNorm norm;
  MatrixQ x;  // machines x jobs
  std::vector<Integer> gamma;
  Matrix<bool> fast;
  MatrixQ coef;
  std::vector<LpColumn> basis;  // structural basic columns
  std::size_t pivots = 0;

  std::size_t support() const;
  /// Machine-row load of the given jobs (all jobs when empty filter).
  Rational load(std::size_t machine, const std::vector<bool>* jobs = nullptr) const;
};

/// Exact solve of LP(C) (or LP^(p)(C) when norm is not additive) to a basic
/// feasible solution; nullopt when infeasible.
std::optional<FractionalAssignment> solve_assignment(const Instance& inst, const Rational& C,
                                                     const SpeedNorm& norm,
                                                     const ColumnMask* mask = nullptr);
inline std::optional<FractionalAssignment> solve_assignment(const Instance& inst,
                                                            const Rational& C) {
  return solve_assignment(inst, C, SpeedNorm::additive());
}

bool lp_feasible(const Instance& inst, const Rational& C, const SpeedNorm& norm);

/// Checks every row of LP(C) exactly; returns the first broken row tag.
std::optional<std::string> check_assignment(const Instance& inst, const FractionalAssignment& fa);

/// Replaces x by a basic feasible solution of the LP restricted to x's
/// support (x must be feasible; the support can only shrink).
FractionalAssignment purify(const Instance& inst, const FractionalAssignment& fa);

// Interval-indexed LP for the weighted objective.

struct IntervalLp {
  LpProblem problem;
  Rational tau;
  Rational horizon;  // U
  std::size_t L = 0;
};

/// Throws ValidationError when some job runs faster than 1 on all machines.
IntervalLp build_interval_lp(const Instance& inst, const std::vector<Rational>& weights,
                             const Rational& tau, const Rational& horizon);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  VectorQ x;
  Rational objective;
  std::vector<std::size_t> basic_columns;
  std::size_t rows = 0;
  std::size_t pivots = 0;
};

LpSolution solve_extreme_point(const LpProblem& lp);

/// CPLEX LP text rendering, for cross-checking with external solvers.
std::string to_cplex_lp(const LpProblem& lp);

}  // namespace msched
