#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msched/rational.hpp"

namespace msched {

class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A request that would exceed an explicit size or work budget.
class BudgetExceeded : public std::runtime_error {
public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an algorithm's own contract is broken (never on bad input).
class InternalError : public std::logic_error {
public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

// ---------------------------------------------------------------------------
// Processing-time functions
// ---------------------------------------------------------------------------

/// f(s) = max(work / s, floor)
struct CappedInverse {
  Rational work;
  Rational floor;
};

/// f(s) = work * s^(-exponent), exponent in (0, 1]
struct PowerLaw {
  Rational work;
  Rational exponent;
};

/// f(s) = work * ((1 - q) + q / s), q the parallel fraction in [0, 1]
struct Amdahl {
  Rational work;
  Rational parallel_fraction;
};

/// Right-continuous step function over strictly increasing speed
/// breakpoints. Constant before the first and after the last breakpoint.
struct StepTable {
  std::vector<std::pair<Rational, Rational>> steps;
};

/// A processing time as a function of the effective speed of the allocated
/// machine set. Parameters are checked on construction; StepTable shapes are
/// checked separately by validate_proc_fn since tables come from user data.
class ProcTimeFn {
public:
  using Family = std::variant<CappedInverse, PowerLaw, Amdahl, StepTable>;

  static ProcTimeFn capped_inverse(Rational work, Rational floor);
  static ProcTimeFn power_law(Rational work, Rational exponent);
  static ProcTimeFn amdahl(Rational work, Rational parallel_fraction);
  static ProcTimeFn table(std::vector<std::pair<Rational, Rational>> steps);

  /// f(speed); throws DomainError for speed <= 0.
  Rational operator()(const Rational& speed) const;

  const Family& family() const { return family_; }
  std::string family_name() const;

  /// True when evaluation is exact rational arithmetic (everything except
  /// PowerLaw with a non-unit exponent).
  bool is_exact() const;

  /// The same function with every time value multiplied by factor > 0.
  ProcTimeFn scaled(const Rational& factor) const;

  friend bool operator==(const ProcTimeFn& a, const ProcTimeFn& b);

private:
  explicit ProcTimeFn(Family f) : family_(std::move(f)) {}
  Family family_;
};

Rational eval_proc_time(const ProcTimeFn& fn, const Rational& speed);

struct FnViolation {
  enum class Property { Positive, NonIncreasing, NonDecreasingWork };
  Property property;
  Rational lower_speed;
  Rational upper_speed;
  std::string describe() const;
};

/// nullopt when both monotonicity properties hold.
std::optional<FnViolation> validate_proc_fn(const ProcTimeFn& fn);

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

enum class Variant { Unrelated, Restricted, Uniform };

std::string to_string(Variant v);
Variant parse_variant(std::string_view text);

struct Instance {
  MatrixQ speeds;  // machines x jobs; zero marks a forbidden pair
  std::vector<ProcTimeFn> functions;
  std::optional<std::vector<Rational>> weights;
  SpeedNorm norm;
  Variant variant = Variant::Unrelated;
  std::vector<Rational> machine_speeds;  // uniform variant only

  std::size_t machines() const { return static_cast<std::size_t>(speeds.rows()); }
  std::size_t jobs() const { return functions.size(); }
  const Rational& speed(std::size_t i, std::size_t j) const {
    return speeds(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool allowed(std::size_t i, std::size_t j) const { return speed(i, j) > 0; }
  Rational weight(std::size_t j) const { return weights ? (*weights)[j] : Rational(1); }

  /// Throws ValidationError on any broken invariant.
  void validate() const;

  /// The instance restricted to the given jobs, in the given order.
  Instance subinstance(std::span<const std::size_t> jobs) const;

  std::vector<std::size_t> all_machines() const;
};

Instance make_unrelated(MatrixQ speeds, std::vector<ProcTimeFn> functions);
Instance make_restricted(const Matrix<int>& eligible, std::vector<ProcTimeFn> functions);
Instance make_uniform(std::vector<Rational> machine_speeds, std::vector<ProcTimeFn> functions);

Rational effective_speed(std::span<const Rational> speeds, const SpeedNorm& norm);
Rational effective_speed(const Instance& inst, std::size_t job,
                         std::span<const std::size_t> machines, const SpeedNorm& norm);
inline Rational effective_speed(const Instance& inst, std::size_t job,
                                std::span<const std::size_t> machines) {
  return effective_speed(inst, job, machines, inst.norm);
}

/// f_j evaluated at the effective speed of the machine set.
Rational processing_time(const Instance& inst, std::size_t job,
                         std::span<const std::size_t> machines);

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

struct Placement {
  std::size_t job = 0;
  std::vector<std::size_t> machines;  // sorted ascending
  Rational start;
  Rational completion;
};

/// A placement with its completion time derived from the instance.
Placement place(const Instance& inst, std::size_t job, std::vector<std::size_t> machines,
                Rational start);

struct Schedule {
  std::vector<Placement> placements;

  Rational makespan() const;
  /// Placement of a job, if present.
  const Placement* find(std::size_t job) const;
  /// Shifts every start and completion by delta.
  void shift(const Rational& delta);
};

struct ScheduleViolation {
  enum class Kind {
    UnknownJob,
    MissingJob,
    DuplicateJob,
    EmptyMachineSet,
    InvalidMachine,
    ForbiddenMachine,
    NegativeStart,
    Duration,
    Overlap
  };
  Kind kind;
  std::size_t job = 0;
  std::optional<std::size_t> other_job;
  std::optional<std::size_t> machine;
  Rational from;
  Rational to;
  std::string describe() const;
};

/// Empty result means the schedule is feasible.
std::vector<ScheduleViolation> verify_schedule(const Instance& inst, const Schedule& schedule);

struct Objectives {
  Rational makespan;
  Rational weighted_completion;
};

Objectives objectives(const Instance& inst, const Schedule& schedule);

}  // namespace msched
