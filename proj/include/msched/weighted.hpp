#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "msched/lp.hpp"
#include "msched/search.hpp"

namespace msched {

struct WeightedConfig {
  Rational tau{2};
  Rational alpha{2};
  Scheme scheme = Scheme::Filtered;
};

struct BucketPlan {
  Rational tau;
  Rational alpha;
  std::vector<Rational> weights;
  IntervalLp lp;
  LpSolution solution;  // optimal extreme point of the interval LP
  std::vector<Rational> cbar;     // fractional completion time per job
  std::vector<Rational> tail;     // mass beyond the job's bucket
  std::vector<std::size_t> bucket;  // per job, 1-based
  std::map<std::size_t, std::vector<std::size_t>> buckets;  // nonempty only

  std::size_t L() const { return lp.L; }
  const Rational& horizon() const { return lp.horizon; }
  const Rational& lp_objective() const { return solution.objective; }
  /// alpha / (alpha - 1) * tau^l
  Rational bucket_target(std::size_t l) const;
};

/// Solves the interval LP and partitions jobs by fractional completion time.
/// Throws ValidationError for jobs faster than 1, DomainError for bad tau or
/// alpha, or a norm other than p = 1.
BucketPlan plan_buckets(const Instance& inst, const WeightedConfig& config = {});

/// Folded point z of bucket l: machines x (jobs of the bucket, ascending).
MatrixQ fold_bucket(const BucketPlan& plan, const Instance& inst, std::size_t l);

struct BucketRun {
  std::size_t index = 0;
  std::vector<std::size_t> jobs;
  Rational C;
  Rational offset;  // global finish time of earlier buckets
  Decision decision;
};

struct WeightedResult {
  BucketPlan plan;
  std::vector<BucketRun> runs;
  Schedule schedule;
  Rational objective;
  long double rho = 0;
  /// rho * alpha^2 / (alpha - 1) * tau^2 / (tau - 1): per-job bound over cbar
  long double job_factor = 0;
};

WeightedResult solve_weighted(const Instance& inst, const WeightedConfig& config = {});

/// job,weight,cbar,cbar_decimal,bucket,completion,completion_decimal,ratio
std::string weighted_report_csv(const WeightedResult& r);

}  // namespace msched
