#include "msched/weighted.hpp"

#include <sstream>

namespace msched {

Rational BucketPlan::bucket_target(std::size_t l) const {
  return alpha / (alpha - 1) * pow_int(tau, static_cast<unsigned>(l));
}

BucketPlan plan_buckets(const Instance& inst, const WeightedConfig& config) {
  if (config.tau <= 1) throw DomainError("tau must exceed 1");
  if (config.alpha <= 1) throw DomainError("alpha must exceed 1");
  if (!inst.norm.is_additive()) throw DomainError("the weighted objective is defined for p = 1 only");
  inst.validate();
  std::vector<Rational> w(inst.jobs());
  for (std::size_t j = 0; j < inst.jobs(); ++j) w[j] = inst.weight(j);

  BucketPlan plan;
  plan.tau = config.tau;
  plan.alpha = config.alpha;
  plan.weights = w;
  plan.lp = build_interval_lp(inst, w, config.tau, makespan_bounds(inst).upper);
  plan.solution = solve_extreme_point(plan.lp.problem);
  if (plan.solution.status != LpStatus::Optimal) throw InternalError("interval LP is not solvable");

  const std::size_t n = inst.jobs();
  const auto& cols = plan.lp.problem.columns;
  // mass[j][l]: sum over machines of x_{i,j,l}
  std::vector<std::vector<Rational>> mass(n, std::vector<Rational>(plan.L() + 1));
  for (std::size_t c = 0; c < cols.size(); ++c)
    mass[cols[c].job][cols[c].interval] += plan.solution.x(static_cast<Eigen::Index>(c));

  plan.cbar.assign(n, Rational(0));
  plan.tail.assign(n, Rational(0));
  plan.bucket.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    Rational lower(1);  // tau^(l-1)
    for (std::size_t l = 1; l <= plan.L(); ++l, lower *= plan.tau) plan.cbar[j] += lower * mass[j][l];
    const Rational scaled = plan.alpha * plan.cbar[j];
    std::size_t l = 1;
    for (Rational upper = plan.tau; !(scaled < upper); upper *= plan.tau) ++l;
    plan.bucket[j] = l;
    for (std::size_t k = l + 1; k <= plan.L(); ++k) plan.tail[j] += mass[j][k];
    if (plan.tail[j] * plan.alpha > 1)
      throw InternalError("job " + std::to_string(j) + " has more than 1/alpha mass past its bucket");
    plan.buckets[l].push_back(j);
  }
  return plan;
}

MatrixQ fold_bucket(const BucketPlan& plan, const Instance& inst, std::size_t l) {
  auto it = plan.buckets.find(l);
  if (it == plan.buckets.end()) throw DomainError("bucket " + std::to_string(l) + " is empty");
  const auto& jobs = it->second;
  std::vector<Eigen::Index> pos(inst.jobs(), -1);
  for (std::size_t k = 0; k < jobs.size(); ++k) pos[jobs[k]] = static_cast<Eigen::Index>(k);

  MatrixQ z = MatrixQ::Zero(static_cast<Eigen::Index>(inst.machines()), static_cast<Eigen::Index>(jobs.size()));
  const auto& cols = plan.lp.problem.columns;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto k = pos[cols[c].job];
    if (k < 0 || cols[c].interval > l) continue;
    z(static_cast<Eigen::Index>(cols[c].machine), k) += plan.solution.x(static_cast<Eigen::Index>(c));
  }
  for (std::size_t k = 0; k < jobs.size(); ++k)
    z.col(static_cast<Eigen::Index>(k)) /= (1 - plan.tail[jobs[k]]);
  return z;
}

WeightedResult solve_weighted(const Instance& inst, const WeightedConfig& config) {
  WeightedResult r;
  r.plan = plan_buckets(inst, config);
  const SpeedNorm norm = scheme_norm(inst, config.scheme);
  r.rho = scheme_ratio(config.scheme, norm);
  const long double a = to_long_double(config.alpha), t = to_long_double(config.tau);
  r.job_factor = r.rho * a * a / (a - 1) * t * t / (t - 1);

  Rational offset(0);
  for (const auto& [l, jobs] : r.plan.buckets) {
    BucketRun run;
    run.index = l;
    run.jobs = jobs;
    run.C = r.plan.bucket_target(l);
    run.offset = offset;
    const Instance sub = inst.subinstance(jobs);
    auto lp = build_lp(sub, run.C);
    if (!lp) throw InternalError("bucket " + std::to_string(l) + ": critical speed undefined at its target");
    FractionalAssignment fa;
    fa.C = run.C;
    fa.norm = norm;
    fa.x = fold_bucket(r.plan, inst, l);
    fa.gamma = std::move(lp->gamma);
    fa.fast = std::move(lp->fast);
    fa.coef = std::move(lp->coef);
    if (auto broken = check_assignment(sub, fa))
      throw InternalError("bucket " + std::to_string(l) + ": folded point violates row " + *broken);
    run.decision = round_point(sub, purify(sub, fa), config.scheme);

    Schedule part = run.decision.schedule;
    for (auto& p : part.placements) p.job = jobs[p.job];
    part.shift(offset);
    for (auto& p : part.placements) r.schedule.placements.push_back(p);
    offset = std::max(offset, part.makespan());
    r.runs.push_back(std::move(run));
  }
  r.objective = objectives(inst, r.schedule).weighted_completion;
  return r;
}

std::string weighted_report_csv(const WeightedResult& r) {
  std::ostringstream os;
  os << "job,weight,cbar,cbar_decimal,bucket,completion,completion_decimal,ratio\n";
  std::vector<const Placement*> by_job(r.plan.cbar.size(), nullptr);
  for (const auto& p : r.schedule.placements) by_job[p.job] = &p;
  for (std::size_t j = 0; j < by_job.size(); ++j) {
    const Rational& cbar = r.plan.cbar[j];
    const Rational& done = by_job[j]->completion;
    os << j << ',' << to_fraction_string(r.plan.weights[j]) << ','
       << to_fraction_string(cbar) << ',' << to_decimal_string(cbar, 12) << ',' << r.plan.bucket[j] << ','
       << to_fraction_string(done) << ',' << to_decimal_string(done, 12) << ','
       << to_decimal_string(done / cbar, 12) << '\n';
  }
  return os.str();
}

}  // namespace msched
