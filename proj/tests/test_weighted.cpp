#include <doctest.h>

#include <set>

#include "msched/instances.hpp"
#include "msched/oracle.hpp"
#include "msched/weighted.hpp"

using namespace msched;

namespace {

Instance weighted_random(std::uint64_t seed, std::size_t m = 3, std::size_t n = 3) {
  RandomSpec spec;
  spec.seed = seed;
  spec.machines = m;
  spec.jobs = n;
  spec.weights = true;
  spec.family = seed % 2 ? FnFamily::Amdahl : FnFamily::CappedInverse;
  return with_unit_floor(gen_random(spec));
}

}  // namespace

TEST_SUITE("weighted") {
  TEST_CASE("single unit job") {
    MatrixQ s(1, 1);
    s << Rational(1);
    const auto inst = make_unrelated(s, {ProcTimeFn::capped_inverse(Rational(1), Rational(1))});
    const auto r = solve_weighted(inst);
    CHECK(r.plan.lp_objective() == 1);
    CHECK(r.objective == 1);
    CHECK(r.objective <= Rational(16) * from_long_double(r.rho));
    CHECK(r.schedule.placements.size() == 1);
  }

  TEST_CASE("plan invariants on random instances") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto inst = weighted_random(seed, 3, 4);
      const auto plan = plan_buckets(inst);
      std::set<std::size_t> covered;
      for (const auto& [l, jobs] : plan.buckets)
        for (auto j : jobs) {
          CHECK(covered.insert(j).second);
          CHECK(plan.bucket[j] == l);
          const Rational a = plan.alpha * plan.cbar[j];
          CHECK(a < pow_int(plan.tau, static_cast<unsigned>(l)));
          if (l > 1) CHECK(a >= pow_int(plan.tau, static_cast<unsigned>(l - 1)));
          CHECK(plan.tail[j] <= 1 / plan.alpha);
        }
      CHECK(covered.size() == inst.jobs());

      for (const auto& [l, jobs] : plan.buckets) {
        const MatrixQ z = fold_bucket(plan, inst, l);
        CHECK(z.cols() == static_cast<Eigen::Index>(jobs.size()));
        for (Eigen::Index c = 0; c < z.cols(); ++c) CHECK(z.col(c).sum() == 1);
        const auto sub = inst.subinstance(jobs);
        auto lp = build_lp(sub, plan.bucket_target(l));
        REQUIRE(lp.has_value());
        for (Eigen::Index i = 0; i < z.rows(); ++i) CHECK(lp->coef.row(i).dot(z.row(i)) <= plan.bucket_target(l));
      }
    }
  }

  TEST_CASE("per-job bound and concatenation") {
    for (std::uint64_t seed = 30; seed < 50; ++seed) {
      const auto inst = weighted_random(seed, 3, 4);
      const auto r = solve_weighted(inst);
      CHECK(verify_schedule(inst, r.schedule).empty());
      for (std::size_t j = 0; j < inst.jobs(); ++j) {
        const auto* p = r.schedule.find(j);
        REQUIRE(p != nullptr);
        CHECK(to_long_double(p->completion) <= r.job_factor * to_long_double(r.plan.cbar[j]) * (1 + 1e-12L));
      }
      Rational finish(0);
      for (std::size_t k = 0; k < r.runs.size(); ++k) {
        if (k > 0) CHECK(r.runs[k].index > r.runs[k - 1].index);
        CHECK(r.runs[k].offset == finish);
        for (auto j : r.runs[k].jobs) {
          CHECK(r.schedule.find(j)->start >= finish);
        }
        Rational end = finish;
        for (auto j : r.runs[k].jobs) end = std::max(end, r.schedule.find(j)->completion);
        finish = end;
      }
    }
  }

  TEST_CASE("objective against the LP and the oracle") {
    const long double bound = 16 * 3.1632L;
    for (std::uint64_t seed = 60; seed < 80; ++seed) {
      const auto inst = weighted_random(seed);
      const auto r = solve_weighted(inst);
      CHECK(r.objective >= r.plan.lp_objective());
      CHECK(to_long_double(r.objective) <= bound * to_long_double(r.plan.lp_objective()));
      const auto opt = brute_force_weighted(inst);
      CHECK(r.objective >= opt.value);
      CHECK(r.plan.lp_objective() <= opt.value);
      CHECK(to_long_double(r.objective) <= bound * to_long_double(opt.value));
    }
  }

  TEST_CASE("rejections") {
    MatrixQ s(1, 1);
    s << Rational(1);
    const auto fast = make_unrelated(s, {ProcTimeFn::capped_inverse(Rational(1, 2), Rational(1, 2))});
    CHECK_THROWS_AS(solve_weighted(fast), ValidationError);
    CHECK_NOTHROW(solve_weighted(with_unit_floor(fast)));

    auto pnorm = with_unit_floor(fast);
    pnorm.norm = SpeedNorm::finite(Rational(2));
    CHECK_THROWS_AS(solve_weighted(pnorm), DomainError);

    WeightedConfig bad;
    bad.tau = 1;
    CHECK_THROWS_AS(solve_weighted(with_unit_floor(fast), bad), DomainError);
    bad.tau = 2;
    bad.alpha = Rational(1, 2);
    CHECK_THROWS_AS(solve_weighted(with_unit_floor(fast), bad), DomainError);
  }

  TEST_CASE("other makespan schemes and parameters") {
    const auto inst = weighted_random(90, 3, 3);
    for (auto scheme : {Scheme::Simple, Scheme::BetaTuned}) {
      WeightedConfig cfg;
      cfg.scheme = scheme;
      cfg.tau = 3;
      cfg.alpha = Rational(3, 2);
      const auto r = solve_weighted(inst, cfg);
      CHECK(verify_schedule(inst, r.schedule).empty());
      for (std::size_t j = 0; j < inst.jobs(); ++j)
        CHECK(to_long_double(r.schedule.find(j)->completion) <=
              r.job_factor * to_long_double(r.plan.cbar[j]) * (1 + 1e-12L));
    }
  }

  TEST_CASE("report CSV") {
    const auto r = solve_weighted(weighted_random(7));
    const std::string csv = weighted_report_csv(r);
    CHECK(csv.rfind("job,weight,cbar,cbar_decimal,bucket,completion,completion_decimal,ratio\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  }
}
