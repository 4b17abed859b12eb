#include <doctest.h>

#include <numeric>

#include "msched/instances.hpp"
#include "msched/oracle.hpp"
#include "support/reference.hpp"

using namespace msched;

namespace {

Instance small_random(std::uint64_t seed, std::size_t m, std::size_t n, bool weights = false) {
  RandomSpec spec;
  spec.seed = seed;
  spec.machines = m;
  spec.jobs = n;
  spec.weights = weights;
  spec.family = seed % 2 ? FnFamily::Amdahl : FnFamily::CappedInverse;
  spec.variant = seed % 3 == 0 ? Variant::Restricted : seed % 3 == 1 ? Variant::Uniform : Variant::Unrelated;
  return gen_random(spec);
}

// Same instance with machines and jobs relabelled.
Instance permuted(const Instance& inst, const std::vector<std::size_t>& mperm, const std::vector<std::size_t>& jperm) {
  Instance out = inst;
  for (std::size_t i = 0; i < inst.machines(); ++i)
    for (std::size_t j = 0; j < inst.jobs(); ++j)
      out.speeds(static_cast<Eigen::Index>(mperm[i]), static_cast<Eigen::Index>(jperm[j])) = inst.speed(i, j);
  for (std::size_t j = 0; j < inst.jobs(); ++j) out.functions[jperm[j]] = inst.functions[j];
  if (inst.weights)
    for (std::size_t j = 0; j < inst.jobs(); ++j) (*out.weights)[jperm[j]] = (*inst.weights)[j];
  if (inst.variant == Variant::Uniform)
    for (std::size_t i = 0; i < inst.machines(); ++i) out.machine_speeds[mperm[i]] = inst.machine_speeds[i];
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("two jobs on two unit machines") {
    MatrixQ s = MatrixQ::Constant(2, 2, Rational(1));
    const auto f = ProcTimeFn::power_law(Rational(2), Rational(1));
    const auto inst = make_unrelated(s, {f, f});
    const auto r = brute_force_makespan(inst);
    CHECK(r.value == 2);
    CHECK(r.value == ref::naive_optimum(inst, false));
    CHECK(verify_schedule(inst, r.witness).empty());
    CHECK(r.witness.makespan() == 2);
  }

  TEST_CASE("gap families") {
    CHECK(brute_force_makespan(gen_gap_restricted(2)).value == 2);
    CHECK(brute_force_makespan(gen_gap_restricted(1)).value == 2);
    CHECK(brute_force_makespan(gen_gap_uniform(1)).value == 2);
    const auto u2 = brute_force_makespan(gen_gap_uniform(2), OracleBudget{5, 6, 100'000'000});
    CHECK(u2.value == 2);
    CHECK(u2.combinations > 10'000'000);
    CHECK(verify_schedule(gen_gap_uniform(2), u2.witness).empty());
  }

  TEST_CASE("budget refusal") {
    CHECK_THROWS_AS(brute_force_makespan(gen_gap_uniform(2)), BudgetExceeded);
    CHECK_THROWS_AS(brute_force_makespan(gen_gap_restricted(3), OracleBudget{2, 5, 10'000'000}), BudgetExceeded);
    CHECK_THROWS_AS(brute_force_makespan(gen_gap_restricted(3), OracleBudget{4, 4, 10'000'000}), BudgetExceeded);
    CHECK_THROWS_AS(brute_force_weighted(gen_gap_restricted(3), OracleBudget{4, 5, 10}), BudgetExceeded);
    CHECK_THROWS_AS(brute_force_makespan(gen_gap_restricted(2), OracleBudget{0, 5, 10}), DomainError);
    CHECK(oracle_combinations(gen_gap_restricted(2)) > 0);
  }

  TEST_CASE("candidate sets skip droppable machines") {
    // speed 2 alone already reaches the floor of max(2/s, 1)
    std::vector<Rational> speeds{Rational(2), Rational(1)};
    const auto inst = make_uniform(speeds, {ProcTimeFn::capped_inverse(Rational(2), Rational(1))});
    const auto sets = candidate_sets(inst, 0);
    CHECK(sets == std::vector<std::vector<std::size_t>>{{0}, {1}});
  }

  TEST_CASE("weighted objective") {
    MatrixQ one(1, 1);
    one << Rational(2);
    auto single = make_unrelated(one, {ProcTimeFn::capped_inverse(Rational(4), Rational(1))});
    single.weights = std::vector<Rational>{Rational(3)};
    CHECK(brute_force_weighted(single).value == 6);

    MatrixQ two = MatrixQ::Constant(1, 2, Rational(1));
    const auto f = ProcTimeFn::capped_inverse(Rational(1), Rational(1));
    auto pair = make_unrelated(two, {f, f});
    pair.weights = std::vector<Rational>{Rational(2), Rational(1)};
    const auto r = brute_force_weighted(pair);
    CHECK(r.value == 4);
    CHECK(r.witness.find(0)->completion == 1);
  }

  TEST_CASE("invariance under relabelling") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      const auto inst = small_random(seed, 3, 3, true);
      const auto swapped = permuted(inst, {2, 0, 1}, {1, 2, 0});
      CHECK(brute_force_weighted(inst).value == brute_force_weighted(swapped).value);
      CHECK(brute_force_makespan(inst).value == brute_force_makespan(swapped).value);
    }
  }

  TEST_CASE("agrees with unpruned enumeration") {
    for (std::uint64_t seed = 20; seed < 50; ++seed) {
      const auto inst = small_random(seed, 2 + seed % 2, 2 + seed % 2, true);
      const auto mk = brute_force_makespan(inst);
      const auto wc = brute_force_weighted(inst);
      CHECK(mk.value == ref::naive_optimum(inst, false));
      CHECK(wc.value == ref::naive_optimum(inst, true));
      CHECK(verify_schedule(inst, mk.witness).empty());
      CHECK(objectives(inst, mk.witness).makespan == mk.value);
      CHECK(objectives(inst, wc.witness).weighted_completion == wc.value);
    }
  }

  TEST_CASE("never above a rounded schedule") {
    for (std::uint64_t seed = 60; seed < 75; ++seed) {
      const auto inst = small_random(seed, 3, 3);
      const Rational opt = brute_force_makespan(inst).value;
      SearchConfig cfg;
      for (auto scheme : {Scheme::Simple, Scheme::Filtered, Scheme::BetaTuned}) {
        cfg.scheme = scheme;
        const auto r = minimize_makespan(inst, cfg);
        REQUIRE(verify_schedule(inst, r.decision.schedule).empty());
        CHECK(opt <= r.decision.schedule.makespan());
      }
    }
  }

  TEST_CASE("minimal feasible C") {
    auto exact = [](const Instance& inst, unsigned k) {
      const Bounds b = makespan_bounds(inst);
      return min_feasible_C(inst, farey_candidates(b.lower, b.upper, 4 * k + 4));
    };
    const auto c2 = exact(gen_gap_restricted(2), 2);
    CHECK(c2.exact);
    CHECK(c2.upper == Rational(4, 3));
    const auto d2 = exact(gen_gap_uniform(2), 2);
    CHECK(d2.exact);
    CHECK(d2.upper == Rational(5, 4));
    CHECK(lp_feasible(gen_gap_unrelated(2), Rational(3, 2), SpeedNorm::additive()));

    const auto bracket = min_feasible_C(gen_gap_restricted(3), Rational(1, 1000000));
    CHECK(bracket.lower <= Rational(6, 5));
    CHECK(bracket.upper >= Rational(6, 5));
    CHECK(bracket.upper - bracket.lower <= bracket.lower / 1000000);

    // a grid that misses the threshold falls back to a tight bracket
    const auto coarse = min_feasible_C(gen_gap_restricted(2), std::vector<Rational>{Rational(1), Rational(3, 2), Rational(2)});
    CHECK_FALSE(coarse.exact);
    CHECK(coarse.lower <= Rational(4, 3));
    CHECK(coarse.upper >= Rational(4, 3));
    CHECK(coarse.upper < Rational(3, 2));
    CHECK(coarse.upper - coarse.lower <= Rational(1, 1000000000));

    // the lower bound itself is always exact
    MatrixQ s(1, 1);
    s << Rational(1);
    const auto single = make_unrelated(s, {ProcTimeFn::capped_inverse(Rational(3), Rational(1))});
    const auto lb = min_feasible_C(single, Rational(1, 100));
    CHECK(lb.exact);
    CHECK(lb.upper == 3);
  }

  TEST_CASE("integrality gap on the gap families") {
    for (unsigned k : {2u, 3u}) {
      const auto inst = gen_gap_restricted(k);
      const Bounds b = makespan_bounds(inst);
      const auto t = min_feasible_C(inst, farey_candidates(b.lower, b.upper, 4 * k + 4));
      const Rational opt = brute_force_makespan(inst).value;
      CHECK(opt / t.upper == 2 * (1 - Rational(1, 2 * k)));
    }
  }

  TEST_CASE("Farey candidates") {
    const auto f = farey_candidates(Rational(1), Rational(2), 3);
    CHECK(f == std::vector<Rational>{Rational(1), Rational(4, 3), Rational(3, 2), Rational(5, 3), Rational(2)});
    CHECK(farey_candidates(Rational(1, 2), Rational(1, 2), 5) == std::vector<Rational>{Rational(1, 2)});
    CHECK_THROWS_AS(farey_candidates(Rational(0), Rational(1), 0), DomainError);
  }
}
