#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "msched/instances.hpp"
#include "msched/oracle.hpp"

using namespace msched;

namespace {

std::string error_of(std::string_view text) {
  try {
    instance_from_json(text);
  } catch (const ParseError& e) {
    return e.what();
  } catch (const ValidationError& e) {
    return std::string("validation: ") + e.what();
  }
  return {};
}

bool same(const Instance& a, const Instance& b) {
  if (a.speeds != b.speeds || a.variant != b.variant || a.norm != b.norm || a.weights != b.weights) return false;
  if (a.machine_speeds != b.machine_speeds || a.functions.size() != b.functions.size()) return false;
  for (std::size_t j = 0; j < a.functions.size(); ++j)
    if (!(a.functions[j] == b.functions[j])) return false;
  return true;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("msched_test_" + name);
}

}  // namespace

TEST_SUITE("instances") {
  TEST_CASE("gap family shapes") {
    const auto b1 = gen_gap_unrelated(1);
    CHECK(b1.jobs() == 3);
    CHECK(b1.machines() == 3);
    const auto b2 = gen_gap_unrelated(2);
    CHECK(b2.jobs() == 5);
    CHECK(b2.machines() == 6);
    CHECK(b2.speed(0, 0) == 2 / default_phi());
    CHECK(b2.speed(2, 0) == 2 - default_phi());
    CHECK(b2.speed(1, 4) == 1);

    const auto c1 = gen_gap_restricted(1);
    CHECK(c1.machines() == 1);
    CHECK(c1.variant == Variant::Restricted);
    CHECK(gen_gap_restricted(4).machines() == 7);

    const auto d1 = gen_gap_uniform(1);
    CHECK(d1.jobs() == 3);
    CHECK(d1.machines() == 3);
    CHECK(d1.machine_speeds == std::vector<Rational>{Rational(1), Rational(1), Rational(2)});
    CHECK(std::abs(to_long_double(default_phi()) - (1 + std::sqrt(5.0L)) / 2) < 2e-10L);
  }

  TEST_CASE("unrelated gap family") {
    CHECK(lp_feasible(gen_gap_unrelated(2), Rational(3, 2), SpeedNorm::additive()));
    const Rational golden = 1 + default_phi();
    const auto k1 = brute_force_makespan(gen_gap_unrelated(1));
    CHECK(std::abs(to_long_double(k1.value - golden)) < 1e-6L);
    const auto k2 = brute_force_makespan(gen_gap_unrelated(2), OracleBudget{5, 6, 1'000'000'000});
    CHECK(std::abs(to_long_double(k2.value - golden)) < 1e-6L);
  }

  TEST_CASE("restricted and uniform gap families") {
    CHECK(brute_force_makespan(gen_gap_restricted(1)).value == 2);
    CHECK(brute_force_makespan(gen_gap_restricted(3)).value == 2);
    CHECK(brute_force_makespan(gen_gap_uniform(1)).value == 2);
    CHECK(lp_feasible(gen_gap_restricted(2), Rational(4, 3), SpeedNorm::additive()));
    CHECK(lp_feasible(gen_gap_uniform(2), Rational(5, 4), SpeedNorm::additive()));
    CHECK_FALSE(lp_feasible(gen_gap_uniform(2), Rational(5, 4) - Rational(1, 10000), SpeedNorm::additive()));
  }

  TEST_CASE("non-malleable transformation") {
    Matrix<int> one(1, 1);
    one << 1;
    const auto single = from_nonmalleable(one);
    CHECK(std::abs(to_long_double(processing_time(single, 0, std::vector<std::size_t>{0})) - 1) < 1e-9L);

    Matrix<int> p(2, 2);
    p << 1, 2, 2, 1;
    const auto inst = from_nonmalleable(p);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(to_long_double(processing_time(inst, j, std::vector<std::size_t>{i})) -
                       p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-9L);
    const auto opt = brute_force_makespan(inst);
    CHECK(std::llround(static_cast<double>(to_long_double(opt.value))) == 1);

    Matrix<int> big = Matrix<int>::Constant(3, 3, 8);
    CHECK_THROWS_AS(from_nonmalleable(big), BudgetExceeded);
    Matrix<int> zero(1, 1);
    zero << 0;
    CHECK_THROWS_AS(from_nonmalleable(zero), DomainError);
  }

  TEST_CASE("random generation is deterministic") {
    RandomSpec spec;
    spec.seed = 42;
    spec.machines = 3;
    spec.jobs = 4;
    CHECK(instance_to_json(gen_random(spec)) == instance_to_json(gen_random(spec)));
    spec.seed = 43;
    CHECK(instance_to_json(gen_random(spec)) != instance_to_json(gen_random(RandomSpec{42, 3, 4})));
  }

  TEST_CASE("random instances validate") {
    for (auto variant : {Variant::Unrelated, Variant::Restricted, Variant::Uniform})
      for (auto family : {FnFamily::CappedInverse, FnFamily::Amdahl, FnFamily::PowerLaw})
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
          RandomSpec spec{seed, 4, 5, family, variant, true};
          const auto inst = gen_random(spec);
          CHECK_NOTHROW(inst.validate());
          CHECK(inst.variant == variant);
          CHECK(inst.weights.has_value());
        }
    CHECK_THROWS_AS(gen_random(RandomSpec{1, 0, 3}), DomainError);
  }

  TEST_CASE("unit floor") {
    MatrixQ s(1, 1);
    s << Rational(4);
    const auto inst = make_unrelated(s, {ProcTimeFn::capped_inverse(Rational(1), Rational(1, 8))});
    const auto lifted = with_unit_floor(inst);
    CHECK(processing_time(lifted, 0, std::vector<std::size_t>{0}) == 1);
    CHECK(same(with_unit_floor(lifted), lifted));
  }

  TEST_CASE("JSON round trip") {
    const auto c3 = gen_gap_restricted(3);
    CHECK(same(instance_from_json(instance_to_json(c3)), c3));
    for (auto family : {FnFamily::CappedInverse, FnFamily::Amdahl, FnFamily::PowerLaw}) {
      auto inst = gen_random(RandomSpec{9, 3, 3, family, Variant::Uniform, true});
      inst.norm = SpeedNorm::finite(Rational(5, 2));
      CHECK(same(instance_from_json(instance_to_json(inst)), inst));
    }
    auto table = gen_gap_restricted(2);
    table.functions[1] = ProcTimeFn::table({{Rational(1), Rational(3)}, {Rational(2), Rational(2)}});
    CHECK(same(instance_from_json(instance_to_json(table)), table));

    const auto path = scratch("instance.json").string();
    save_instance(path, c3);
    CHECK(same(load_instance(path), c3));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_instance(scratch("missing.json").string()), ParseError);
  }

  TEST_CASE("parse errors name their location") {
    CHECK(error_of("{").find("malformed JSON") != std::string::npos);
    auto j = nlohmann::json::parse(instance_to_json(gen_gap_restricted(2)));
    j["functions"][1]["work"] = "x/2";
    CHECK(error_of(j.dump()).find("functions[1].work") != std::string::npos);
    j = nlohmann::json::parse(instance_to_json(gen_gap_restricted(2)));
    j["functions"][0]["family"] = "cubic";
    CHECK(error_of(j.dump()).find("functions[0]") != std::string::npos);
    j = nlohmann::json::parse(instance_to_json(gen_gap_restricted(2)));
    j["speeds"] = {"1/1"};
    CHECK_FALSE(error_of(j.dump()).empty());
    j = nlohmann::json::parse(instance_to_json(gen_gap_restricted(2)));
    j.erase("functions");
    CHECK(error_of(j.dump()).find("functions") != std::string::npos);
  }

  TEST_CASE("schedule round trip") {
    const auto inst = gen_gap_restricted(2);
    const auto opt = brute_force_makespan(inst);
    const std::string text = schedule_to_json(opt.witness);
    const auto back = schedule_from_json(text, inst);
    REQUIRE(back.placements.size() == opt.witness.placements.size());
    CHECK(verify_schedule(inst, back).empty());
    CHECK(back.makespan() == opt.value);

    // completion may be omitted
    const auto lean = schedule_from_json(R"({"0": {"machines": [0], "start": "0"}, "1": {"machines": [1], "start": "1/2"}})", inst);
    CHECK(lean.find(0)->completion == 2);
    CHECK(lean.find(1)->completion == Rational(5, 2));
    CHECK_THROWS_AS(schedule_from_json(R"({"0": {"machines": "all"}})", inst), ParseError);

    const auto path = scratch("schedule.json").string();
    save_schedule(path, opt.witness);
    CHECK(load_schedule(path, inst).makespan() == opt.value);
    std::filesystem::remove(path);
  }
}
