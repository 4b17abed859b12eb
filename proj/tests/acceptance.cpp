// One PASS/FAIL line per acceptance criterion; exit status 1 on any failure.
// Criterion 7 leaves weighted_bench.csv in the working directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msched/cli.hpp"
#include "msched/instances.hpp"
#include "msched/oracle.hpp"
#include "msched/search.hpp"
#include "msched/weighted.hpp"

using namespace msched;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Failures collected by a criterion; the first few are printed.
struct Log {
  std::vector<std::string> failures;
  void fail(const std::string& what) { failures.push_back(what); }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

// Support and pseudoforest checks over every LP point seen by suites 1-3.
struct StructureAudit {
  std::size_t points = 0;
  std::vector<std::string> failures;

  void operator()(const Instance& inst, const FractionalAssignment& fa) {
    ++points;
    const std::size_t bound = inst.jobs() + inst.machines();
    if (fa.support() > bound)
      failures.push_back("support " + std::to_string(fa.support()) + " > " + std::to_string(bound));
    const auto report = check_pseudoforest(fa.x);
    if (!report.ok()) failures.push_back("component with " + std::to_string(report.max_cycles) + " cycles");
  }
  ProbeHook hook(const Instance& inst) {
    return [this, &inst](const FractionalAssignment& fa) { (*this)(inst, fa); };
  }
};

StructureAudit audit;

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome finish(const Log& log, const std::string& summary) {
  if (log.failures.empty()) return {true, summary};
  std::string d = summary + "; " + std::to_string(log.failures.size()) + " failure(s): ";
  for (std::size_t i = 0; i < std::min<std::size_t>(3, log.failures.size()); ++i) d += (i ? " | " : "") + log.failures[i];
  return {false, d};
}

std::string str(const Rational& q) { return to_fraction_string(q); }

// ---------------------------------------------------------------------------

Outcome gap_values() {
  Log log;
  double slowest = 0;
  std::string slowest_name;
  auto timed = [&](const std::string& name, const std::function<void()>& body) {
    const auto t0 = Clock::now();
    body();
    const double s = seconds_since(t0);
    if (s > slowest) slowest = s, slowest_name = name;
    log.expect(s < 1.0, name + " took " + std::to_string(s) + " s");
  };

  for (unsigned k : {2u, 3u, 5u}) {
    const std::string ks = std::to_string(k);
    auto threshold = [&](const Instance& inst, const Rational& want, const std::string& name) {
      timed(name + " k=" + ks, [&] {
        const Bounds b = makespan_bounds(inst);
        const auto t = min_feasible_C(inst, farey_candidates(b.lower, b.upper, 4 * k + 4), SpeedNorm::additive(),
                                      audit.hook(inst));
        log.expect(t.exact && t.upper == want,
                   name + " k=" + ks + ": got " + str(t.upper) + (t.exact ? "" : " (bracket)") + ", want " + str(want));
      });
    };
    threshold(gen_gap_restricted(k), Rational(2 * k, 2 * k - 1), "restricted");
    threshold(gen_gap_uniform(k), Rational(2 * k + 1, 2 * k), "uniform");

    timed("unrelated LP k=" + ks, [&] {
      const auto inst = gen_gap_unrelated(k);
      const auto fa = probe(inst, 1 + Rational(1, k), SpeedNorm::additive(), audit.hook(inst));
      log.expect(fa.has_value(), "unrelated k=" + ks + ": LP(1+1/k) infeasible");
    });
  }

  // The generic oracle budget refuses the larger gap instances; these ones
  // are still exhaustive, only bigger than the default guard allows.
  const OracleBudget k2{5, 6, 100'000'000};
  const OracleBudget k3{7, 9, std::numeric_limits<std::uint64_t>::max()};
  for (unsigned k : {1u, 2u, 3u}) {
    const OracleBudget budget = k == 1 ? OracleBudget{} : k == 2 ? k2 : k3;
    for (bool uniform : {false, true}) {
      const std::string name = std::string(uniform ? "uniform" : "restricted") + " OPT k=" + std::to_string(k);
      timed(name, [&] {
        const auto inst = uniform ? gen_gap_uniform(k) : gen_gap_restricted(k);
        try {
          const auto r = brute_force_makespan(inst, budget);
          log.expect(r.value == 2, name + ": got " + str(r.value));
          log.expect(verify_schedule(inst, r.witness).empty(), name + ": witness fails verification");
        } catch (const BudgetExceeded& e) {
          log.fail(name + ": " + e.what());
        }
      });
    }
  }

  timed("unrelated OPT k=1", [&] {
    const auto r = brute_force_makespan(gen_gap_unrelated(1));
    const long double golden = 1 + (1 + std::sqrt(5.0L)) / 2;
    log.expect(std::abs(to_long_double(r.value) - golden) <= 1e-6L,
               "unrelated k=1 OPT " + to_decimal_string(r.value) + " vs 1+phi");
  });

  std::ostringstream s;
  s << "thresholds k=2,3,5 exact, OPT=2 for k<=3, slowest item " << slowest_name << " " << slowest << " s";
  return finish(log, s.str());
}

// ---------------------------------------------------------------------------

struct Gate {
  Scheme scheme;
  long double rho;  // gated factor
};

const std::vector<Gate> kGates{{Scheme::Simple, 4.0L},
                               {Scheme::Filtered, 3.1632L},
                               {Scheme::BetaTuned, 3.1462L},
                               {Scheme::Restricted, 7.0L / 3.0L},
                               {Scheme::Uniform, 3.0L}};

std::vector<Gate> gates_for(Variant v) {
  std::vector<Gate> out;
  for (const auto& g : kGates) {
    if (g.scheme == Scheme::Restricted && v != Variant::Restricted) continue;
    if (g.scheme == Scheme::Uniform && v != Variant::Uniform) continue;
    out.push_back(g);
  }
  return out;
}

Instance random_instance(std::uint64_t seed, std::size_t m, std::size_t n, Variant v) {
  RandomSpec spec;
  spec.seed = seed;
  spec.machines = m;
  spec.jobs = n;
  spec.family = seed % 2 ? FnFamily::Amdahl : FnFamily::CappedInverse;
  spec.variant = v;
  return gen_random(spec);
}

Variant variant_of(std::size_t i) {
  static const Variant vs[] = {Variant::Unrelated, Variant::Restricted, Variant::Uniform};
  return vs[i % 3];
}

Outcome ratio_bounds() {
  Log log;
  const Rational eps(1, 1000000);
  std::size_t instances = 0, roundings = 0;
  std::vector<long double> worst(kGates.size(), 0);
  for (std::size_t i = 0; i < 240; ++i) {
    const std::size_t m = 1 + i % 5, n = 1 + (i / 5) % 7;
    const auto inst = random_instance(1000 + i, m, n, variant_of(i));
    const auto t = find_threshold(inst, SpeedNorm::additive(), eps, audit.hook(inst));
    ++instances;
    for (const auto& g : gates_for(inst.variant)) {
      const auto d = round_point(inst, t.fa, g.scheme);
      audit(inst, d.fa);
      ++roundings;
      const long double ratio = to_long_double(d.schedule.makespan() / t.C);
      const auto at = static_cast<std::size_t>(std::find_if(kGates.begin(), kGates.end(), [&](const Gate& x) {
                                                 return x.scheme == g.scheme;
                                               }) - kGates.begin());
      worst[at] = std::max(worst[at], ratio);
      const std::string tag = "seed " + std::to_string(1000 + i) + " " + to_string(g.scheme);
      log.expect(ratio <= g.rho, tag + ": ratio " + std::to_string(static_cast<double>(ratio)));
      log.expect(verify_schedule(inst, d.schedule).empty(), tag + ": schedule fails verification");
    }
  }
  std::ostringstream s;
  s << instances << " instances, " << roundings << " roundings; worst ratios";
  for (std::size_t g = 0; g < kGates.size(); ++g)
    s << ' ' << to_string(kGates[g].scheme) << '=' << static_cast<double>(worst[g]);
  return finish(log, s.str());
}

// ---------------------------------------------------------------------------

Outcome oracle_comparison() {
  Log log;
  const Rational eps(1, 1000000);
  std::size_t instances = 0, roundings = 0;
  for (std::size_t i = 0; i < 120; ++i) {
    const std::size_t m = 1 + i % 4, n = 1 + (i / 4) % 3;
    const auto inst = random_instance(5000 + i, m, n, variant_of(i));
    const Rational opt = brute_force_makespan(inst).value;
    const auto t = find_threshold(inst, SpeedNorm::additive(), eps, audit.hook(inst));
    ++instances;
    const std::string seed = "seed " + std::to_string(5000 + i);
    log.expect(t.C <= opt * (1 + eps), seed + ": C_found " + str(t.C) + " above OPT " + str(opt));
    for (const auto& g : gates_for(inst.variant)) {
      const auto d = round_point(inst, t.fa, g.scheme);
      audit(inst, d.fa);
      ++roundings;
      const Rational mk = d.schedule.makespan();
      const std::string tag = seed + " " + to_string(g.scheme);
      log.expect(verify_schedule(inst, d.schedule).empty(), tag + ": schedule fails verification");
      log.expect(mk >= opt, tag + ": makespan below OPT");
      log.expect(to_long_double(mk) <= g.rho * (1 + 1e-6L) * to_long_double(opt),
                 tag + ": makespan/OPT " + to_decimal_string(mk / opt));
    }
  }
  return finish(log, std::to_string(instances) + " instances, " + std::to_string(roundings) + " roundings");
}

// ---------------------------------------------------------------------------

Outcome structure() {
  Log log;
  for (const auto& f : audit.failures) log.fail(f);
  log.expect(audit.points > 0, "no LP points were recorded");
  return finish(log, std::to_string(audit.points) + " LP points from criteria 1-3");
}

// ---------------------------------------------------------------------------

Outcome fact_one() {
  Log log;
  std::mt19937_64 rng(20240601);
  auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  auto positive = [&](long max_num, long max_den) { return Rational(pick(1, max_num), pick(1, max_den)); };
  std::size_t approximate = 0;
  const int triples = 10000;
  for (int t = 0; t < triples; ++t) {
    ProcTimeFn f = ProcTimeFn::capped_inverse(Rational(1), Rational(1));
    switch (t % 3) {
      case 0: f = ProcTimeFn::capped_inverse(positive(40, 8), positive(16, 8)); break;
      case 1: f = ProcTimeFn::amdahl(positive(40, 8), Rational(pick(0, 8), 8)); break;
      default: f = ProcTimeFn::power_law(positive(40, 8), Rational(pick(1, 8), 8)); break;
    }
    if (!f.is_exact()) ++approximate;
    const Rational q = positive(64, 8);
    const long den = pick(2, 16);
    const Rational alpha(pick(1, den - 1), den);
    const Rational fq = f(q);
    const Rational fa = f(alpha * q);
    const std::string tag = f.family_name() + " q=" + str(q) + " alpha=" + str(alpha);
    log.expect(fa <= fq / alpha, tag + ": f(alpha q) > f(q)/alpha");
    const Rational qp = alpha * q;  // q' <= q
    log.expect(fa <= (q / qp) * fq, tag + ": f(q') > (q/q') f(q)");
    log.expect(fa >= fq, tag + ": f increased with speed");
  }
  return finish(log, std::to_string(triples) + " triples (" + std::to_string(approximate) +
                         " on power laws with non-unit exponent)");
}

// ---------------------------------------------------------------------------

Outcome pnorm() {
  Log log;
  const auto one = pnorm_threshold(SpeedNorm::additive());
  log.expect(one.beta == Rational(1, 2), "beta*(1) = " + str(one.beta));
  log.expect(one.ratio == 4.0L, "bound(1) = " + std::to_string(static_cast<double>(one.ratio)));
  const auto via_finite = pnorm_threshold(SpeedNorm::finite(Rational(1)));
  log.expect(via_finite.beta == Rational(1, 2), "beta*(p=1 as finite) = " + str(via_finite.beta));

  long double prev = std::numeric_limits<long double>::infinity();
  std::ostringstream bounds;
  for (long p : {1L, 2L, 4L, 8L, 16L, 64L}) {
    const long double b = pnorm_threshold(SpeedNorm::finite(Rational(p))).ratio;
    bounds << ' ' << p << ':' << static_cast<double>(b);
    log.expect(b < prev, "bound not strictly decreasing at p=" + std::to_string(p));
    log.expect(b > 2, "bound at p=" + std::to_string(p) + " not above 2");
    if (p >= 2) {
      const long double pl = static_cast<long double>(p), lp = std::log(pl);
      const long double closed = pl / (pl - lp) + std::pow(pl / lp, 1 / pl);
      log.expect(b <= closed + 1e-9L, "bound at p=" + std::to_string(p) + " above the closed form");
    }
    prev = b;
  }

  std::size_t runs = 0;
  long double worst = 0;
  for (long p : {2L, 4L})
    for (std::size_t i = 0; i < 30; ++i) {
      const std::size_t m = 1 + i % 4, n = 1 + (i / 4) % 5;
      auto inst = random_instance(9000 + i + 100 * p, m, n, Variant::Unrelated);
      inst.norm = SpeedNorm::finite(Rational(p));
      SearchConfig cfg;
      cfg.scheme = Scheme::PNorm;
      const auto r = minimize_makespan(inst, cfg);
      ++runs;
      const long double ratio = to_long_double(r.decision.schedule.makespan() / r.C_found);
      worst = std::max(worst, ratio / r.rho);
      const std::string tag = "p=" + std::to_string(p) + " seed " + std::to_string(9000 + i + 100 * p);
      log.expect(ratio <= r.rho * (1 + 1e-9L), tag + ": ratio " + std::to_string(static_cast<double>(ratio)));
      log.expect(verify_schedule(inst, r.decision.schedule).empty(), tag + ": schedule fails verification");
    }
  std::ostringstream s;
  s << "bounds" << bounds.str() << "; " << runs << " instances, worst ratio/bound " << static_cast<double>(worst);
  return finish(log, s.str());
}

// ---------------------------------------------------------------------------

Outcome weighted() {
  Log log;
  const long double bound = 16 * 3.1632L;
  const fs::path dir = fs::temp_directory_path() / "msched_acceptance_weighted";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::size_t instances = 0, with_oracle = 0;
  long double worst_lp = 0, worst_opt = 0;
  for (std::size_t i = 0; i < 60; ++i) {
    RandomSpec spec;
    spec.seed = 7000 + i;
    spec.machines = 1 + i % 4;
    spec.jobs = 1 + (i / 4) % 4;
    spec.weights = true;
    spec.family = i % 2 ? FnFamily::Amdahl : FnFamily::CappedInverse;
    spec.variant = variant_of(i / 2);
    const auto inst = with_unit_floor(gen_random(spec));
    save_instance((dir / ("w" + std::to_string(spec.seed) + ".json")).string(), inst);
    const auto r = solve_weighted(inst);
    ++instances;
    const std::string tag = "seed " + std::to_string(spec.seed);
    log.expect(verify_schedule(inst, r.schedule).empty(), tag + ": schedule fails verification");
    const long double vs_lp = to_long_double(r.objective / r.plan.lp_objective());
    worst_lp = std::max(worst_lp, vs_lp);
    log.expect(vs_lp <= bound, tag + ": objective/LP " + std::to_string(static_cast<double>(vs_lp)));
    try {
      const Rational opt = brute_force_weighted(inst).value;
      ++with_oracle;
      const long double vs_opt = to_long_double(r.objective / opt);
      worst_opt = std::max(worst_opt, vs_opt);
      log.expect(r.objective >= opt, tag + ": objective below the oracle");
      log.expect(r.plan.lp_objective() <= opt, tag + ": LP above the oracle");
      log.expect(vs_opt <= bound, tag + ": objective/OPT " + std::to_string(static_cast<double>(vs_opt)));
    } catch (const BudgetExceeded&) {
    }
  }

  // The bench CSV carries the per-instance ratios and their maximum.
  std::ostringstream out, err;
  const int code = cli::run({"bench", "--dir", dir.string(), "--objective", "weighted", "--schemes", "filtered",
                             "--csv", "weighted_bench.csv"},
                            out, err);
  log.expect(code == 0, "bench exited " + std::to_string(code) + ": " + err.str());
  fs::remove_all(dir);

  std::ostringstream s;
  s << instances << " instances (" << with_oracle << " with oracle); max objective/LP " << static_cast<double>(worst_lp)
    << ", max objective/OPT " << static_cast<double>(worst_opt) << ", bound " << static_cast<double>(bound)
    << "; weighted_bench.csv";
  return finish(log, s.str());
}

// ---------------------------------------------------------------------------

// Optimal non-malleable makespan by enumerating every job-to-machine map.
long nonmalleable_optimum(const Matrix<int>& p) {
  const auto m = p.rows(), n = p.cols();
  long best = std::numeric_limits<long>::max();
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n), 0);
  while (true) {
    std::vector<long> load(static_cast<std::size_t>(m), 0);
    for (Eigen::Index j = 0; j < n; ++j) load[static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])] += p(pick[static_cast<std::size_t>(j)], j);
    best = std::min(best, *std::max_element(load.begin(), load.end()));
    std::size_t j = 0;
    while (j < pick.size() && ++pick[j] == m) pick[j++] = 0;
    if (j == pick.size()) return best;
  }
}

Outcome nonmalleable() {
  Log log;
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> entry(1, 4);
  for (int t = 0; t < 20; ++t) {
    const int size = t < 10 ? 2 : 3;
    Matrix<int> p(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) p(i, j) = entry(rng);
    const auto inst = from_nonmalleable(p);
    const std::string tag = "matrix " + std::to_string(t);
    for (std::size_t i = 0; i < inst.machines(); ++i)
      for (std::size_t j = 0; j < inst.jobs(); ++j) {
        const long double f = to_long_double(processing_time(inst, j, std::vector<std::size_t>{i}));
        log.expect(std::abs(f - p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) <= 1e-9L,
                   tag + ": f_j({i}) off at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    const auto opt = brute_force_makespan(inst);
    const long rounded = std::lround(static_cast<double>(to_long_double(opt.value)));
    const long direct = nonmalleable_optimum(p);
    log.expect(rounded == direct, tag + ": malleable OPT " + to_decimal_string(opt.value) + " vs " + std::to_string(direct));
  }
  return finish(log, "10 matrices 2x2, 10 matrices 3x3");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gap-family golden values", gap_values},
      {"ratio bounds", ratio_bounds},
      {"oracle comparison", oracle_comparison},
      {"extreme-point structure", structure},
      {"processing-time properties", fact_one},
      {"p-norm", pnorm},
      {"weighted objective", weighted},
      {"non-malleable transformation", nonmalleable},
  };
  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c + 1 << " " << criteria[c].first << ": " << o.detail << " ("
              << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)" << std::defaultfloat << std::endl;
  }
  return all ? 0 : 1;
}
