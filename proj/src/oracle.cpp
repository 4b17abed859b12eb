#include "msched/oracle.hpp"

#include <algorithm>
#include <limits>

#include "msched/lp.hpp"
#include "msched/search.hpp"

namespace msched {

std::vector<std::vector<std::size_t>> candidate_sets(const Instance& inst, std::size_t job) {
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < inst.machines(); ++i)
    if (inst.allowed(i, job)) allowed.push_back(i);
  if (allowed.size() > 20) throw BudgetExceeded("too many eligible machines to enumerate sets");

  const std::uint32_t full = (1u << allowed.size());
  std::vector<std::optional<Rational>> time(full);
  auto members = [&](std::uint32_t mask) {
    std::vector<std::size_t> s;
    for (std::size_t b = 0; b < allowed.size(); ++b)
      if (mask & (1u << b)) s.push_back(allowed[b]);
    return s;
  };
  for (std::uint32_t mask = 1; mask < full; ++mask) time[mask] = processing_time(inst, job, members(mask));

  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    bool dominated = false;
    for (std::size_t b = 0; b < allowed.size() && !dominated; ++b) {
      const std::uint32_t sub = mask & ~(1u << b);
      dominated = sub != mask && sub != 0 && *time[sub] <= *time[mask];
    }
    if (!dominated) out.push_back(members(mask));
  }
  return out;
}

std::uint64_t oracle_combinations(const Instance& inst) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  auto mul = [&](std::uint64_t f) { total = (f != 0 && total > kMax / f) ? kMax : total * f; };
  for (std::size_t j = 1; j <= inst.jobs(); ++j) mul(j);
  for (std::size_t j = 0; j < inst.jobs(); ++j) mul(candidate_sets(inst, j).size());
  return total;
}

namespace {

struct Option {
  std::vector<std::size_t> machines;
  Rational time;
};

class Search {
public:
  Search(const Instance& inst, bool weighted) : inst_(inst), weighted_(weighted) {
    for (std::size_t j = 0; j < inst.jobs(); ++j) {
      std::vector<Option> opts;
      for (auto& s : candidate_sets(inst, j)) {
        Rational t = processing_time(inst, j, s);
        opts.push_back({std::move(s), std::move(t)});
      }
      // short options first so good incumbents appear early
      std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) { return a.time < b.time; });
      options_.push_back(std::move(opts));
    }
    // interchangeable machines share speed columns; identical jobs share a function and column
    for (std::size_t i = 0; i < inst.machines(); ++i) {
      std::size_t t = i;
      for (std::size_t a = 0; a < i && t == i; ++a)
        if (inst.speeds.row(static_cast<Eigen::Index>(a)) == inst.speeds.row(static_cast<Eigen::Index>(i))) t = a;
      machine_twin_.push_back(t);
    }
    for (std::size_t j = 0; j < inst.jobs(); ++j) {
      std::size_t t = j;
      for (std::size_t b = 0; b < j && t == j; ++b)
        if (inst.functions[b] == inst.functions[j] && inst.weight(b) == inst.weight(j) &&
            inst.speeds.col(static_cast<Eigen::Index>(b)) == inst.speeds.col(static_cast<Eigen::Index>(j)))
          t = b;
      job_twin_.push_back(t);
    }
    free_.assign(inst.machines(), Rational(0));
    placed_.assign(inst.jobs(), false);
    floor_ = weighted ? Rational(0) : makespan_bounds(inst).lower;
  }

  OracleResult run() {
    dfs(0, Rational(0));
    OracleResult r;
    r.value = *best_;
    r.witness = best_schedule_;
    r.nodes = nodes_;
    return r;
  }

private:
  void dfs(std::size_t depth, const Rational& value) {
    ++nodes_;
    if (done_) return;
    if (depth == inst_.jobs()) {
      if (!best_ || value < *best_) {
        best_ = value;
        best_schedule_.placements = current_;
        if (!weighted_ && value <= floor_) done_ = true;
      }
      return;
    }
    for (std::size_t j = 0; j < inst_.jobs(); ++j) {
      if (placed_[j] || !first_unplaced_twin(j)) continue;
      for (const Option& o : options_[j]) {
        if (!canonical(o.machines)) continue;
        Rational start(0);
        for (auto i : o.machines) start = std::max(start, free_[i]);
        const Rational end = start + o.time;
        const Rational next = weighted_ ? value + inst_.weight(j) * end : std::max(value, end);
        if (best_ && next >= *best_) continue;
        std::vector<Rational> saved;
        for (auto i : o.machines) {
          saved.push_back(free_[i]);
          free_[i] = end;
        }
        placed_[j] = true;
        current_.push_back(Placement{j, o.machines, start, end});
        dfs(depth + 1, next);
        current_.pop_back();
        placed_[j] = false;
        for (std::size_t k = 0; k < o.machines.size(); ++k) free_[o.machines[k]] = saved[k];
        if (done_) return;
      }
    }
  }

  // among identical jobs only the lowest unplaced one may go next
  bool first_unplaced_twin(std::size_t j) const {
    for (std::size_t b = 0; b < j; ++b)
      if (!placed_[b] && job_twin_[b] == job_twin_[j]) return false;
    return true;
  }

  // a set using machine i while an interchangeable lower machine with the
  // same free time stays unused has an isomorphic twin already explored
  bool canonical(const std::vector<std::size_t>& set) const {
    for (auto i : set)
      for (std::size_t a = 0; a < i; ++a)
        if (machine_twin_[a] == machine_twin_[i] && free_[a] == free_[i] &&
            !std::binary_search(set.begin(), set.end(), a))
          return false;
    return true;
  }

  const Instance& inst_;
  bool weighted_;
  std::vector<std::size_t> machine_twin_, job_twin_;
  std::vector<std::vector<Option>> options_;
  std::vector<Rational> free_;
  std::vector<bool> placed_;
  std::vector<Placement> current_;
  std::optional<Rational> best_;
  Schedule best_schedule_;
  Rational floor_;
  std::uint64_t nodes_ = 0;
  bool done_ = false;
};

OracleResult brute_force(const Instance& inst, const OracleBudget& budget, bool weighted) {
  if (budget.max_jobs == 0 || budget.max_machines == 0 || budget.max_combinations == 0)
    throw DomainError("oracle budgets must be positive");
  inst.validate();
  if (inst.jobs() > budget.max_jobs)
    throw BudgetExceeded("oracle: " + std::to_string(inst.jobs()) + " jobs exceed the budget of " +
                         std::to_string(budget.max_jobs));
  if (inst.machines() > budget.max_machines)
    throw BudgetExceeded("oracle: " + std::to_string(inst.machines()) +
                         " machines exceed the budget of " + std::to_string(budget.max_machines));
  const std::uint64_t combos = oracle_combinations(inst);
  if (combos > budget.max_combinations)
    throw BudgetExceeded("oracle: " + std::to_string(combos) + " combinations exceed the budget of " +
                         std::to_string(budget.max_combinations));
  OracleResult r = Search(inst, weighted).run();
  r.combinations = combos;
  return r;
}

}  // namespace

OracleResult brute_force_makespan(const Instance& inst, const OracleBudget& budget) {
  return brute_force(inst, budget, false);
}

OracleResult brute_force_weighted(const Instance& inst, const OracleBudget& budget) {
  return brute_force(inst, budget, true);
}

namespace {

const Rational& exactness_probe() {
  static const Rational eps(1, 1000000000);
  return eps;
}

}  // namespace

ThresholdResult min_feasible_C(const Instance& inst, std::vector<Rational> candidates,
                               const SpeedNorm& norm, const ProbeHook& hook) {
  auto lp_feasible = [&](const Instance& in, const Rational& C, const SpeedNorm& nm) {
    return probe(in, C, nm, hook).has_value();
  };
  const Rational lb = makespan_bounds(inst).lower;
  ThresholdResult r;
  ++r.probes;
  if (lp_feasible(inst, lb, norm)) {
    r.lower = r.upper = lb;
    r.exact = true;
    return r;
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(), [&](const Rational& c) { return c <= lb; }),
                   candidates.end());
  std::size_t lo = 0, hi = candidates.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ++r.probes;
    if (lp_feasible(inst, candidates[mid], norm))
      hi = mid;
    else
      lo = mid + 1;
  }
  if (hi == candidates.size()) throw DomainError("no candidate value is LP-feasible");
  const Rational c = candidates[hi];
  const Rational below = hi > 0 ? candidates[hi - 1] : lb;
  const Rational probe = c - exactness_probe();
  r.upper = c;
  if (probe <= below) {
    r.lower = below;
    r.exact = false;
    return r;
  }
  ++r.probes;
  if (!lp_feasible(inst, probe, norm)) {
    r.lower = probe;
    r.exact = true;
    return r;
  }
  // threshold strictly inside (below, probe]: bracket it to the probe width
  Rational l = below, h = probe;
  while (h - l > exactness_probe()) {
    const Rational mid = (l + h) / 2;
    ++r.probes;
    if (lp_feasible(inst, mid, norm))
      h = mid;
    else
      l = mid;
  }
  r.lower = l;
  r.upper = h;
  return r;
}

ThresholdResult min_feasible_C(const Instance& inst, const Rational& eps, const SpeedNorm& norm,
                               const ProbeHook& hook) {
  auto lp_feasible = [&](const Instance& in, const Rational& C, const SpeedNorm& nm) {
    return probe(in, C, nm, hook).has_value();
  };
  if (eps <= 0 || eps >= 1) throw DomainError("precision must lie in (0, 1)");
  const Bounds b = makespan_bounds(inst);
  ThresholdResult r;
  ++r.probes;
  if (lp_feasible(inst, b.lower, norm)) {
    r.lower = r.upper = b.lower;
    r.exact = true;
    return r;
  }
  Rational l = b.lower, h = b.upper;
  ++r.probes;
  for (int k = 0; !lp_feasible(inst, h, norm); ++k, ++r.probes) {
    if (k == 64) throw InternalError("LP infeasible far above the serial upper bound");
    l = h;
    h *= 2;
  }
  while (h - l > eps * l) {
    const Rational mid = (l + h) / 2;
    ++r.probes;
    if (lp_feasible(inst, mid, norm))
      h = mid;
    else
      l = mid;
  }
  r.lower = l;
  r.upper = h;
  return r;
}

std::vector<Rational> farey_candidates(const Rational& lo, const Rational& hi, unsigned max_den) {
  if (max_den == 0) throw DomainError("denominator bound must be positive");
  std::vector<Rational> out;
  for (unsigned b = 1; b <= max_den; ++b) {
    const Integer first = ceil_integer(lo * b), last = floor_integer(hi * b);
    for (Integer a = first; a <= last; ++a) out.emplace_back(a, Integer(b));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace msched
