#include "msched/search.hpp"

#include <algorithm>
#include <cmath>

namespace msched {

Bounds makespan_bounds(const Instance& inst) {
  Bounds b{Rational(0), Rational(0)};
  const auto all = inst.all_machines();
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const Rational t = processing_time(inst, j, all);
    b.upper += t;
    if (t > b.lower) b.lower = t;
  }
  return b;
}

SpeedNorm scheme_norm(const Instance& inst, Scheme scheme) {
  if (scheme == Scheme::PNorm) {
    if (inst.norm.is_infinite()) throw DomainError("the p-norm scheme needs a finite p");
    return inst.norm;
  }
  if (!inst.norm.is_additive())
    throw DomainError("scheme '" + to_string(scheme) + "' needs p = 1; use the pnorm scheme");
  if (scheme == Scheme::Restricted && inst.variant != Variant::Restricted)
    throw DomainError("the restricted scheme needs a restricted-assignment instance");
  if (scheme == Scheme::Uniform && inst.variant != Variant::Uniform)
    throw DomainError("the uniform scheme needs a uniform-machine instance");
  return SpeedNorm::additive();
}

Decision round_point(const Instance& inst, const FractionalAssignment& fa, Scheme scheme) {
  Decision d;
  d.fa = scheme == Scheme::Uniform ? canonicalize_uniform(inst, fa, &d.canonical) : fa;
  d.forest = orient(d.fa.x);
  switch (scheme) {
    case Scheme::Simple: d.rounded = round_simple(inst, d.fa, d.forest); break;
    case Scheme::Filtered: d.rounded = round_filtered(inst, d.fa, d.forest, Rational(1, 2)); break;
    case Scheme::BetaTuned:
      d.rounded = round_filtered(inst, d.fa, d.forest, tuned_threshold().beta);
      d.rounded.scheme = Scheme::BetaTuned;
      break;
    case Scheme::Restricted: d.rounded = round_restricted(inst, d.fa, d.forest); break;
    case Scheme::Uniform: d.rounded = round_uniform(inst, d.fa, d.forest); break;
    case Scheme::PNorm: d.rounded = round_pnorm(inst, d.fa, d.forest); break;
  }
  d.schedule = assemble_schedule(inst, d.rounded);
  return d;
}

std::optional<Decision> decide(const Instance& inst, const Rational& C, Scheme scheme) {
  auto fa = solve_assignment(inst, C, scheme_norm(inst, scheme));
  if (!fa) return std::nullopt;
  return round_point(inst, *fa, scheme);
}

std::size_t bisection_cap(const Bounds& b, const Rational& eps) {
  if (b.upper <= b.lower) return 2;
  const long double ratio = to_long_double((b.upper - b.lower) / (eps * b.lower));
  return static_cast<std::size_t>(std::ceil(std::log2(std::max(ratio, 1.0L)))) + 2;
}

std::optional<FractionalAssignment> probe(const Instance& inst, const Rational& C, const SpeedNorm& norm,
                                          const ProbeHook& hook) {
  auto fa = solve_assignment(inst, C, norm);
  if (fa && hook) hook(*fa);
  return fa;
}

ThresholdSearch find_threshold(const Instance& inst, const SpeedNorm& norm, const Rational& eps,
                               const ProbeHook& hook) {
  if (eps <= 0 || eps >= 1) throw DomainError("search precision must lie in (0, 1)");
  const Bounds b = makespan_bounds(inst);
  ThresholdSearch out;
  ++out.probes;
  if (auto fa = probe(inst, b.lower, norm, hook)) {
    out.C = b.lower;
    out.fa = std::move(*fa);
    return out;
  }
  ++out.probes;
  Rational lo = b.lower, hi = b.upper;
  auto hi_fa = probe(inst, hi, norm, hook);
  // Only fractional speeds get here: the serial schedule's total speed can
  // fall short of the integer critical speed.
  for (int k = 0; !hi_fa && k < 64; ++k) {
    lo = hi;
    hi *= 2;
    ++out.probes;
    hi_fa = probe(inst, hi, norm, hook);
  }
  if (!hi_fa) throw InternalError("LP infeasible far above the serial upper bound");
  const std::size_t cap = bisection_cap(Bounds{lo, hi}, eps);
  for (std::size_t it = 0; it < cap && hi - lo > eps * lo; ++it) {
    const Rational mid = (lo + hi) / 2;
    ++out.probes;
    if (auto fa = probe(inst, mid, norm, hook)) {
      hi = mid;
      hi_fa = std::move(fa);
    } else {
      lo = mid;
    }
  }
  out.C = hi;
  out.fa = std::move(*hi_fa);
  return out;
}

ThresholdSearch find_threshold(const Instance& inst, const SpeedNorm& norm,
                               std::vector<Rational> candidates, const ProbeHook& hook) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.erase(std::remove_if(candidates.begin(), candidates.end(),
                                  [](const Rational& c) { return c <= 0; }),
                   candidates.end());
  ThresholdSearch out;
  // invariant: candidates[lo-1] infeasible (or lo == 0), candidates[hi] feasible (or hi == size)
  std::size_t lo = 0, hi = candidates.size();
  std::optional<FractionalAssignment> best;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    ++out.probes;
    if (auto fa = probe(inst, candidates[mid], norm, hook)) {
      hi = mid;
      best = std::move(fa);
    } else {
      lo = mid + 1;
    }
  }
  if (hi == candidates.size()) throw DomainError("no candidate value is LP-feasible");
  out.C = candidates[hi];
  out.fa = std::move(*best);
  return out;
}

SearchResult minimize_makespan(const Instance& inst, const SearchConfig& config) {
  const SpeedNorm norm = scheme_norm(inst, config.scheme);
  ThresholdSearch t = config.candidates ? find_threshold(inst, norm, *config.candidates, config.on_probe)
                                        : find_threshold(inst, norm, config.eps, config.on_probe);
  SearchResult r;
  r.C_found = t.C;
  r.probes = t.probes;
  r.rho = scheme_ratio(config.scheme, norm);
  r.decision = round_point(inst, t.fa, config.scheme);
  return r;
}

}  // namespace msched
