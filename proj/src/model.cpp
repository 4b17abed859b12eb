#include "msched/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace msched {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// s^a for rational a = u/v in (0, 1]: exact when s is a perfect v-th power.
Rational power_exact_or_approx(const Rational& s, const Rational& a) {
  const Integer u = boost::multiprecision::numerator(a);
  const Integer v = boost::multiprecision::denominator(a);
  if (v <= 4096) {
    if (auto root = exact_root(s, v.convert_to<unsigned>()))
      return pow_int(*root, u.convert_to<unsigned>());
  }
  return from_long_double(std::pow(to_long_double(s), to_long_double(a)));
}

}  // namespace

ProcTimeFn ProcTimeFn::capped_inverse(Rational work, Rational floor) {
  if (work <= 0 || floor <= 0)
    throw DomainError("CappedInverse requires work > 0 and floor > 0");
  return ProcTimeFn(CappedInverse{std::move(work), std::move(floor)});
}

ProcTimeFn ProcTimeFn::power_law(Rational work, Rational exponent) {
  if (work <= 0) throw DomainError("PowerLaw requires work > 0");
  if (exponent <= 0 || exponent > 1)
    throw DomainError("PowerLaw exponent must lie in (0, 1]; got " +
                      to_fraction_string(exponent) + " (work would not be non-decreasing)");
  return ProcTimeFn(PowerLaw{std::move(work), std::move(exponent)});
}

ProcTimeFn ProcTimeFn::amdahl(Rational work, Rational parallel_fraction) {
  if (work <= 0) throw DomainError("Amdahl requires work > 0");
  if (parallel_fraction < 0 || parallel_fraction > 1)
    throw DomainError("Amdahl parallel fraction must lie in [0, 1]");
  return ProcTimeFn(Amdahl{std::move(work), std::move(parallel_fraction)});
}

ProcTimeFn ProcTimeFn::table(std::vector<std::pair<Rational, Rational>> steps) {
  if (steps.empty()) throw DomainError("StepTable needs at least one breakpoint");
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].first <= 0) throw DomainError("StepTable breakpoints must be positive");
    if (k > 0 && steps[k].first <= steps[k - 1].first)
      throw DomainError("StepTable breakpoints must be strictly increasing");
  }
  return ProcTimeFn(StepTable{std::move(steps)});
}

Rational ProcTimeFn::operator()(const Rational& speed) const {
  if (speed <= 0) throw DomainError("processing time requested at non-positive speed");
  return std::visit(
      overloaded{
          [&](const CappedInverse& f) -> Rational {
            Rational v = f.work / speed;
            return v < f.floor ? f.floor : v;
          },
          [&](const PowerLaw& f) -> Rational {
            if (f.exponent == 1) return f.work / speed;
            return f.work / power_exact_or_approx(speed, f.exponent);
          },
          [&](const Amdahl& f) -> Rational {
            return f.work * ((1 - f.parallel_fraction) + f.parallel_fraction / speed);
          },
          [&](const StepTable& f) -> Rational {
            auto it = std::upper_bound(
                f.steps.begin(), f.steps.end(), speed,
                [](const Rational& s, const auto& step) { return s < step.first; });
            if (it == f.steps.begin()) return f.steps.front().second;
            return std::prev(it)->second;
          },
      },
      family_);
}

std::string ProcTimeFn::family_name() const {
  return std::visit(overloaded{
                        [](const CappedInverse&) { return std::string("capped_inverse"); },
                        [](const PowerLaw&) { return std::string("power_law"); },
                        [](const Amdahl&) { return std::string("amdahl"); },
                        [](const StepTable&) { return std::string("table"); },
                    },
                    family_);
}

bool ProcTimeFn::is_exact() const {
  if (const auto* p = std::get_if<PowerLaw>(&family_)) return p->exponent == 1;
  return true;
}

ProcTimeFn ProcTimeFn::scaled(const Rational& factor) const {
  if (factor <= 0) throw DomainError("time scaling factor must be positive");
  return std::visit(
      overloaded{
          [&](const CappedInverse& f) { return capped_inverse(f.work * factor, f.floor * factor); },
          [&](const PowerLaw& f) { return power_law(f.work * factor, f.exponent); },
          [&](const Amdahl& f) { return amdahl(f.work * factor, f.parallel_fraction); },
          [&](const StepTable& f) {
            auto steps = f.steps;
            for (auto& s : steps) s.second *= factor;
            return table(std::move(steps));
          },
      },
      family_);
}

bool operator==(const ProcTimeFn& a, const ProcTimeFn& b) {
  if (a.family_.index() != b.family_.index()) return false;
  return std::visit(
      overloaded{
          [&](const CappedInverse& f) {
            const auto& g = std::get<CappedInverse>(b.family_);
            return f.work == g.work && f.floor == g.floor;
          },
          [&](const PowerLaw& f) {
            const auto& g = std::get<PowerLaw>(b.family_);
            return f.work == g.work && f.exponent == g.exponent;
          },
          [&](const Amdahl& f) {
            const auto& g = std::get<Amdahl>(b.family_);
            return f.work == g.work && f.parallel_fraction == g.parallel_fraction;
          },
          [&](const StepTable& f) { return f.steps == std::get<StepTable>(b.family_).steps; },
      },
      a.family_);
}

Rational eval_proc_time(const ProcTimeFn& fn, const Rational& speed) { return fn(speed); }

std::string FnViolation::describe() const {
  std::ostringstream os;
  switch (property) {
    case Property::Positive: os << "non-positive processing time"; break;
    case Property::NonIncreasing: os << "processing time increases"; break;
    case Property::NonDecreasingWork: os << "work decreases"; break;
  }
  os << " between speeds " << to_fraction_string(lower_speed) << " and "
     << to_fraction_string(upper_speed);
  return os.str();
}

std::optional<FnViolation> validate_proc_fn(const ProcTimeFn& fn) {
  // The closed-form families satisfy both properties whenever their
  // constructor accepted the parameters.
  const auto* table = std::get_if<StepTable>(&fn.family());
  if (!table) return std::nullopt;
  const auto& steps = table->steps;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k].second <= 0)
      return FnViolation{FnViolation::Property::Positive, steps[k].first, steps[k].first};
    if (k == 0) continue;
    const auto& [s0, v0] = steps[k - 1];
    const auto& [s1, v1] = steps[k];
    if (v1 > v0) return FnViolation{FnViolation::Property::NonIncreasing, s0, s1};
    if (s1 * v1 < s0 * v0) return FnViolation{FnViolation::Property::NonDecreasingWork, s0, s1};
  }
  return std::nullopt;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Unrelated: return "unrelated";
    case Variant::Restricted: return "restricted";
    case Variant::Uniform: return "uniform";
  }
  return "unrelated";
}

Variant parse_variant(std::string_view text) {
  if (text == "unrelated") return Variant::Unrelated;
  if (text == "restricted") return Variant::Restricted;
  if (text == "uniform") return Variant::Uniform;
  throw ParseError("unknown variant '" + std::string(text) + "'");
}

void Instance::validate() const {
  const std::size_t m = machines();
  const std::size_t n = jobs();
  if (static_cast<std::size_t>(speeds.cols()) != n)
    throw ValidationError("speed matrix has " + std::to_string(speeds.cols()) +
                          " columns but there are " + std::to_string(n) + " jobs");
  for (std::size_t j = 0; j < n; ++j) {
    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (speed(i, j) < 0)
        throw ValidationError("negative speed at machine " + std::to_string(i) + ", job " +
                              std::to_string(j));
      any = any || speed(i, j) > 0;
    }
    if (!any) throw ValidationError("job " + std::to_string(j) + " has no machine with positive speed");
    if (auto v = validate_proc_fn(functions[j]))
      throw ValidationError("job " + std::to_string(j) + ": " + v->describe());
  }
  if (weights) {
    if (weights->size() != n) throw ValidationError("weight vector length differs from job count");
    for (const auto& w : *weights)
      if (w < 0) throw ValidationError("negative job weight");
  }
  if (norm.p && *norm.p < 1) throw ValidationError("speed regularizer p must be >= 1");
  if (variant == Variant::Restricted) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (speed(i, j) != 0 && speed(i, j) != 1)
          throw ValidationError("restricted instance has a speed outside {0, 1}");
  }
  if (variant == Variant::Uniform) {
    if (machine_speeds.size() != m)
      throw ValidationError("uniform instance needs one speed per machine");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (speed(i, j) != machine_speeds[i])
          throw ValidationError("uniform instance speed matrix disagrees with machine speeds");
  }
}

Instance Instance::subinstance(std::span<const std::size_t> job_ids) const {
  Instance sub;
  sub.speeds.resize(speeds.rows(), static_cast<Eigen::Index>(job_ids.size()));
  for (std::size_t k = 0; k < job_ids.size(); ++k) {
    sub.speeds.col(static_cast<Eigen::Index>(k)) = speeds.col(static_cast<Eigen::Index>(job_ids[k]));
    sub.functions.push_back(functions[job_ids[k]]);
  }
  if (weights) {
    sub.weights.emplace();
    for (auto j : job_ids) sub.weights->push_back((*weights)[j]);
  }
  sub.norm = norm;
  sub.variant = variant;
  sub.machine_speeds = machine_speeds;
  return sub;
}

std::vector<std::size_t> Instance::all_machines() const {
  std::vector<std::size_t> all(machines());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

Instance make_unrelated(MatrixQ speeds, std::vector<ProcTimeFn> functions) {
  Instance inst;
  inst.speeds = std::move(speeds);
  inst.functions = std::move(functions);
  inst.validate();
  return inst;
}

Instance make_restricted(const Matrix<int>& eligible, std::vector<ProcTimeFn> functions) {
  Instance inst;
  inst.speeds = eligible.cast<Rational>();
  inst.functions = std::move(functions);
  inst.variant = Variant::Restricted;
  inst.validate();
  return inst;
}

Instance make_uniform(std::vector<Rational> machine_speeds, std::vector<ProcTimeFn> functions) {
  Instance inst;
  const auto m = static_cast<Eigen::Index>(machine_speeds.size());
  const auto n = static_cast<Eigen::Index>(functions.size());
  inst.speeds.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inst.speeds(i, j) = machine_speeds[static_cast<std::size_t>(i)];
  inst.functions = std::move(functions);
  inst.machine_speeds = std::move(machine_speeds);
  inst.variant = Variant::Uniform;
  inst.validate();
  return inst;
}

Rational effective_speed(std::span<const Rational> speeds, const SpeedNorm& norm) {
  Rational total = 0;
  if (norm.is_infinite()) {
    for (const auto& s : speeds) total = s > total ? s : total;
    return total;
  }
  if (norm.is_additive()) {
    for (const auto& s : speeds) total += s;
    return total;
  }
  if (auto k = norm.integer_exponent()) {
    for (const auto& s : speeds) total += pow_int(s, *k);
    if (auto root = exact_root(total, *k)) return *root;
    return from_long_double(std::pow(to_long_double(total), 1.0L / static_cast<long double>(*k)));
  }
  const long double p = to_long_double(*norm.p);
  long double acc = 0;
  for (const auto& s : speeds) acc += std::pow(to_long_double(s), p);
  return from_long_double(std::pow(acc, 1.0L / p));
}

Rational effective_speed(const Instance& inst, std::size_t job,
                         std::span<const std::size_t> machines, const SpeedNorm& norm) {
  std::vector<Rational> s;
  s.reserve(machines.size());
  for (auto i : machines) s.push_back(inst.speed(i, job));
  return effective_speed(s, norm);
}

Rational processing_time(const Instance& inst, std::size_t job,
                         std::span<const std::size_t> machines) {
  const Rational sigma = effective_speed(inst, job, machines);
  if (sigma <= 0)
    throw DomainError("job " + std::to_string(job) + " allocated a machine set of zero speed");
  return inst.functions[job](sigma);
}

Placement place(const Instance& inst, std::size_t job, std::vector<std::size_t> machines,
                Rational start) {
  std::sort(machines.begin(), machines.end());
  Placement p;
  p.job = job;
  p.completion = start + processing_time(inst, job, machines);
  p.start = std::move(start);
  p.machines = std::move(machines);
  return p;
}

Rational Schedule::makespan() const {
  Rational best = 0;
  for (const auto& p : placements)
    if (p.completion > best) best = p.completion;
  return best;
}

const Placement* Schedule::find(std::size_t job) const {
  for (const auto& p : placements)
    if (p.job == job) return &p;
  return nullptr;
}

void Schedule::shift(const Rational& delta) {
  for (auto& p : placements) {
    p.start += delta;
    p.completion += delta;
  }
}

std::string ScheduleViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::UnknownJob: os << "unknown job " << job; break;
    case Kind::MissingJob: os << "job " << job << " is not scheduled"; break;
    case Kind::DuplicateJob: os << "job " << job << " is scheduled more than once"; break;
    case Kind::EmptyMachineSet: os << "job " << job << " has an empty machine set"; break;
    case Kind::InvalidMachine: os << "job " << job << " uses unknown machine " << *machine; break;
    case Kind::ForbiddenMachine:
      os << "job " << job << " uses machine " << *machine << " where its speed is zero";
      break;
    case Kind::NegativeStart: os << "job " << job << " starts before time 0"; break;
    case Kind::Duration:
      os << "job " << job << " runs for " << to_fraction_string(to - from)
         << " which differs from its processing time";
      break;
    case Kind::Overlap:
      os << "jobs " << job << " and " << *other_job << " overlap on machine " << *machine
         << " during [" << to_fraction_string(from) << ", " << to_fraction_string(to) << ")";
      break;
  }
  return os.str();
}

std::vector<ScheduleViolation> verify_schedule(const Instance& inst, const Schedule& schedule) {
  using Kind = ScheduleViolation::Kind;
  std::vector<ScheduleViolation> out;
  const std::size_t n = inst.jobs();
  const std::size_t m = inst.machines();
  std::vector<int> seen(n, 0);
  // machine -> indices into placements with a sane interval
  std::vector<std::vector<std::size_t>> on_machine(m);

  for (std::size_t k = 0; k < schedule.placements.size(); ++k) {
    const auto& p = schedule.placements[k];
    if (p.job >= n) {
      out.push_back({Kind::UnknownJob, p.job, {}, {}, p.start, p.completion});
      continue;
    }
    if (++seen[p.job] == 2) out.push_back({Kind::DuplicateJob, p.job, {}, {}, p.start, p.completion});
    if (p.machines.empty()) {
      out.push_back({Kind::EmptyMachineSet, p.job, {}, {}, p.start, p.completion});
      continue;
    }
    bool machines_ok = true;
    std::vector<std::size_t> distinct = p.machines;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (auto i : distinct) {
      if (i >= m) {
        out.push_back({Kind::InvalidMachine, p.job, {}, i, p.start, p.completion});
        machines_ok = false;
      } else if (!inst.allowed(i, p.job)) {
        out.push_back({Kind::ForbiddenMachine, p.job, {}, i, p.start, p.completion});
        machines_ok = false;
      }
    }
    if (p.start < 0) out.push_back({Kind::NegativeStart, p.job, {}, {}, p.start, p.completion});
    if (!machines_ok) continue;
    if (p.completion - p.start != processing_time(inst, p.job, distinct))
      out.push_back({Kind::Duration, p.job, {}, {}, p.start, p.completion});
    if (p.completion <= p.start) continue;
    for (auto i : distinct) on_machine[i].push_back(k);
  }

  for (std::size_t i = 0; i < m; ++i) {
    const auto& ks = on_machine[i];
    for (std::size_t a = 0; a < ks.size(); ++a) {
      for (std::size_t b = a + 1; b < ks.size(); ++b) {
        const auto& pa = schedule.placements[ks[a]];
        const auto& pb = schedule.placements[ks[b]];
        if (pa.start < pb.completion && pb.start < pa.completion) {
          const Rational from = pa.start > pb.start ? pa.start : pb.start;
          const Rational to = pa.completion < pb.completion ? pa.completion : pb.completion;
          out.push_back({Kind::Overlap, pa.job, pb.job, i, from, to});
        }
      }
    }
  }

  for (std::size_t j = 0; j < n; ++j)
    if (seen[j] == 0) out.push_back({Kind::MissingJob, j, {}, {}, Rational(0), Rational(0)});
  return out;
}

Objectives objectives(const Instance& inst, const Schedule& schedule) {
  Objectives o{Rational(0), Rational(0)};
  for (const auto& p : schedule.placements) {
    if (p.completion > o.makespan) o.makespan = p.completion;
    o.weighted_completion += inst.weight(p.job) * p.completion;
  }
  return o;
}

}  // namespace msched
