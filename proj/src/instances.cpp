#include "msched/instances.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace msched {

using nlohmann::json;

Rational default_phi() { return Rational(121393, 75025); }

Instance gen_gap_unrelated(unsigned k, const Rational& phi) {
  if (k < 1) throw DomainError("gap family needs k >= 1");
  if (phi <= 1 || phi >= 2) throw DomainError("phi approximation must lie in (1, 2)");
  const std::size_t m = 3 * k, n = 2 * k + 1;
  MatrixQ s = MatrixQ::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<ProcTimeFn> fns;
  for (std::size_t j = 0; j < 2 * k; ++j) {
    s(static_cast<Eigen::Index>(j / 2), static_cast<Eigen::Index>(j)) = 2 / phi;
    s(static_cast<Eigen::Index>(k + j), static_cast<Eigen::Index>(j)) = 2 - phi;
    fns.push_back(ProcTimeFn::capped_inverse(Rational(1), phi / 2));
  }
  for (std::size_t i = 0; i < k; ++i) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k)) = 1;
  fns.push_back(ProcTimeFn::capped_inverse(Rational(1), Rational(1)));
  return make_unrelated(std::move(s), std::move(fns));
}

Instance gen_gap_restricted(unsigned k) {
  if (k < 1) throw DomainError("gap family needs k >= 1");
  const std::size_t m = 2 * k - 1, n = k;
  Matrix<int> e = Matrix<int>::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    e(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1;
    for (std::size_t i = k; i < m; ++i) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1;
  }
  std::vector<ProcTimeFn> fns(n, ProcTimeFn::capped_inverse(Rational(2), Rational(1)));
  return make_restricted(e, std::move(fns));
}

Instance gen_gap_uniform(unsigned k) {
  if (k < 1) throw DomainError("gap family needs k >= 1");
  std::vector<Rational> speeds(2 * k, Rational(1));
  speeds.resize(3 * k, Rational(2));
  std::vector<ProcTimeFn> fns(2 * k + 1, ProcTimeFn::capped_inverse(Rational(2), Rational(1)));
  return make_uniform(std::move(speeds), std::move(fns));
}

Instance from_nonmalleable(const Matrix<int>& p) {
  const auto m = static_cast<std::size_t>(p.rows()), n = static_cast<std::size_t>(p.cols());
  if (m == 0 || n == 0) throw DomainError("processing-time matrix is empty");
  if (p.minCoeff() < 1) throw DomainError("processing times must be positive integers");
  const unsigned pmax = static_cast<unsigned>(p.maxCoeff());
  const std::uint64_t K = std::uint64_t{pmax} * n * m;
  if (K > kMaxNonmalleableExponent)
    throw BudgetExceeded("p_max * jobs * machines = " + std::to_string(K) + " exceeds " +
                         std::to_string(kMaxNonmalleableExponent) +
                         "; speed encodings grow as (p_max/p)^K, scale the times down first");
  MatrixQ s(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      s(i, j) = pow_int(Rational(pmax, static_cast<unsigned>(p(i, j))), static_cast<unsigned>(K));
  std::vector<ProcTimeFn> fns(
      n, ProcTimeFn::power_law(Rational(pmax), Rational(1, static_cast<unsigned>(K))));
  return make_unrelated(std::move(s), std::move(fns));
}

std::string to_string(FnFamily f) {
  switch (f) {
    case FnFamily::CappedInverse: return "capped_inverse";
    case FnFamily::Amdahl: return "amdahl";
    case FnFamily::PowerLaw: return "power_law";
  }
  return "capped_inverse";
}

FnFamily parse_fn_family(std::string_view text) {
  if (text == "capped_inverse") return FnFamily::CappedInverse;
  if (text == "amdahl") return FnFamily::Amdahl;
  if (text == "power_law") return FnFamily::PowerLaw;
  throw ParseError("unknown function family '" + std::string(text) + "'");
}

namespace {

struct Draw {
  std::mt19937_64 rng;
  long uniform(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
  // Integer speeds: with fractional ones an optimal schedule can use a total
  // speed below the integer critical speed, and LP(OPT) may then be infeasible.
  Rational speed(long lo, long hi) { return Rational(uniform(lo, hi)); }
};

ProcTimeFn random_fn(Draw& d, FnFamily family) {
  const Rational work(d.uniform(1, 24), d.uniform(1, 4));
  switch (family) {
    case FnFamily::CappedInverse: return ProcTimeFn::capped_inverse(work, Rational(d.uniform(1, 8), 8) * work / 4);
    case FnFamily::Amdahl: return ProcTimeFn::amdahl(work, Rational(d.uniform(0, 8), 8));
    case FnFamily::PowerLaw: {
      static const Rational exps[] = {Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(1)};
      return ProcTimeFn::power_law(work, exps[d.uniform(0, 3)]);
    }
  }
  return ProcTimeFn::capped_inverse(work, Rational(1));
}

}  // namespace

Instance gen_random(const RandomSpec& spec) {
  if (spec.machines < 1 || spec.jobs < 1) throw DomainError("random instance needs m, n >= 1");
  if (spec.machines > 64 || spec.jobs > 64) throw DomainError("random instance sizes are capped at 64");
  Draw d{std::mt19937_64(spec.seed)};
  const auto m = static_cast<Eigen::Index>(spec.machines), n = static_cast<Eigen::Index>(spec.jobs);
  std::vector<ProcTimeFn> fns;
  for (Eigen::Index j = 0; j < n; ++j) fns.push_back(random_fn(d, spec.family));

  Instance inst;
  if (spec.variant == Variant::Uniform) {
    std::vector<Rational> ms;
    for (Eigen::Index i = 0; i < m; ++i) ms.push_back(d.speed(1, 10));
    inst = make_uniform(std::move(ms), std::move(fns));
  } else {
    MatrixQ s = MatrixQ::Zero(m, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      bool any = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        const bool on = d.uniform(0, 4) != 0;
        if (!on) continue;
        s(i, j) = spec.variant == Variant::Restricted ? Rational(1) : d.speed(1, 10);
        any = true;
      }
      if (!any) {
        const auto i = d.uniform(0, m - 1);
        s(i, j) = spec.variant == Variant::Restricted ? Rational(1) : d.speed(1, 10);
      }
    }
    if (spec.variant == Variant::Restricted) {
      Matrix<int> e = s.unaryExpr([](const Rational& v) { return v != 0 ? 1 : 0; });
      inst = make_restricted(e, std::move(fns));
    } else {
      inst = make_unrelated(std::move(s), std::move(fns));
    }
  }
  if (spec.weights) {
    inst.weights.emplace();
    for (Eigen::Index j = 0; j < n; ++j) inst.weights->push_back(Rational(d.uniform(1, 5)));
  }
  return inst;
}

Instance with_unit_floor(const Instance& inst) {
  Instance out = inst;
  const auto all = inst.all_machines();
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const Rational t = processing_time(inst, j, all);
    if (t < 1) out.functions[j] = inst.functions[j].scaled(1 / t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

std::string q(const Rational& v) { return to_fraction_string(v); }

nlohmann::ordered_json fn_to_json(const ProcTimeFn& fn) {
  using ojson = nlohmann::ordered_json;
  return std::visit(
      [](const auto& f) -> ojson {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, CappedInverse>)
          return {{"family", "capped_inverse"}, {"work", q(f.work)}, {"floor", q(f.floor)}};
        else if constexpr (std::is_same_v<F, PowerLaw>)
          return {{"family", "power_law"}, {"work", q(f.work)}, {"exponent", q(f.exponent)}};
        else if constexpr (std::is_same_v<F, Amdahl>)
          return {{"family", "amdahl"}, {"work", q(f.work)}, {"parallel_fraction", q(f.parallel_fraction)}};
        else {
          ojson steps = ojson::array();
          for (const auto& [s, v] : f.steps) steps.push_back({q(s), q(v)});
          return {{"family", "table"}, {"steps", steps}};
        }
      },
      fn.family());
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

Rational rational_at(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) return parse_rational(v.dump());
  } catch (const ParseError& e) {
    fail(where, e.what());
  }
  fail(where, "expected a rational (\"num/den\" string or number)");
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t count_at(const json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    fail(where, "expected a non-negative integer");
  return v.get<std::size_t>();
}

ProcTimeFn fn_from_json(const json& f, const std::string& where) {
  const json& fam = field(f, "family", where);
  if (!fam.is_string()) fail(where + ".family", "expected a string");
  const auto name = fam.get<std::string>();
  try {
    if (name == "capped_inverse")
      return ProcTimeFn::capped_inverse(rational_at(field(f, "work", where), where + ".work"),
                                        rational_at(field(f, "floor", where), where + ".floor"));
    if (name == "power_law")
      return ProcTimeFn::power_law(rational_at(field(f, "work", where), where + ".work"),
                                   rational_at(field(f, "exponent", where), where + ".exponent"));
    if (name == "amdahl")
      return ProcTimeFn::amdahl(
          rational_at(field(f, "work", where), where + ".work"),
          rational_at(field(f, "parallel_fraction", where), where + ".parallel_fraction"));
    if (name == "table") {
      const json& steps = field(f, "steps", where);
      if (!steps.is_array()) fail(where + ".steps", "expected an array");
      std::vector<std::pair<Rational, Rational>> out;
      for (std::size_t k = 0; k < steps.size(); ++k) {
        const std::string w = where + ".steps[" + std::to_string(k) + "]";
        if (!steps[k].is_array() || steps[k].size() != 2) fail(w, "expected [speed, value]");
        out.emplace_back(rational_at(steps[k][0], w + "[0]"), rational_at(steps[k][1], w + "[1]"));
      }
      return ProcTimeFn::table(std::move(out));
    }
  } catch (const DomainError& e) {
    fail(where, e.what());
  }
  fail(where + ".family", "unknown family '" + name + "'");
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
}

}  // namespace

std::string instance_to_json(const Instance& inst) {
  nlohmann::ordered_json j;
  j["machines"] = inst.machines();
  j["jobs"] = inst.jobs();
  j["variant"] = to_string(inst.variant);
  j["p"] = to_string(inst.norm);
  auto speeds = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < inst.machines(); ++i)
    for (std::size_t jj = 0; jj < inst.jobs(); ++jj) speeds.push_back(q(inst.speed(i, jj)));
  j["speeds"] = std::move(speeds);
  if (inst.variant == Variant::Uniform) {
    auto ms = nlohmann::ordered_json::array();
    for (const auto& s : inst.machine_speeds) ms.push_back(q(s));
    j["machine_speeds"] = std::move(ms);
  }
  auto fns = nlohmann::ordered_json::array();
  for (const auto& f : inst.functions) fns.push_back(fn_to_json(f));
  j["functions"] = std::move(fns);
  if (inst.weights) {
    auto w = nlohmann::ordered_json::array();
    for (const auto& v : *inst.weights) w.push_back(q(v));
    j["weights"] = std::move(w);
  }
  return j.dump(2) + "\n";
}

Instance instance_from_json(std::string_view text) {
  const json doc = parse_json(text);
  const std::string root = "instance";
  const std::size_t m = count_at(field(doc, "machines", root), "machines");
  const std::size_t n = count_at(field(doc, "jobs", root), "jobs");
  Instance inst;
  if (doc.contains("variant")) {
    if (!doc["variant"].is_string()) fail("variant", "expected a string");
    try {
      inst.variant = parse_variant(doc["variant"].get<std::string>());
    } catch (const ParseError& e) {
      fail("variant", e.what());
    }
  }
  if (doc.contains("p")) {
    try {
      const auto& p = doc["p"];
      inst.norm = p.is_string() ? parse_norm(p.get<std::string>())
                                : SpeedNorm::finite(rational_at(p, "p"));
    } catch (const DomainError& e) {
      fail("p", e.what());
    }
  }
  const json& fns = field(doc, "functions", root);
  if (!fns.is_array() || fns.size() != n) fail("functions", "expected an array of " + std::to_string(n) + " entries");
  for (std::size_t k = 0; k < n; ++k) inst.functions.push_back(fn_from_json(fns[k], "functions[" + std::to_string(k) + "]"));

  if (inst.variant == Variant::Uniform && doc.contains("machine_speeds")) {
    const json& ms = doc["machine_speeds"];
    if (!ms.is_array() || ms.size() != m) fail("machine_speeds", "expected " + std::to_string(m) + " entries");
    for (std::size_t i = 0; i < m; ++i) inst.machine_speeds.push_back(rational_at(ms[i], "machine_speeds[" + std::to_string(i) + "]"));
  }
  inst.speeds.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  if (doc.contains("speeds")) {
    const json& sp = doc["speeds"];
    if (!sp.is_array() || sp.size() != m * n)
      fail("speeds", "expected a row-major array of " + std::to_string(m * n) + " entries");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        inst.speeds(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            rational_at(sp[i * n + j], "speeds[" + std::to_string(i * n + j) + "]");
  } else if (inst.variant == Variant::Uniform && inst.machine_speeds.size() == m) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        inst.speeds(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inst.machine_speeds[i];
  } else {
    fail(root, "missing field 'speeds'");
  }
  if (inst.variant == Variant::Uniform && inst.machine_speeds.empty())
    for (std::size_t i = 0; i < m; ++i)
      inst.machine_speeds.push_back(n ? inst.speed(i, 0) : Rational(1));
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    if (!w.is_array() || w.size() != n) fail("weights", "expected " + std::to_string(n) + " entries");
    inst.weights.emplace();
    for (std::size_t j = 0; j < n; ++j) inst.weights->push_back(rational_at(w[j], "weights[" + std::to_string(j) + "]"));
  }
  inst.validate();
  return inst;
}

std::string schedule_to_json(const Schedule& s) {
  std::vector<const Placement*> sorted;
  for (const auto& p : s.placements) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto a, auto b) { return a->job < b->job; });
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto* p : sorted)
    j[std::to_string(p->job)] = {{"machines", p->machines}, {"start", q(p->start)}, {"completion", q(p->completion)}};
  return j.dump(2) + "\n";
}

Schedule schedule_from_json(std::string_view text, const Instance& inst) {
  const json doc = parse_json(text);
  if (!doc.is_object()) fail("schedule", "expected an object keyed by job index");
  Schedule s;
  for (const auto& [key, rec] : doc.items()) {
    const std::string where = "schedule[" + key + "]";
    Placement p;
    try {
      std::size_t used = 0;
      p.job = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      fail(where, "job key must be a non-negative integer");
    }
    const json& ms = field(rec, "machines", where);
    if (!ms.is_array()) fail(where + ".machines", "expected an array");
    for (const auto& v : ms) p.machines.push_back(count_at(v, where + ".machines"));
    std::sort(p.machines.begin(), p.machines.end());
    p.start = rational_at(field(rec, "start", where), where + ".start");
    if (rec.contains("completion")) {
      p.completion = rational_at(rec["completion"], where + ".completion");
    } else {
      bool ok = p.job < inst.jobs() && !p.machines.empty();
      for (auto i : p.machines) ok = ok && i < inst.machines() && inst.allowed(i, p.job);
      p.completion = ok ? p.start + processing_time(inst, p.job, p.machines) : p.start;
    }
    s.placements.push_back(std::move(p));
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

void save_instance(const std::string& path, const Instance& inst) { write_file(path, instance_to_json(inst)); }
Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}
Schedule load_schedule(const std::string& path, const Instance& inst) {
  try {
    return schedule_from_json(read_file(path), inst);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}
void save_schedule(const std::string& path, const Schedule& s) { write_file(path, schedule_to_json(s)); }

}  // namespace msched
