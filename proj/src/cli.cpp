#include "msched/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "msched/instances.hpp"
#include "msched/oracle.hpp"
#include "msched/search.hpp"
#include "msched/weighted.hpp"

namespace msched::cli {

namespace fs = std::filesystem;

unsigned thread_cap() {
  if (const char* env = std::getenv("MSCHED_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Runs body(0..n-1) on up to thread_cap() workers; rethrows the first
// failure by index so the outcome does not depend on scheduling.
void fan_out(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), n));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < n;) try {
            body(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string both(const Rational& q) { return to_fraction_string(q) + "," + to_decimal_string(q, 12); }

std::string decimal(long double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

Rational rational_flag(const std::string& text, const std::string& flag) {
  try {
    return parse_rational(text);
  } catch (const ParseError& e) {
    throw UsageError("--" + flag + ": " + e.what());
  }
}

std::pair<unsigned, unsigned> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  auto num = [&](const std::string& s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit) || s.size() > 6)
      throw UsageError("--k-range: expected a..b with positive integers, got '" + text + "'");
    return static_cast<unsigned>(std::stoul(s));
  };
  const unsigned a = num(text.substr(0, dots));
  const unsigned b = dots == std::string::npos ? a : num(text.substr(dots + 2));
  if (a < 1 || b < a) throw UsageError("--k-range: need 1 <= a <= b");
  return {a, b};
}

Matrix<int> parse_matrix(const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::stringstream rs(text);
  for (std::string row; std::getline(rs, row, ';');) {
    rows.emplace_back();
    std::stringstream cs(row);
    for (std::string cell; std::getline(cs, cell, ',');) {
      try {
        std::size_t used = 0;
        rows.back().push_back(std::stoi(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw UsageError("--matrix: malformed entry '" + cell + "'");
      }
    }
  }
  if (rows.empty() || rows[0].empty()) throw UsageError("--matrix: empty");
  Matrix<int> p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw UsageError("--matrix: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return p;
}

Instance gap_instance(const std::string& family, unsigned k, const std::optional<Rational>& phi) {
  if (family == "unrelated") return phi ? gen_gap_unrelated(k, *phi) : gen_gap_unrelated(k);
  if (family == "restricted") return gen_gap_restricted(k);
  if (family == "uniform") return gen_gap_uniform(k);
  throw UsageError("unknown gap family '" + family + "'");
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string instance, scheme = "filtered", p, objective = "makespan", eps = "1/1000000", out, report;
  std::string tau = "2", alpha = "2";
};

int do_solve(const SolveArgs& a, std::ostream& out) {
  Instance inst = load_instance(a.instance);
  if (!a.p.empty()) {
    try {
      inst.norm = parse_norm(a.p);
    } catch (const std::exception& e) {
      throw UsageError(std::string("--p: ") + e.what());
    }
    inst.validate();
  }
  Scheme scheme;
  try {
    scheme = parse_scheme(a.scheme);
  } catch (const ParseError& e) {
    throw UsageError(std::string("--scheme: ") + e.what());
  }

  Schedule schedule;
  std::ostringstream line;
  if (a.objective == "makespan") {
    SearchConfig cfg;
    cfg.eps = rational_flag(a.eps, "eps");
    cfg.scheme = scheme;
    const SearchResult r = minimize_makespan(inst, cfg);
    schedule = r.decision.schedule;
    const Rational mk = schedule.makespan();
    line << "scheme=" << to_string(scheme) << " objective=makespan C_found=" << to_fraction_string(r.C_found)
         << " (" << to_decimal_string(r.C_found, 12) << ") makespan=" << to_fraction_string(mk) << " ("
         << to_decimal_string(mk, 12) << ") rho=" << decimal(r.rho)
         << " ratio=" << to_decimal_string(mk / r.C_found, 12) << " probes=" << r.probes;
  } else if (a.objective == "weighted") {
    WeightedConfig cfg;
    cfg.tau = rational_flag(a.tau, "tau");
    cfg.alpha = rational_flag(a.alpha, "alpha");
    cfg.scheme = scheme;
    const WeightedResult r = solve_weighted(inst, cfg);
    schedule = r.schedule;
    const Rational& lp = r.plan.lp_objective();
    line << "scheme=" << to_string(scheme) << " objective=weighted lp_bound=" << to_fraction_string(lp) << " ("
         << to_decimal_string(lp, 12) << ") weighted_completion=" << to_fraction_string(r.objective) << " ("
         << to_decimal_string(r.objective, 12) << ") rho=" << decimal(r.rho)
         << " ratio=" << to_decimal_string(r.objective / lp, 12) << " buckets=" << r.runs.size();
    if (!a.report.empty()) write_file(a.report, weighted_report_csv(r));
  } else {
    throw UsageError("--objective must be makespan or weighted");
  }
  if (auto v = verify_schedule(inst, schedule); !v.empty())
    throw InternalError("produced schedule fails verification: " + v.front().describe());
  if (!a.out.empty()) save_schedule(a.out, schedule);
  out << line.str() << "\n";
  return kOk;
}

int do_verify(const std::string& instance, const std::string& schedule_path, std::ostream& out) {
  const Instance inst = load_instance(instance);
  const Schedule s = load_schedule(schedule_path, inst);
  const auto v = verify_schedule(inst, s);
  if (v.empty()) {
    const Objectives o = objectives(inst, s);
    out << "ok makespan=" << to_fraction_string(o.makespan) << " weighted_completion="
        << to_fraction_string(o.weighted_completion) << "\n";
    return kOk;
  }
  for (const auto& x : v) out << x.describe() << "\n";
  out << v.size() << (v.size() == 1 ? " violation\n" : " violations\n");
  return kVerifyFailed;
}

struct GapArgs {
  std::string family, range = "1..3", csv, phi;
  std::size_t oracle_jobs = 4, oracle_machines = 5;
  std::uint64_t oracle_combinations = 10'000'000;
};

int do_gap(const GapArgs& a, std::ostream& out) {
  const auto [k0, k1] = parse_range(a.range);
  std::optional<Rational> phi;
  if (!a.phi.empty()) phi = rational_flag(a.phi, "phi");
  if (a.family != "unrelated" && a.family != "restricted" && a.family != "uniform")
    throw UsageError("--family must be unrelated, restricted or uniform");
  const OracleBudget budget{a.oracle_jobs, a.oracle_machines, a.oracle_combinations};

  std::vector<std::string> rows(k1 - k0 + 1);
  fan_out(rows.size(), [&](std::size_t idx) {
    const unsigned k = k0 + static_cast<unsigned>(idx);
    const Instance inst = gap_instance(a.family, k, phi);
    const Bounds b = makespan_bounds(inst);
    const ThresholdResult t = min_feasible_C(inst, farey_candidates(b.lower, b.upper, 4 * k + 4));
    std::ostringstream row;
    row << a.family << ',' << k << ',' << both(t.upper) << ',' << (t.exact ? "true" : "false") << ','
        << both(t.lower) << ',';
    try {
      const OracleResult o = brute_force_makespan(inst, budget);
      row << both(o.value) << ',' << both(o.value / t.upper) << ",ok";
    } catch (const BudgetExceeded&) {
      row << ",,,,budget";
    }
    rows[idx] = row.str();
  });
  std::ostringstream csv;
  csv << "family,k,C,C_decimal,C_exact,C_lower,C_lower_decimal,OPT,OPT_decimal,gap,gap_decimal,oracle\n";
  for (const auto& r : rows) csv << r << "\n";
  if (a.csv.empty())
    out << csv.str();
  else
    write_file(a.csv, csv.str());
  return kOk;
}

struct GenArgs {
  std::string family, out, phi, fn_family = "capped_inverse", variant = "unrelated", matrix, p;
  unsigned k = 1;
  std::uint64_t seed = 0;
  std::size_t machines = 3, jobs = 4;
  bool weights = false, unit_floor = false;
};

int do_gen(const GenArgs& a, std::ostream& out) {
  Instance inst;
  if (a.family == "gap-unrelated" || a.family == "gap-restricted" || a.family == "gap-uniform") {
    std::optional<Rational> phi;
    if (!a.phi.empty()) phi = rational_flag(a.phi, "phi");
    inst = gap_instance(a.family.substr(4), a.k, phi);
  } else if (a.family == "random") {
    RandomSpec spec;
    spec.seed = a.seed;
    spec.machines = a.machines;
    spec.jobs = a.jobs;
    try {
      spec.family = parse_fn_family(a.fn_family);
      spec.variant = parse_variant(a.variant);
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    }
    spec.weights = a.weights;
    inst = gen_random(spec);
  } else if (a.family == "nonmalleable") {
    if (a.matrix.empty()) throw UsageError("--matrix is required for the nonmalleable family");
    inst = from_nonmalleable(parse_matrix(a.matrix));
  } else {
    throw UsageError("--family must be gap-unrelated, gap-restricted, gap-uniform, random or nonmalleable");
  }
  if (a.unit_floor) inst = with_unit_floor(inst);
  if (!a.p.empty()) {
    inst.norm = parse_norm(a.p);
    inst.validate();
  }
  if (a.out.empty())
    out << instance_to_json(inst);
  else
    save_instance(a.out, inst);
  return kOk;
}

struct BenchArgs {
  std::string dir, csv, objective = "makespan", eps = "1/1000000";
  std::vector<std::string> schemes{"simple", "filtered", "beta", "restricted", "uniform", "pnorm"};
};

int do_bench(const BenchArgs& a, std::ostream& out) {
  if (!fs::is_directory(a.dir)) throw UsageError("--dir: '" + a.dir + "' is not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(a.dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  std::vector<Scheme> schemes;
  for (const auto& s : a.schemes) try {
      schemes.push_back(parse_scheme(s));
    } catch (const ParseError& e) {
      throw UsageError(std::string("--schemes: ") + e.what());
    }
  const bool weighted = a.objective == "weighted";
  if (!weighted && a.objective != "makespan") throw UsageError("--objective must be makespan or weighted");
  const Rational eps = rational_flag(a.eps, "eps");

  struct Cell {
    std::string row;
    std::optional<long double> ratio;
  };
  std::vector<Cell> cells(files.size() * schemes.size());
  fan_out(cells.size(), [&](std::size_t idx) {
    const std::string& file = files[idx / schemes.size()];
    const Scheme scheme = schemes[idx % schemes.size()];
    const Instance inst = load_instance(file);
    std::ostringstream row;
    row << fs::path(file).filename().string() << ',' << to_string(scheme) << ',';
    const auto t0 = std::chrono::steady_clock::now();
    try {
      Rational bound, value;
      long double rho = 0;
      Schedule s;
      if (weighted) {
        WeightedConfig cfg;
        cfg.scheme = scheme;
        auto r = solve_weighted(inst, cfg);
        bound = r.plan.lp_objective();
        value = r.objective;
        rho = r.rho;
        s = std::move(r.schedule);
      } else {
        SearchConfig cfg;
        cfg.scheme = scheme;
        cfg.eps = eps;
        auto r = minimize_makespan(inst, cfg);
        bound = r.C_found;
        s = std::move(r.decision.schedule);
        value = s.makespan();
        rho = r.rho;
      }
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      const Rational ratio = value / bound;
      row << "ok," << both(bound) << ',' << both(value) << ',' << decimal(rho) << ','
          << to_decimal_string(ratio, 12) << ',' << (verify_schedule(inst, s).empty() ? "true" : "false") << ','
          << decimal(ms);
      cells[idx].ratio = to_long_double(ratio);
    } catch (const DomainError&) {
      row << "skipped,,,,,,,,";
    }
    cells[idx].row = row.str();
  });

  std::ostringstream csv;
  csv << "instance,scheme,status,bound,bound_decimal,value,value_decimal,rho,ratio,verified,wall_ms\n";
  for (const auto& c : cells) csv << c.row << "\n";
  // empirical maximum ratio per scheme
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    std::optional<long double> worst;
    for (std::size_t f = 0; f < files.size(); ++f)
      if (auto r = cells[f * schemes.size() + s].ratio; r && (!worst || *r > *worst)) worst = r;
    csv << "max," << to_string(schemes[s]) << ',' << (worst ? "ok" : "empty") << ",,,,,"
        << decimal(scheme_ratio(schemes[s])) << ','
        << (worst ? decimal(*worst) : "") << ",,\n";
  }
  if (a.csv.empty())
    out << csv.str();
  else
    write_file(a.csv, csv.str());
  return kOk;
}

void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << nlohmann::json{{"error", message}, {"kind", kind}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scheduling malleable jobs on unrelated, restricted and uniform machines"};
  app.name("msched");
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Approximate a schedule for an instance");
  solve->add_option("--instance", sa.instance, "Instance JSON")->required();
  solve->add_option("--scheme", sa.scheme, "simple|filtered|beta|restricted|uniform|pnorm");
  solve->add_option("--p", sa.p, "Override the speed norm exponent");
  solve->add_option("--objective", sa.objective, "makespan|weighted");
  solve->add_option("--eps", sa.eps, "Relative search precision");
  solve->add_option("--tau", sa.tau, "Interval ratio (weighted)");
  solve->add_option("--alpha", sa.alpha, "Bucket stretch (weighted)");
  solve->add_option("--out", sa.out, "Schedule JSON output");
  solve->add_option("--report", sa.report, "Per-job CSV (weighted)");

  std::string v_inst, v_sched;
  auto* verify = app.add_subcommand("verify", "Check a schedule against an instance");
  verify->add_option("--instance", v_inst)->required();
  verify->add_option("--schedule", v_sched)->required();

  GapArgs ga;
  auto* gap = app.add_subcommand("gap", "Integrality gap table for a worst-case family");
  gap->add_option("--family", ga.family, "unrelated|restricted|uniform")->required();
  gap->add_option("--k-range", ga.range, "a..b");
  gap->add_option("--csv", ga.csv);
  gap->add_option("--phi", ga.phi, "Golden ratio approximation (unrelated)");
  gap->add_option("--oracle-jobs", ga.oracle_jobs);
  gap->add_option("--oracle-machines", ga.oracle_machines);
  gap->add_option("--oracle-combinations", ga.oracle_combinations);

  GenArgs gn;
  auto* gen = app.add_subcommand("gen", "Generate an instance");
  gen->add_option("--family", gn.family, "gap-unrelated|gap-restricted|gap-uniform|random|nonmalleable")->required();
  gen->add_option("--out", gn.out);
  gen->add_option("--k", gn.k);
  gen->add_option("--phi", gn.phi);
  gen->add_option("--seed", gn.seed);
  gen->add_option("--machines", gn.machines);
  gen->add_option("--jobs", gn.jobs);
  gen->add_option("--fn-family", gn.fn_family, "capped_inverse|amdahl|power_law");
  gen->add_option("--variant", gn.variant, "unrelated|restricted|uniform");
  gen->add_option("--matrix", gn.matrix, "Rows of processing times per machine, e.g. 1,2;2,1");
  gen->add_option("--p", gn.p, "Speed norm exponent");
  gen->add_flag("--weights", gn.weights, "Draw job weights");
  gen->add_flag("--unit-floor", gn.unit_floor, "Rescale so every job takes at least 1");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run schemes over a directory of instances");
  bench->add_option("--dir", ba.dir)->required();
  bench->add_option("--schemes", ba.schemes)->delimiter(',');
  bench->add_option("--csv", ba.csv);
  bench->add_option("--objective", ba.objective, "makespan|weighted");
  bench->add_option("--eps", ba.eps);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    report(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (*solve) return do_solve(sa, out);
    if (*verify) return do_verify(v_inst, v_sched, out);
    if (*gap) return do_gap(ga, out);
    if (*gen) return do_gen(gn, out);
    if (*bench) return do_bench(ba, out);
  } catch (const UsageError& e) {
    report(err, "usage", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    report(err, "parse", e.what());
    return kUsage;
  } catch (const ValidationError& e) {
    report(err, "validation", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    report(err, "domain", e.what());
    return kUsage;
  } catch (const BudgetExceeded& e) {
    report(err, "budget", e.what());
    return kRefused;
  } catch (const InternalError& e) {
    report(err, "internal", e.what());
    return kInternal;
  } catch (const std::exception& e) {
    report(err, "error", e.what());
    return kInternal;
  }
  return kUsage;
}

}  // namespace msched::cli
