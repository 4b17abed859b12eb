#include "msched/lp.hpp"

#include <sstream>

namespace msched {

std::optional<Integer> critical_speed(const ProcTimeFn& fn, const Rational& C) {
  if (C <= 0) throw DomainError("critical speed needs C > 0");
  const Integer cap = Integer(1) << kCriticalSpeedLog2Cap;
  Integer hi = 1;
  while (fn(Rational(hi)) > C) {
    if (hi == cap) return std::nullopt;
    hi *= 2;
  }
  // f(hi) <= C and either hi == 1 or f(hi / 2) > C.
  Integer lo = hi / 2;  // invariant: lo == 0 or f(lo) > C
  while (hi - lo > 1) {
    Integer mid = (lo + hi) / 2;
    if (fn(Rational(mid)) <= C)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

std::optional<AssignmentLp> build(const Instance& inst, const Rational& C,
                                  const SpeedNorm& norm, const ColumnMask* mask) {
  if (norm.is_infinite()) throw DomainError("the assignment LP needs a finite p");
  const std::size_t m = inst.machines();
  const std::size_t n = inst.jobs();
  AssignmentLp lp;
  lp.C = C;
  lp.norm = norm;
  lp.fast = Matrix<bool>::Constant(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n), false);
  lp.coef = MatrixQ::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    auto g = critical_speed(inst.functions[j], C);
    if (!g) return std::nullopt;
    lp.gamma.push_back(*g);
  }

  std::vector<LpRowInfo> assign(n), load(m);
  for (std::size_t j = 0; j < n; ++j) {
    assign[j].row.sense = Sense::Eq;
    assign[j].row.rhs = 1;
    assign[j].tag = "assign_j" + std::to_string(j);
  }
  for (std::size_t i = 0; i < m; ++i) {
    load[i].row.sense = Sense::Le;
    load[i].row.rhs = C;
    load[i].tag = "load_i" + std::to_string(i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const Rational gamma(lp.gamma[j]);
    const Rational f_gamma = inst.functions[j](gamma);
    for (std::size_t i = 0; i < m; ++i) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (!inst.allowed(i, j)) continue;
      const Rational& s = inst.speed(i, j);
      const Rational f_s = inst.functions[j](s);
      if (f_s <= C) {
        lp.fast(ii, jj) = true;
        lp.coef(ii, jj) = f_s;
      } else {
        lp.coef(ii, jj) = f_gamma * pow_norm(gamma / s, *norm.p);
      }
      if (mask && !(*mask)(ii, jj)) continue;
      const auto col = static_cast<Eigen::Index>(lp.problem.columns.size());
      lp.problem.columns.push_back({i, j, 0});
      assign[j].row.terms.emplace_back(col, Rational(1));
      load[i].row.terms.emplace_back(col, lp.coef(ii, jj));
    }
  }
  for (auto& r : assign) lp.problem.rows.push_back(std::move(r));
  for (auto& r : load) lp.problem.rows.push_back(std::move(r));
  return lp;
}

}  // namespace

std::optional<AssignmentLp> build_lp(const Instance& inst, const Rational& C,
                                     const ColumnMask* mask) {
  return build(inst, C, SpeedNorm::additive(), mask);
}

std::optional<AssignmentLp> build_lp_pnorm(const Instance& inst, const Rational& C,
                                           const SpeedNorm& p, const ColumnMask* mask) {
  return build(inst, C, p, mask);
}

std::size_t FractionalAssignment::support() const {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(i, j) != 0) ++count;
  return count;
}

Rational FractionalAssignment::load(std::size_t machine, const std::vector<bool>* jobs) const {
  Rational total = 0;
  const auto i = static_cast<Eigen::Index>(machine);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (jobs && !(*jobs)[static_cast<std::size_t>(j)]) continue;
    if (x(i, j) != 0) total += coef(i, j) * x(i, j);
  }
  return total;
}

LpSolution solve_extreme_point(const LpProblem& lp) {
  std::vector<SparseRow<Rational>> rows;
  rows.reserve(lp.rows.size());
  for (const auto& r : lp.rows) rows.push_back(r.row);
  DenseSimplex<Rational> simplex(static_cast<Eigen::Index>(lp.columns.size()), std::move(rows),
                                 lp.objective);
  auto res = simplex.solve();
  LpSolution out;
  out.status = res.status;
  out.x = std::move(res.x);
  out.objective = std::move(res.objective);
  out.rows = res.basis.size();
  out.pivots = res.pivots;
  for (auto b : res.basis)
    if (b < static_cast<Eigen::Index>(lp.columns.size()))
      out.basic_columns.push_back(static_cast<std::size_t>(b));
  return out;
}

std::optional<FractionalAssignment> solve_assignment(const Instance& inst, const Rational& C,
                                                     const SpeedNorm& norm,
                                                     const ColumnMask* mask) {
  auto lp = build(inst, C, norm, mask);
  if (!lp) return std::nullopt;
  auto sol = solve_extreme_point(lp->problem);
  if (sol.status != LpStatus::Optimal) return std::nullopt;
  FractionalAssignment fa;
  fa.C = C;
  fa.norm = norm;
  fa.x = MatrixQ::Zero(static_cast<Eigen::Index>(inst.machines()),
                       static_cast<Eigen::Index>(inst.jobs()));
  for (std::size_t c = 0; c < lp->problem.columns.size(); ++c) {
    const auto& col = lp->problem.columns[c];
    fa.x(static_cast<Eigen::Index>(col.machine), static_cast<Eigen::Index>(col.job)) =
        sol.x(static_cast<Eigen::Index>(c));
  }
  for (auto c : sol.basic_columns) fa.basis.push_back(lp->problem.columns[c]);
  fa.gamma = std::move(lp->gamma);
  fa.fast = std::move(lp->fast);
  fa.coef = std::move(lp->coef);
  fa.pivots = sol.pivots;
  return fa;
}

bool lp_feasible(const Instance& inst, const Rational& C, const SpeedNorm& norm) {
  return solve_assignment(inst, C, norm).has_value();
}

std::optional<std::string> check_assignment(const Instance& inst, const FractionalAssignment& fa) {
  auto lp = build(inst, fa.C, fa.norm, nullptr);
  if (!lp) return std::string("critical speed undefined");
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    Rational total = 0;
    for (std::size_t i = 0; i < inst.machines(); ++i) {
      const Rational& v = fa.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v < 0) return "negative x on pair i" + std::to_string(i) + " j" + std::to_string(j);
      if (v != 0 && !inst.allowed(i, j))
        return "mass on forbidden pair i" + std::to_string(i) + " j" + std::to_string(j);
      total += v;
    }
    if (total != 1) return "assign_j" + std::to_string(j);
  }
  for (std::size_t i = 0; i < inst.machines(); ++i) {
    Rational total = 0;
    for (std::size_t j = 0; j < inst.jobs(); ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      total += lp->coef(ii, jj) * fa.x(ii, jj);
    }
    if (total > fa.C) return "load_i" + std::to_string(i);
  }
  return std::nullopt;
}

FractionalAssignment purify(const Instance& inst, const FractionalAssignment& fa) {
  ColumnMask mask = fa.x.unaryExpr([](const Rational& v) { return v != 0; });
  auto out = solve_assignment(inst, fa.C, fa.norm, &mask);
  if (!out) throw InternalError("support-restricted LP infeasible although x is feasible");
  return *out;
}

IntervalLp build_interval_lp(const Instance& inst, const std::vector<Rational>& weights,
                             const Rational& tau, const Rational& horizon) {
  if (tau <= 1) throw DomainError("interval ratio tau must exceed 1");
  const std::size_t m = inst.machines();
  const std::size_t n = inst.jobs();
  if (weights.size() != n) throw ValidationError("weight vector length differs from job count");
  for (std::size_t j = 0; j < n; ++j) {
    const Rational full = processing_time(inst, j, inst.all_machines());
    if (full < 1)
      throw ValidationError("job " + std::to_string(j) + " has processing time " +
                            to_fraction_string(full) +
                            " < 1 on all machines; rescale time so every job takes at least 1");
  }

  IntervalLp out;
  out.tau = tau;
  out.horizon = horizon;
  std::vector<Rational> bound{Rational(1)};  // bound[l] = tau^l
  while (bound.back() <= horizon) bound.push_back(bound.back() * tau);
  out.L = bound.size() - 1;
  if (out.L == 0) {
    out.L = 1;
    bound.push_back(tau);
  }
  const std::size_t L = out.L;

  // gamma_j(tau^l) per job and threshold; first usable interval per job.
  std::vector<std::vector<std::optional<Integer>>> gamma(n, std::vector<std::optional<Integer>>(L + 1));
  std::vector<std::size_t> first(n, L + 1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 1; l <= L; ++l) {
      gamma[j][l] = critical_speed(inst.functions[j], bound[l]);
      if (gamma[j][l] && first[j] > L) first[j] = l;
    }

  auto& lp = out.problem;
  std::vector<LpRowInfo> assign(n);
  for (std::size_t j = 0; j < n; ++j) {
    assign[j].row.sense = Sense::Eq;
    assign[j].row.rhs = 1;
    assign[j].tag = "assign_j" + std::to_string(j);
  }
  // column index of x_{i,j,l}
  std::vector<std::vector<std::vector<Eigen::Index>>> col(
      m, std::vector<std::vector<Eigen::Index>>(n, std::vector<Eigen::Index>(L + 1, -1)));
  std::vector<Rational> cost;
  for (std::size_t l = 1; l <= L; ++l)
    for (std::size_t j = 0; j < n; ++j) {
      if (l < first[j]) continue;
      for (std::size_t i = 0; i < m; ++i) {
        if (!inst.allowed(i, j)) continue;
        const auto c = static_cast<Eigen::Index>(lp.columns.size());
        col[i][j][l] = c;
        lp.columns.push_back({i, j, l});
        cost.push_back(weights[j] * bound[l - 1]);
        assign[j].row.terms.emplace_back(c, Rational(1));
      }
    }
  for (auto& r : assign) lp.rows.push_back(std::move(r));

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t l = 1; l <= L; ++l) {
      LpRowInfo row;
      row.row.sense = Sense::Le;
      row.row.rhs = bound[l];
      row.tag = "load_i" + std::to_string(i) + "_l" + std::to_string(l);
      for (std::size_t j = 0; j < n; ++j) {
        if (!inst.allowed(i, j) || !gamma[j][l]) continue;
        const Rational& s = inst.speed(i, j);
        const Rational f_s = inst.functions[j](s);
        Rational a;
        if (f_s <= bound[l]) {
          a = f_s;
        } else {
          const Rational g(*gamma[j][l]);
          a = inst.functions[j](g) * g / s;
        }
        for (std::size_t lp2 = first[j]; lp2 <= l; ++lp2) row.row.terms.emplace_back(col[i][j][lp2], a);
      }
      lp.rows.push_back(std::move(row));
    }

  VectorQ obj(static_cast<Eigen::Index>(cost.size()));
  for (std::size_t c = 0; c < cost.size(); ++c) obj(static_cast<Eigen::Index>(c)) = cost[c];
  lp.objective = std::move(obj);
  return out;
}

namespace {

std::string column_name(const LpColumn& c) {
  std::string s = "x_" + std::to_string(c.machine) + "_" + std::to_string(c.job);
  if (c.interval) s += "_" + std::to_string(c.interval);
  return s;
}

// CPLEX LP has no rational literals; the decimal rendering is for eyeballing
// and cross-checking only.
std::string num(const Rational& q) { return to_decimal_string(q, 17); }

}  // namespace

std::string to_cplex_lp(const LpProblem& lp) {
  std::ostringstream os;
  os << (lp.objective ? "Minimize\n obj:" : "Minimize\n obj: 0");
  if (lp.objective) {
    bool any = false;
    for (std::size_t c = 0; c < lp.columns.size(); ++c) {
      const Rational& v = (*lp.objective)(static_cast<Eigen::Index>(c));
      if (v == 0) continue;
      os << " + " << num(v) << " " << column_name(lp.columns[c]);
      any = true;
    }
    if (!any) os << " 0";
  }
  os << "\nSubject To\n";
  for (const auto& r : lp.rows) {
    os << " " << r.tag << ":";
    for (const auto& [c, v] : r.row.terms)
      os << " + " << num(v) << " " << column_name(lp.columns[static_cast<std::size_t>(c)]);
    if (r.row.terms.empty()) os << " 0";
    switch (r.row.sense) {
      case Sense::Le: os << " <= "; break;
      case Sense::Ge: os << " >= "; break;
      case Sense::Eq: os << " = "; break;
    }
    os << num(r.row.rhs) << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace msched
