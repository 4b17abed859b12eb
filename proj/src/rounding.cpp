#include "msched/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <queue>
#include <tuple>
#include <set>

#include <json.hpp>

namespace msched {

std::size_t OrientedPseudoforest::in_degree(std::size_t node) const {
  std::size_t d = 0;
  for (const auto& a : arcs)
    if (a.second == node) ++d;
  return d;
}

namespace {

struct Graph {
  std::size_t m = 0, n = 0;
  std::vector<std::vector<std::size_t>> adj;
};

Graph support_graph(const MatrixQ& x) {
  Graph g;
  g.m = static_cast<std::size_t>(x.rows());
  g.n = static_cast<std::size_t>(x.cols());
  g.adj.resize(g.m + g.n);
  for (std::size_t i = 0; i < g.m; ++i)
    for (std::size_t j = 0; j < g.n; ++j)
      if (x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0) {
        g.adj[i].push_back(g.m + j);
        g.adj[g.m + j].push_back(i);
      }
  for (auto& a : g.adj) std::sort(a.begin(), a.end());
  return g;
}

std::vector<std::vector<std::size_t>> components(const Graph& g) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(g.adj.size(), false);
  for (std::size_t s = 0; s < g.adj.size(); ++s) {
    if (seen[s] || g.adj[s].empty()) continue;
    std::vector<std::size_t> comp{s};
    seen[s] = true;
    for (std::size_t k = 0; k < comp.size(); ++k)
      for (auto v : g.adj[comp[k]])
        if (!seen[v]) {
          seen[v] = true;
          comp.push_back(v);
        }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::size_t edge_count(const Graph& g, const std::vector<std::size_t>& comp) {
  std::size_t deg = 0;
  for (auto u : comp) deg += g.adj[u].size();
  return deg / 2;
}

}  // namespace

PseudoforestReport check_pseudoforest(const MatrixQ& x) {
  const Graph g = support_graph(x);
  PseudoforestReport rep;
  for (const auto& comp : components(g)) {
    ++rep.components;
    const std::size_t cycles = edge_count(g, comp) + 1 - comp.size();
    rep.max_cycles = std::max(rep.max_cycles, cycles);
  }
  return rep;
}

OrientedPseudoforest orient(const MatrixQ& x) {
  const Graph g = support_graph(x);
  OrientedPseudoforest f;
  f.machines = g.m;
  f.jobs = g.n;
  f.parent.assign(g.n, std::nullopt);
  f.children.assign(g.n, {});
  f.incoming_job.assign(g.m, std::nullopt);

  std::vector<bool> placed(g.adj.size(), false);
  // Orient every edge from an already placed node outwards.
  auto grow = [&](std::deque<std::size_t> frontier) {
    while (!frontier.empty()) {
      const auto u = frontier.front();
      frontier.pop_front();
      for (auto v : g.adj[u]) {
        if (placed[v]) continue;
        placed[v] = true;
        f.arcs.emplace_back(u, v);
        frontier.push_back(v);
      }
    }
  };

  for (const auto& comp : components(g)) {
    const std::size_t edges = edge_count(g, comp);
    if (edges + 1 == comp.size()) {
      placed[comp.front()] = true;
      grow({comp.front()});
      continue;
    }
    if (edges != comp.size())
      throw InternalError("assignment graph component with " +
                          std::to_string(edges + 1 - comp.size()) + " cycles");
    // Strip leaves; what remains is the cycle.
    std::map<std::size_t, std::size_t> deg;
    for (auto u : comp) deg[u] = g.adj[u].size();
    std::deque<std::size_t> leaves;
    for (auto u : comp)
      if (deg[u] == 1) leaves.push_back(u);
    while (!leaves.empty()) {
      const auto u = leaves.front();
      leaves.pop_front();
      deg[u] = 0;
      for (auto v : g.adj[u])
        if (deg[v] > 0 && --deg[v] == 1) leaves.push_back(v);
    }
    std::vector<std::size_t> cycle;
    for (auto u : comp)
      if (deg[u] >= 2) cycle.push_back(u);
    auto on_cycle = [&](std::size_t v) { return deg[v] >= 2; };

    const std::size_t start = cycle.front();
    std::size_t prev = start;
    std::size_t cur = *std::find_if(g.adj[start].begin(), g.adj[start].end(), on_cycle);
    f.arcs.emplace_back(start, cur);
    placed[start] = true;
    while (cur != start) {
      placed[cur] = true;
      std::size_t next = start;
      for (auto v : g.adj[cur])
        if (v != prev && on_cycle(v)) {
          next = v;
          break;
        }
      f.arcs.emplace_back(cur, next);
      prev = cur;
      cur = next;
    }
    grow(std::deque<std::size_t>(cycle.begin(), cycle.end()));
  }

  for (const auto& [u, v] : f.arcs) {
    if (u < g.m) {
      f.parent[v - g.m] = u;
    } else {
      f.children[u - g.m].push_back(v);
      f.incoming_job[v] = u - g.m;
    }
  }
  for (auto& c : f.children) std::sort(c.begin(), c.end());
  return f;
}

// ---------------------------------------------------------------------------

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Simple: return "simple";
    case Scheme::Filtered: return "filtered";
    case Scheme::BetaTuned: return "beta";
    case Scheme::Restricted: return "restricted";
    case Scheme::Uniform: return "uniform";
    case Scheme::PNorm: return "pnorm";
  }
  return "simple";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "simple") return Scheme::Simple;
  if (text == "filtered") return Scheme::Filtered;
  if (text == "beta" || text == "beta-tuned") return Scheme::BetaTuned;
  if (text == "restricted") return Scheme::Restricted;
  if (text == "uniform") return Scheme::Uniform;
  if (text == "pnorm") return Scheme::PNorm;
  throw ParseError("unknown scheme '" + std::string(text) + "'");
}

namespace {

long double golden_min(const std::function<long double(long double)>& g, long double a,
                       long double b, long double tol) {
  const long double r = (std::sqrt(5.0L) - 1) / 2;
  long double c = b - r * (b - a), d = a + r * (b - a);
  long double gc = g(c), gd = g(d);
  while (b - a > tol) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return (a + b) / 2;
}

Rational rational_near(long double v, long double radius) {
  return simplest_between(from_long_double(v - radius), from_long_double(v + radius));
}

long double tuned_alpha(long double b) {
  const long double e = std::exp(1 / b - 1);
  return e / (b * (e - 1));
}

}  // namespace

Threshold tuned_threshold() {
  static const Threshold t = [] {
    const long double b = golden_min(tuned_alpha, 0.2L, 0.9L, 1e-12L);
    Threshold out;
    out.beta = rational_near(b, 1e-10L);
    out.ratio = tuned_alpha(to_long_double(out.beta));
    return out;
  }();
  return t;
}

long double pnorm_bound(long double beta, long double p) {
  return 1 / beta + std::pow(1 - beta, -1 / p);
}

Threshold pnorm_threshold(const SpeedNorm& p) {
  if (p.is_infinite()) throw DomainError("p-norm rounding needs a finite p");
  if (p.is_additive()) return {Rational(1, 2), 4.0L};
  const long double pv = to_long_double(*p.p);
  const long double b =
      golden_min([&](long double x) { return pnorm_bound(x, pv); }, 1e-9L, 1 - 1e-9L, 1e-10L);
  Threshold out;
  out.beta = rational_near(b, 1e-11L);
  out.ratio = pnorm_bound(to_long_double(out.beta), pv);
  return out;
}

long double scheme_ratio(Scheme s, const SpeedNorm& p) {
  switch (s) {
    case Scheme::Simple: return 4.0L;
    case Scheme::Filtered: {
      const long double e = std::exp(1.0L);
      return 2 * e / (e - 1);
    }
    case Scheme::BetaTuned: return tuned_threshold().ratio;
    case Scheme::Restricted: return 7.0L / 3.0L;
    case Scheme::Uniform: return 3.0L;
    case Scheme::PNorm: return pnorm_threshold(p).ratio;
  }
  return 4.0L;
}

std::vector<std::size_t> RoundedAssignment::jobs_in(bool first) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < first_class.size(); ++j)
    if (first_class[j] == first) out.push_back(j);
  return out;
}

namespace {

Rational parent_mass(const FractionalAssignment& fa, const OrientedPseudoforest& forest,
                     std::size_t j) {
  if (!forest.parent[j]) return Rational(0);
  return fa.x(static_cast<Eigen::Index>(*forest.parent[j]), static_cast<Eigen::Index>(j));
}

// Common skeleton: decide J^(1) by the predicate, compute the LP load of J^(1)
// per machine, and default J^(2) jobs to their full children set.
RoundedAssignment split(Scheme scheme, const FractionalAssignment& fa,
                        const OrientedPseudoforest& forest, const Rational& beta,
                        const std::function<bool(const Rational&)>& to_parent) {
  RoundedAssignment r;
  r.scheme = scheme;
  r.C = fa.C;
  r.beta = beta;
  const std::size_t n = forest.jobs;
  r.decisions.resize(n);
  r.first_class.assign(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    auto& d = r.decisions[j];
    if (forest.parent[j] && to_parent(parent_mass(fa, forest, j))) {
      r.first_class[j] = true;
      d.to_parent = true;
      d.machines = {*forest.parent[j]};
      d.rule = "parent";
    } else {
      d.machines = forest.children[j];
      d.rule = "children";
      if (d.machines.empty()) throw InternalError("job " + std::to_string(j) + " has no children");
    }
  }
  r.load.resize(forest.machines);
  for (std::size_t i = 0; i < forest.machines; ++i) r.load[i] = fa.load(i, &r.first_class);
  return r;
}

}  // namespace

RoundedAssignment round_threshold(const Instance&, const FractionalAssignment& fa,
                                  const OrientedPseudoforest& forest, const Rational& beta) {
  return split(Scheme::Simple, fa, forest, beta, [&](const Rational& x) { return x >= beta; });
}

RoundedAssignment round_simple(const Instance& inst, const FractionalAssignment& fa,
                               const OrientedPseudoforest& forest) {
  return round_threshold(inst, fa, forest, Rational(1, 2));
}

RoundedAssignment round_filtered(const Instance& inst, const FractionalAssignment& fa,
                                 const OrientedPseudoforest& forest, const Rational& beta) {
  if (beta <= 0 || beta >= 1) throw DomainError("filtering threshold must lie in (0, 1)");
  auto r = split(Scheme::Filtered, fa, forest, beta, [&](const Rational& x) { return x >= beta; });
  const Rational& C = fa.C;
  for (std::size_t j = 0; j < forest.jobs; ++j) {
    if (r.first_class[j]) continue;
    const auto& T = forest.children[j];
    std::vector<Rational> thetas{Rational(1)};
    for (auto i : T) thetas.push_back(1 - r.load[i] / C);
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());

    std::optional<Rational> best_value;
    for (const auto& theta : thetas) {
      std::vector<std::size_t> S;
      for (auto i : T)
        if (1 - r.load[i] / C >= theta) S.push_back(i);
      if (S.empty()) continue;
      Rational value = (1 - theta) * C / beta + processing_time(inst, j, S);
      if (!best_value || value < *best_value) {
        best_value = std::move(value);
        r.decisions[j].machines = std::move(S);
        r.decisions[j].theta = theta;
      }
    }
    if (!best_value) throw InternalError("filtered rounding found no machine set");
    r.decisions[j].rule = "filtered";
  }
  return r;
}

RoundedAssignment round_restricted(const Instance& inst, const FractionalAssignment& fa,
                                   const OrientedPseudoforest& forest) {
  auto r = split(Scheme::Restricted, fa, forest, Rational(1), [](const Rational& x) { return x == 1; });
  std::vector<Rational> realized(forest.machines, Rational(0));
  for (std::size_t j = 0; j < forest.jobs; ++j)
    if (r.first_class[j]) {
      const auto i = *forest.parent[j];
      realized[i] += inst.functions[j](inst.speed(i, j));
    }
  for (std::size_t j = 0; j < forest.jobs; ++j) {
    if (r.first_class[j] || forest.children[j].size() != 2) continue;
    const auto i1 = forest.children[j][0], i2 = forest.children[j][1];
    std::vector<std::vector<std::size_t>> options{{i1}, {i1, i2}, {i2}};  // lexicographic
    std::optional<Rational> best;
    for (auto& S : options) {
      const Rational t = processing_time(inst, j, S);
      Rational worst = 0;
      for (auto i : S) worst = std::max(worst, realized[i] + t);
      if (!best || worst < *best) {
        best = worst;
        r.decisions[j].machines = S;
      }
    }
    r.decisions[j].rule = "pair";
  }
  return r;
}

namespace {

bool shared_with_other(const FractionalAssignment& fa, std::size_t i, std::size_t j) {
  for (Eigen::Index k = 0; k < fa.x.cols(); ++k)
    if (static_cast<std::size_t>(k) != j && fa.x(static_cast<Eigen::Index>(i), k) != 0) return true;
  return false;
}

bool slow(const FractionalAssignment& fa, std::size_t i, std::size_t j) {
  return !fa.fast(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

// Slow machines carrying j, ordered slowest first (ties by index).
std::vector<std::size_t> slow_support(const FractionalAssignment& fa, const Instance& inst,
                                      std::size_t j) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < inst.machines(); ++i)
    if (fa.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0 && slow(fa, i, j))
      out.push_back(i);
  std::stable_sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return inst.speed(a, j) < inst.speed(b, j);
  });
  return out;
}

struct Exchange {
  std::size_t job, from, to, other;  // job moves from -> to, other moves to -> from
};

std::optional<Exchange> find_exchange(const FractionalAssignment& fa, const Instance& inst) {
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const auto slows = slow_support(fa, inst, j);
    std::vector<std::size_t> shared;
    for (auto i : slows)
      if (shared_with_other(fa, i, j)) shared.push_back(i);
    if (shared.empty()) continue;
    std::size_t from, to;
    if (shared.size() >= 2) {
      from = shared[0];
      to = shared[1];
    } else if (inst.speed(slows.front(), j) < inst.speed(shared[0], j)) {
      from = slows.front();
      to = shared[0];
    } else {
      continue;
    }
    for (std::size_t k = 0; k < inst.jobs(); ++k)
      if (k != j && fa.x(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(k)) != 0)
        return Exchange{j, from, to, k};
  }
  return std::nullopt;
}

}  // namespace

bool is_uniform_canonical(const FractionalAssignment& fa, const Instance& inst) {
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const auto slows = slow_support(fa, inst, j);
    std::vector<std::size_t> shared;
    for (auto i : slows)
      if (shared_with_other(fa, i, j)) shared.push_back(i);
    if (shared.size() > 1) return false;
    if (shared.size() == 1 && inst.speed(slows.front(), j) < inst.speed(shared[0], j)) return false;
  }
  return true;
}

std::size_t shared_slow_count(const FractionalAssignment& fa, const Instance& inst) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < inst.jobs(); ++j)
    for (auto i : slow_support(fa, inst, j))
      if (shared_with_other(fa, i, j)) ++count;
  return count;
}

namespace {

// First job breaking the canonical structure and the columns whose removal
// could repair it: its own slow columns and the other jobs on its shared ones.
std::vector<std::pair<std::size_t, std::size_t>> repair_columns(const FractionalAssignment& fa,
                                                                const Instance& inst) {
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const auto slows = slow_support(fa, inst, j);
    std::vector<std::size_t> shared;
    for (auto i : slows)
      if (shared_with_other(fa, i, j)) shared.push_back(i);
    const bool broken =
        shared.size() > 1 || (shared.size() == 1 && inst.speed(slows.front(), j) < inst.speed(shared[0], j));
    if (!broken) continue;
    std::vector<std::pair<std::size_t, std::size_t>> cols;
    for (auto i : shared)
      for (std::size_t k = 0; k < inst.jobs(); ++k)
        if (k != j && fa.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) != 0) cols.emplace_back(i, k);
    for (auto i : slows) cols.emplace_back(i, j);
    return cols;
  }
  return {};
}

std::size_t violating_jobs(const FractionalAssignment& fa, const Instance& inst) {
  std::size_t count = 0;
  for (std::size_t j = 0; j < inst.jobs(); ++j) {
    const auto slows = slow_support(fa, inst, j);
    std::vector<std::size_t> shared;
    for (auto i : slows)
      if (shared_with_other(fa, i, j)) shared.push_back(i);
    if (shared.size() > 1 || (shared.size() == 1 && inst.speed(slows.front(), j) < inst.speed(shared[0], j))) ++count;
  }
  return count;
}

// Best-first over column masks, fewest broken jobs first. Zeroing columns
// selects a face of the LP polytope, so every point found is still a vertex
// of LP(C).
std::optional<FractionalAssignment> search_canonical(const Instance& inst, const FractionalAssignment& start,
                                                     std::size_t budget, std::size_t& solves) {
  const auto m = static_cast<Eigen::Index>(inst.machines()), n = static_cast<Eigen::Index>(inst.jobs());
  ColumnMask all(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) all(i, j) = inst.speed(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) > 0;
  auto key = [&](const ColumnMask& mask) {
    std::vector<bool> k;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) k.push_back(mask(i, j));
    return k;
  };
  struct Node {
    std::size_t broken, shared, order;
    ColumnMask mask;
    FractionalAssignment fa;
    bool operator<(const Node& o) const {
      return std::tie(broken, shared, order) > std::tie(o.broken, o.shared, o.order);
    }
  };
  std::set<std::vector<bool>> seen{key(all)};
  std::priority_queue<Node> open;
  std::size_t order = 0;
  open.push(Node{violating_jobs(start, inst), shared_slow_count(start, inst), order++, all, start});
  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    for (const auto& [i, j] : repair_columns(node.fa, inst)) {
      ColumnMask child = node.mask;
      child(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = false;
      if (!seen.insert(key(child)).second) continue;
      if (solves >= budget) return std::nullopt;
      ++solves;
      auto next = solve_assignment(inst, start.C, start.norm, &child);
      if (!next) continue;
      const std::size_t broken = violating_jobs(*next, inst);
      if (broken == 0) return next;
      open.push(Node{broken, shared_slow_count(*next, inst), order++, std::move(child), std::move(*next)});
    }
  }
  return std::nullopt;
}

}  // namespace

FractionalAssignment canonicalize_uniform(const Instance& inst, const FractionalAssignment& fa,
                                          CanonicalStats* stats) {
  if (inst.variant != Variant::Uniform)
    throw DomainError("canonicalization needs a uniform-machine instance");
  FractionalAssignment y = fa;
  const std::size_t cap = inst.jobs() + inst.machines();
  std::size_t transfers = 0;
  while (transfers < cap) {
    auto ex = find_exchange(y, inst);
    if (!ex) break;
    const auto f = static_cast<Eigen::Index>(ex->from), t = static_cast<Eigen::Index>(ex->to);
    const auto j = static_cast<Eigen::Index>(ex->job), k = static_cast<Eigen::Index>(ex->other);
    // Moving eps of j onto `to` is offset there by moving eps * a(to,j)/a(to,k) of k off it.
    const Rational rate = y.coef(t, j) / y.coef(t, k);
    const Rational eps = std::min(y.x(f, j), y.x(t, k) / rate);
    const Rational eps2 = eps * rate;
    y.x(f, j) -= eps;
    y.x(t, j) += eps;
    y.x(t, k) -= eps2;
    y.x(f, k) += eps2;
    ++transfers;
  }
  if (auto broken = check_assignment(inst, y))
    throw InternalError("mass exchange broke LP row " + *broken);
  // Untouched input is returned as is: re-solving could land on another vertex.
  FractionalAssignment out = transfers == 0 ? y : purify(inst, y);
  std::size_t solves = 0;
  if (!is_uniform_canonical(out, inst)) {
    const std::size_t budget = 64 * (inst.jobs() + inst.machines());
    if (auto found = search_canonical(inst, out, budget, solves)) out = std::move(*found);
  }
  if (stats) {
    stats->transfers = transfers;
    stats->searched = solves;
    stats->canonical = is_uniform_canonical(out, inst);
  }
  return out;
}

RoundedAssignment round_uniform(const Instance& inst, const FractionalAssignment& fa,
                                const OrientedPseudoforest& forest) {
  auto r = split(Scheme::Uniform, fa, forest, Rational(1, 2),
                 [](const Rational& x) { return x >= Rational(1, 2); });
  const Rational& C = fa.C;
  for (std::size_t j = 0; j < forest.jobs; ++j) {
    if (r.first_class[j]) continue;
    auto& d = r.decisions[j];
    const auto& T = forest.children[j];
    std::optional<std::size_t> fastest;
    std::vector<std::size_t> exclusive, shared;
    for (auto i : T) {
      if (!slow(fa, i, j)) {
        if (!fastest || inst.speed(i, j) > inst.speed(*fastest, j)) fastest = i;
      } else if (shared_with_other(fa, i, j)) {
        shared.push_back(i);
      } else {
        exclusive.push_back(i);
      }
    }
    if (fastest) {
      d.machines = {*fastest};
      d.rule = "fast";
      continue;
    }
    const Rational gamma(fa.gamma[j]);
    const Rational need = gamma * inst.functions[j](gamma) / (3 * C);
    if (!exclusive.empty() && effective_speed(inst, j, exclusive) >= need) {
      d.machines = exclusive;
      d.rule = "exclusive";
      continue;
    }
    d.machines = exclusive;
    d.rule = "exclusive+shared";
    if (!shared.empty()) {
      auto slowest = *std::min_element(shared.begin(), shared.end(), [&](std::size_t a, std::size_t b) {
        return inst.speed(a, j) < inst.speed(b, j);
      });
      d.machines.push_back(slowest);
      std::sort(d.machines.begin(), d.machines.end());
    }
    if (d.machines.empty()) throw InternalError("uniform rounding found no machine set");
  }
  return r;
}

RoundedAssignment round_pnorm(const Instance& inst, const FractionalAssignment& fa,
                              const OrientedPseudoforest& forest) {
  const Rational beta = pnorm_threshold(inst.norm).beta;
  auto r = split(Scheme::PNorm, fa, forest, beta, [&](const Rational& x) { return x >= beta; });
  return r;
}

Schedule assemble_schedule(const Instance& inst, const RoundedAssignment& rounded) {
  Schedule s;
  std::vector<Rational> free(inst.machines(), Rational(0));
  std::vector<bool> taken(inst.machines(), false);
  for (std::size_t j = 0; j < rounded.decisions.size(); ++j) {
    if (rounded.first_class[j]) continue;
    const auto& d = rounded.decisions[j];
    for (auto i : d.machines) {
      if (taken[i])
        throw InternalError("machine " + std::to_string(i) + " chosen by two children-assigned jobs");
      taken[i] = true;
    }
    auto p = place(inst, j, d.machines, Rational(0));
    for (auto i : d.machines) free[i] = p.completion;
    s.placements.push_back(std::move(p));
  }
  for (std::size_t j = 0; j < rounded.decisions.size(); ++j) {
    if (!rounded.first_class[j]) continue;
    const auto i = rounded.decisions[j].machines.front();
    auto p = place(inst, j, {i}, free[i]);
    free[i] = p.completion;
    s.placements.push_back(std::move(p));
  }
  return s;
}

std::string rounding_to_json(const RoundedAssignment& r) {
  nlohmann::json j;
  j["scheme"] = to_string(r.scheme);
  j["C"] = to_fraction_string(r.C);
  j["beta"] = to_fraction_string(r.beta);
  j["load"] = nlohmann::json::array();
  for (const auto& l : r.load) j["load"].push_back(to_fraction_string(l));
  j["jobs"] = nlohmann::json::array();
  for (std::size_t k = 0; k < r.decisions.size(); ++k) {
    const auto& d = r.decisions[k];
    nlohmann::json e{{"job", k}, {"class", r.first_class[k] ? 1 : 2}, {"rule", d.rule},
                     {"machines", d.machines}};
    if (d.theta) e["theta"] = to_fraction_string(*d.theta);
    j["jobs"].push_back(std::move(e));
  }
  return j.dump(2);
}

}  // namespace msched
