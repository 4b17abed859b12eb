#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace msched {

enum class Sense { Le, Ge, Eq };

template <typename Scalar>
struct SparseRow {
  std::vector<std::pair<Eigen::Index, Scalar>> terms;
  Sense sense = Sense::Le;
  Scalar rhs = Scalar(0);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

template <typename Scalar>
struct SimplexResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;  // structural variables only
  Scalar objective = Scalar(0);
  // Basic variable of each surviving row. Indices >= the structural count
  // refer to slack/surplus columns, numbered in row order.
  std::vector<Eigen::Index> basis;
  // Rows found linearly dependent on the others and dropped.
  std::vector<std::size_t> redundant_rows;
  std::size_t pivots = 0;
};

/// Zero test used by the tableau. Exact types compare against zero; floating
/// types use a small absolute tolerance.
template <typename Scalar>
struct PivotTolerance {
  static bool is_zero(const Scalar& v) {
    if constexpr (std::is_floating_point_v<Scalar>)
      return std::abs(v) <= Scalar(1e-9);
    else
      return v == 0;
  }
  static bool positive(const Scalar& v) { return !is_zero(v) && v > 0; }
  static bool negative(const Scalar& v) { return !is_zero(v) && v < 0; }
};

/// Two-phase tableau simplex with Bland's rule. Minimizes the objective if
/// one is given, otherwise stops at the first basic feasible solution.
template <typename Scalar>
class DenseSimplex {
public:
  using Tol = PivotTolerance<Scalar>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  DenseSimplex(Eigen::Index num_vars, std::vector<SparseRow<Scalar>> rows,
               std::optional<Vec> objective = std::nullopt)
      : n_(num_vars), rows_(std::move(rows)), objective_(std::move(objective)) {}

  SimplexResult<Scalar> solve() {
    SimplexResult<Scalar> out;
    setup();
    out.x = Vec::Zero(n_);

    // Phase one: minimize the sum of artificials.
    load_objective_phase1();
    if (!run(/*allow_artificial=*/true, out.pivots)) {
      // Phase one is bounded below by zero, so this cannot happen.
      out.status = LpStatus::Unbounded;
      return out;
    }
    if (Tol::positive(-T_(R_, rhs_col()))) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    drive_out_artificials(out);

    if (objective_) {
      load_objective_phase2();
      if (!run(/*allow_artificial=*/false, out.pivots)) {
        out.status = LpStatus::Unbounded;
        return out;
      }
    }

    out.status = LpStatus::Optimal;
    for (Eigen::Index r = 0; r < R_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      if (b < n_) out.x(b) = T_(r, rhs_col());
      out.basis.push_back(b);
    }
    if (objective_) {
      out.objective = Scalar(0);
      for (Eigen::Index j = 0; j < n_; ++j)
        if (!Tol::is_zero(out.x(j))) out.objective += (*objective_)(j) * out.x(j);
    }
    return out;
  }

private:
  Eigen::Index rhs_col() const { return cols_; }
  bool is_artificial(Eigen::Index c) const { return c >= first_art_; }

  void setup() {
    R_ = static_cast<Eigen::Index>(rows_.size());
    Eigen::Index slacks = 0;
    for (const auto& row : rows_)
      if (row.sense != Sense::Eq) ++slacks;
    // Normalize to rhs >= 0, then count the rows needing an artificial.
    flip_.assign(rows_.size(), false);
    Eigen::Index arts = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].rhs < 0) flip_[r] = true;
      if (effective_sense(r) != Sense::Le) ++arts;
    }
    first_slack_ = n_;
    first_art_ = n_ + slacks;
    cols_ = n_ + slacks + arts;
    T_ = Mat::Zero(R_ + 1, cols_ + 1);
    basis_.assign(rows_.size(), 0);

    Eigen::Index next_slack = first_slack_;
    Eigen::Index next_art = first_art_;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const Scalar sign = flip_[r] ? Scalar(-1) : Scalar(1);
      for (const auto& [c, v] : rows_[r].terms) T_(ri, c) += sign * v;
      T_(ri, rhs_col()) = sign * rows_[r].rhs;
      const Sense s = effective_sense(r);
      if (rows_[r].sense != Sense::Eq) {
        T_(ri, next_slack) = s == Sense::Le ? Scalar(1) : Scalar(-1);
        if (s == Sense::Le) basis_[r] = next_slack;
        ++next_slack;
      }
      if (s != Sense::Le) {
        T_(ri, next_art) = Scalar(1);
        basis_[r] = next_art++;
      }
    }
  }

  Sense effective_sense(std::size_t r) const {
    const Sense s = rows_[r].sense;
    if (!flip_[r] || s == Sense::Eq) return s;
    return s == Sense::Le ? Sense::Ge : Sense::Le;
  }

  void load_objective_phase1() {
    T_.row(R_).setZero();
    for (Eigen::Index c = first_art_; c < cols_; ++c) T_(R_, c) = Scalar(1);
    for (Eigen::Index r = 0; r < R_; ++r)
      if (is_artificial(basis_[static_cast<std::size_t>(r)])) subtract_row(R_, r, Scalar(1));
  }

  void load_objective_phase2() {
    T_.row(R_).setZero();
    for (Eigen::Index j = 0; j < n_; ++j) T_(R_, j) = (*objective_)(j);
    for (Eigen::Index r = 0; r < R_; ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      if (b < n_ && !Tol::is_zero((*objective_)(b))) subtract_row(R_, r, (*objective_)(b));
    }
  }

  // T(dst) -= factor * T(src), touching only the nonzeros of src.
  void subtract_row(Eigen::Index dst, Eigen::Index src, const Scalar& factor) {
    for (Eigen::Index c = 0; c <= cols_; ++c) {
      const Scalar& v = T_(src, c);
      if (!Tol::is_zero(v)) T_(dst, c) -= factor * v;
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const Scalar p = T_(r, c);
    std::vector<Eigen::Index> nz;
    for (Eigen::Index k = 0; k <= cols_; ++k) {
      if (Tol::is_zero(T_(r, k))) {
        T_(r, k) = Scalar(0);
        continue;
      }
      T_(r, k) /= p;
      nz.push_back(k);
    }
    for (Eigen::Index k = 0; k <= R_; ++k) {
      if (k == r) continue;
      const Scalar f = T_(k, c);
      if (Tol::is_zero(f)) continue;
      for (Eigen::Index j : nz) T_(k, j) -= f * T_(r, j);
      T_(k, c) = Scalar(0);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule iterations; false when unbounded.
  bool run(bool allow_artificial, std::size_t& pivots) {
    const Eigen::Index limit = allow_artificial ? cols_ : first_art_;
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index c = 0; c < limit; ++c) {
        if (Tol::negative(T_(R_, c))) {
          enter = c;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      Scalar best_ratio(0);
      for (Eigen::Index r = 0; r < R_; ++r) {
        if (!Tol::positive(T_(r, enter))) continue;
        Scalar ratio = T_(r, rhs_col()) / T_(r, enter);
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = std::move(ratio);
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void drive_out_artificials(SimplexResult<Scalar>& out) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index r = 0; r < R_; ++r) {
      if (!is_artificial(basis_[static_cast<std::size_t>(r)])) {
        keep.push_back(r);
        continue;
      }
      Eigen::Index c = 0;
      while (c < first_art_ && Tol::is_zero(T_(r, c))) ++c;
      if (c < first_art_) {
        pivot(r, c);
        ++out.pivots;
        keep.push_back(r);
      } else {
        out.redundant_rows.push_back(static_cast<std::size_t>(r));
      }
    }
    if (keep.size() == static_cast<std::size_t>(R_)) return;
    Mat reduced(static_cast<Eigen::Index>(keep.size()) + 1, cols_ + 1);
    std::vector<Eigen::Index> reduced_basis;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      reduced.row(static_cast<Eigen::Index>(k)) = T_.row(keep[k]);
      reduced_basis.push_back(basis_[static_cast<std::size_t>(keep[k])]);
    }
    reduced.row(static_cast<Eigen::Index>(keep.size())) = T_.row(R_);
    T_ = std::move(reduced);
    basis_ = std::move(reduced_basis);
    R_ = static_cast<Eigen::Index>(keep.size());
  }

  Eigen::Index n_;
  std::vector<SparseRow<Scalar>> rows_;
  std::optional<Vec> objective_;

  std::vector<bool> flip_;
  Eigen::Index R_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index first_slack_ = 0;
  Eigen::Index first_art_ = 0;
  Mat T_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace msched
