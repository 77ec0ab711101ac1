#pragma once

#include "qhelly/linalg.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace qhelly {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize <objective, x>  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,
// x_j >= 0 where nonnegative[j], free otherwise.
struct LinearProgram {
  Vector objective;
  Matrix a_ub;
  Vector b_ub;
  Matrix a_eq;
  Vector b_eq;
  std::vector<bool> nonnegative;  // empty means every variable is free

  explicit LinearProgram(Eigen::Index n)
      : objective(Vector::Zero(n)), a_ub(0, n), b_ub(0), a_eq(0, n), b_eq(0) {}
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Vector x;

  [[nodiscard]] bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

// Dense tableau; last row holds reduced costs (z - sum c_j x_j = 0 form),
// last column the right-hand side.
class Tableau {
 public:
  Tableau(Matrix t, std::vector<Eigen::Index> basis, double tol)
      : t_(std::move(t)), basis_(std::move(basis)), tol_(tol) {}

  Matrix& data() { return t_; }
  std::vector<Eigen::Index>& basis() { return basis_; }
  [[nodiscard]] Eigen::Index rows() const { return t_.rows() - 1; }
  [[nodiscard]] Eigen::Index cols() const { return t_.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
    basis_[r] = c;
  }

  // Bland's rule. Returns false when unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    const Eigen::Index z = rows();
    for (int iter = 0; iter < 100000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols(); ++j) {
        if (allowed[j] && t_(z, j) < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < z; ++i) {
        if (t_(i, enter) > tol_) {
          const double ratio = t_(i, cols()) / t_(i, enter);
          if (leave < 0 || ratio < best - 1e-15 ||
              (ratio <= best + 1e-15 && basis_[i] < basis_[leave])) {
            best = std::min(best, ratio);
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }

 private:
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  double tol_;
};

}  // namespace detail

// Two-phase dense tableau simplex with Bland's anti-cycling rule.
inline LpResult lp_solve(const LinearProgram& lp, double tol = 1e-10) {
  const Eigen::Index n = lp.objective.size();
  const Eigen::Index m_ub = lp.a_ub.rows();
  const Eigen::Index m_eq = lp.a_eq.rows();
  const Eigen::Index m = m_ub + m_eq;

  // Column layout: split variables, slacks, artificials.
  std::vector<Eigen::Index> pos_col(n), neg_col(n, -1);
  Eigen::Index nc = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    pos_col[j] = nc++;
    const bool nonneg = !lp.nonnegative.empty() && lp.nonnegative[j];
    if (!nonneg) neg_col[j] = nc++;
  }
  const Eigen::Index slack0 = nc;
  nc += m_ub;

  Matrix rows = Matrix::Zero(m, nc);
  Vector rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool ub = i < m_ub;
    const auto coeffs = ub ? lp.a_ub.row(i) : lp.a_eq.row(i - m_ub);
    for (Eigen::Index j = 0; j < n; ++j) {
      rows(i, pos_col[j]) = coeffs(j);
      if (neg_col[j] >= 0) rows(i, neg_col[j]) = -coeffs(j);
    }
    if (ub) rows(i, slack0 + i) = 1.0;
    rhs(i) = ub ? lp.b_ub(i) : lp.b_eq(i - m_ub);
    if (rhs(i) < 0) {
      rows.row(i) *= -1.0;
      rhs(i) = -rhs(i);
    }
  }

  // A row whose slack carries +1 starts basic on that slack; others need an artificial.
  std::vector<Eigen::Index> basis(m, -1);
  Eigen::Index n_art = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i < m_ub && rows(i, slack0 + i) > 0) basis[i] = slack0 + i;
    else ++n_art;
  }
  const Eigen::Index art0 = nc;
  const Eigen::Index total = nc + n_art;

  Matrix t = Matrix::Zero(m + 1, total + 1);
  t.topLeftCorner(m, nc) = rows;
  t.col(total).head(m) = rhs;
  Eigen::Index a = art0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (basis[i] < 0) {
      t(i, a) = 1.0;
      basis[i] = a++;
    }
  }

  detail::Tableau tab(std::move(t), std::move(basis), tol);
  Matrix& T = tab.data();
  // Feasibility is judged relative to the rows that carry artificials.
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (tab.basis()[i] >= art0) scale = std::max(scale, rhs(i));

  if (n_art > 0) {
    // Phase 1: maximize -sum(artificials).
    T.row(m).setZero();
    for (Eigen::Index j = art0; j < total; ++j) T(m, j) = 1.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (tab.basis()[i] >= art0) T.row(m) -= T.row(i);
    std::vector<bool> allowed(total, true);
    tab.optimize(allowed);
    // The phase-1 optimum -sum(artificials) is zero exactly when the system is feasible.
    if (T(m, total) < -1e-9 * scale) {
      return {LpStatus::Infeasible, 0.0, Vector()};
    }
    // Drive artificials out of the basis; drop redundant rows.
    for (Eigen::Index i = 0; i < tab.rows(); ++i) {
      if (tab.basis()[i] < art0) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < art0; ++j) {
        if (std::abs(T(i, j)) > 1e-9) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) {
        tab.pivot(i, enter);
      } else {
        T(i, total) = 0.0;
        T.row(i).head(total).setZero();
      }
    }
  }

  // Phase 2.
  T.row(m).setZero();
  for (Eigen::Index j = 0; j < n; ++j) {
    T(m, pos_col[j]) = -lp.objective(j);
    if (neg_col[j] >= 0) T(m, neg_col[j]) = lp.objective(j);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index b = tab.basis()[i];
    if (b < art0 && T(m, b) != 0.0) T.row(m) -= T(m, b) * T.row(i);
  }
  std::vector<bool> allowed(total, false);
  for (Eigen::Index j = 0; j < art0; ++j) allowed[j] = true;
  if (!tab.optimize(allowed)) return {LpStatus::Unbounded, std::numeric_limits<double>::infinity(), Vector()};

  Vector col_values = Vector::Zero(total);
  for (Eigen::Index i = 0; i < m; ++i)
    if (tab.basis()[i] < total) col_values(tab.basis()[i]) = T(i, total);
  Vector x(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j) = col_values(pos_col[j]);
    if (neg_col[j] >= 0) x(j) -= col_values(neg_col[j]);
  }
  return {LpStatus::Optimal, lp.objective.dot(x), x};
}

}  // namespace qhelly
