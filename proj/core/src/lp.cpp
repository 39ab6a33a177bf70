#include "ccopf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>

#include "ccopf/errors.hpp"
#include "detail_fmt.hpp"

namespace ccopf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Bounds at or beyond this magnitude are treated as absent, matching the
// usual solver convention; shifting variables by such values would drown
// the actual data.
constexpr double kBoundInf = 1e20;

// How an original variable maps onto nonnegative standard-form columns.
struct VarMap {
  enum Kind { Shifted, Mirrored, Split } kind;
  int col = -1;   // primary column
  int col2 = -1;  // negative part for Split
  double offset = 0.0;
};

// Dense tableau for min c.z, M z = r, z >= 0. Last row holds reduced costs,
// last column the rhs.
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)) {}

  double& at(int i, int j) { return t_(i, j); }
  double& rhs(int i) { return t_(i, n_); }
  double& cost(int j) { return t_(m_, j); }
  double& neg_obj() { return t_(m_, n_); }
  double at(int i, int j) const { return t_(i, j); }
  double rhs(int i) const { return t_(i, n_); }
  double cost(int j) const { return t_(m_, j); }
  double neg_obj() const { return t_(m_, n_); }

  void pivot(int pr, int pc) {
    t_.row(pr) /= t_(pr, pc);
    for (int i = 0; i <= m_; ++i) {
      if (i == pr) continue;
      double f = t_(i, pc);
      if (f != 0.0) t_.row(i) -= f * t_.row(pr);
    }
  }

  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  int m_, n_;
  Eigen::MatrixXd t_;
};

class SimplexSolver {
 public:
  SimplexSolver(const LpProblem& lp, const SimplexOptions& opt) : lp_(lp), opt_(opt) {
    build_standard_form();
  }

  LpSolution run() {
    LpSolution sol;
    if (trivially_infeasible_) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    build_tableau();
    if (!phase1(sol)) return sol;   // infeasible
    if (!phase2(sol)) return sol;   // unbounded
    extract(sol);
    return sol;
  }

 private:
  const LpProblem& lp_;
  SimplexOptions opt_;

  std::vector<VarMap> vmap_;
  Eigen::VectorXd lo_, up_;            // bounds with the +-1e20 convention applied
  int nstd_ = 0;                       // structural standard columns
  std::vector<Eigen::VectorXd> rows_;  // standard-form row coefficients
  std::vector<double> rrhs_;
  std::vector<int> row_origin_;        // original row index, -1 for bound rows
  bool trivially_infeasible_ = false;

  std::unique_ptr<Tableau> tab_;
  int m_ = 0, ncols_ = 0, nart_ = 0;
  std::vector<int> basis_;
  std::vector<char> flipped_;
  std::vector<int> art_row_;  // artificial col -> row
  long iters_ = 0;

  void add_row(const Eigen::VectorXd& coeff, double rhs, int origin) {
    rows_.push_back(coeff);
    rrhs_.push_back(rhs);
    row_origin_.push_back(origin);
  }

  void build_standard_form() {
    const int n = lp_.num_vars();
    vmap_.resize(n);
    lo_.resize(n);
    up_.resize(n);
    for (int j = 0; j < n; ++j) {
      lo_(j) = lp_.lower(j) <= -kBoundInf ? -kInf : lp_.lower(j);
      up_(j) = lp_.upper(j) >= kBoundInf ? kInf : lp_.upper(j);
      if (lo_(j) > up_(j)) { trivially_infeasible_ = true; return; }
      if (std::isfinite(lo_(j))) {
        vmap_[j] = {VarMap::Shifted, nstd_++, -1, lo_(j)};
      } else if (std::isfinite(up_(j))) {
        vmap_[j] = {VarMap::Mirrored, nstd_++, -1, up_(j)};
      } else {
        vmap_[j] = {VarMap::Split, nstd_, nstd_ + 1, 0.0};
        nstd_ += 2;
      }
    }
    // Original rows.
    for (int i = 0; i < lp_.num_rows(); ++i) {
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(nstd_);
      double rhs = lp_.rhs(i);
      for (int j = 0; j < n; ++j) {
        double a = lp_.A(i, j);
        if (a == 0.0) continue;
        apply_coeff(coeff, rhs, j, a);
      }
      add_row(coeff, rhs, i);
    }
    // Finite upper bounds of shifted variables become rows.
    for (int j = 0; j < n; ++j) {
      if (vmap_[j].kind == VarMap::Shifted && std::isfinite(up_(j))) {
        Eigen::VectorXd coeff = Eigen::VectorXd::Zero(nstd_);
        coeff(vmap_[j].col) = 1.0;
        add_row(coeff, up_(j) - lo_(j), -1);
      }
    }
  }

  void apply_coeff(Eigen::VectorXd& coeff, double& rhs, int j, double a) const {
    const VarMap& vm = vmap_[j];
    switch (vm.kind) {
      case VarMap::Shifted:
        coeff(vm.col) += a;
        rhs -= a * vm.offset;
        break;
      case VarMap::Mirrored:
        coeff(vm.col) -= a;
        rhs -= a * vm.offset;
        break;
      case VarMap::Split:
        coeff(vm.col) += a;
        coeff(vm.col2) -= a;
        break;
    }
  }

  void build_tableau() {
    m_ = static_cast<int>(rows_.size());
    flipped_.assign(m_, 0);
    nart_ = 0;
    for (int i = 0; i < m_; ++i)
      if (rrhs_[i] < 0.0) { flipped_[i] = 1; ++nart_; }

    ncols_ = nstd_ + m_ + nart_;
    tab_ = std::make_unique<Tableau>(m_, ncols_);
    basis_.assign(m_, -1);
    art_row_.clear();

    int art = nstd_ + m_;
    for (int i = 0; i < m_; ++i) {
      double sgn = flipped_[i] ? -1.0 : 1.0;
      for (int j = 0; j < nstd_; ++j) tab_->at(i, j) = sgn * rows_[i](j);
      tab_->at(i, nstd_ + i) = sgn;  // slack
      tab_->rhs(i) = sgn * rrhs_[i];
      if (flipped_[i]) {
        tab_->at(i, art) = 1.0;
        basis_[i] = art;
        art_row_.push_back(i);
        ++art;
      } else {
        basis_[i] = nstd_ + i;
      }
    }
  }

  void set_costs_phase1() {
    for (int j = 0; j <= ncols_; ++j) tab_->cost(j) = 0.0;
    for (int j = nstd_ + m_; j < ncols_; ++j) tab_->cost(j) = 1.0;
    tab_->neg_obj() = 0.0;
    price_out_basis();
  }

  void set_costs_phase2() {
    for (int j = 0; j <= ncols_; ++j) tab_->cost(j) = 0.0;
    for (int jo = 0; jo < lp_.num_vars(); ++jo) {
      const VarMap& vm = vmap_[jo];
      double c = lp_.objective(jo);
      switch (vm.kind) {
        case VarMap::Shifted: tab_->cost(vm.col) += c; break;
        case VarMap::Mirrored: tab_->cost(vm.col) -= c; break;
        case VarMap::Split:
          tab_->cost(vm.col) += c;
          tab_->cost(vm.col2) -= c;
          break;
      }
    }
    tab_->neg_obj() = 0.0;
    price_out_basis();
  }

  // Make reduced costs of basic columns zero.
  void price_out_basis() {
    for (int i = 0; i < m_; ++i) {
      double cb = tab_->cost(basis_[i]);
      if (cb != 0.0) {
        for (int j = 0; j <= ncols_; ++j) tab_->cost(j) -= cb * tab_->at(i, j);
        // the loop above also fixed the objective cell via column ncols_
      }
    }
  }

  // Returns entering column or -1 if optimal. `allow` masks columns.
  int choose_entering(const std::vector<char>& allow, bool bland) const {
    const Tableau& t = *tab_;
    int best = -1;
    double best_rc = -opt_.pivot_tol;
    for (int j = 0; j < ncols_; ++j) {
      if (!allow[j]) continue;
      double rc = t.cost(j);
      if (rc < -opt_.pivot_tol) {
        if (bland) return j;
        if (rc < best_rc) { best_rc = rc; best = j; }
      }
    }
    return best;
  }

  // Min-ratio leaving row; smallest basis index on ties. -1 => unbounded.
  int choose_leaving(int q) const {
    const Tableau& t = *tab_;
    int row = -1;
    double best = kInf;
    for (int i = 0; i < m_; ++i) {
      double a = t.at(i, q);
      if (a > opt_.pivot_tol) {
        double ratio = t.rhs(i) / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && row >= 0 && basis_[i] < basis_[row])) {
          best = ratio;
          row = i;
        }
      }
    }
    return row;
  }

  // Returns false on unbounded.
  bool iterate(const std::vector<char>& allow, bool* unbounded) {
    int stalled = 0;
    bool bland = false;
    while (true) {
      int q = choose_entering(allow, bland);
      if (q < 0) return true;  // optimal for current costs
      int r = choose_leaving(q);
      if (r < 0) {
        if (unbounded) *unbounded = true;
        return false;
      }
      double before = tab_->neg_obj();
      tab_->pivot(r, q);
      basis_[r] = q;
      if (++iters_ > opt_.max_iterations)
        throw numerical_error("simplex iteration limit reached");
      // Degeneracy watchdog: persistent zero-progress pivots flip on Bland.
      if (std::abs(tab_->neg_obj() - before) <= 1e-15 * (1.0 + std::abs(before))) {
        if (++stalled > 2 * (m_ + ncols_)) bland = true;
      } else {
        stalled = 0;
        bland = false;
      }
    }
  }

  bool phase1(LpSolution& sol) {
    if (nart_ == 0) return true;
    set_costs_phase1();
    std::vector<char> allow(ncols_, 1);
    iterate(allow, nullptr);  // bounded below by zero
    double infeas = -tab_->neg_obj();
    if (infeas > 1e-8) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = iters_;
      // Largest artificial still in the basis marks the worst row.
      double worst = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[i] >= nstd_ + m_ && tab_->rhs(i) > worst) {
          worst = tab_->rhs(i);
          sol.most_violated_row = row_origin_[i];
        }
      }
      return false;
    }
    // Pivot leftover degenerate artificials out of the basis.
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < nstd_ + m_) continue;
      int q = -1;
      for (int j = 0; j < nstd_ + m_; ++j)
        if (std::abs(tab_->at(i, j)) > opt_.pivot_tol) { q = j; break; }
      if (q >= 0) {
        tab_->pivot(i, q);
        basis_[i] = q;
      }
      // A fully zero row is redundant; its artificial stays basic at zero,
      // which is harmless once artificial columns are barred from entering.
    }
    return true;
  }

  bool phase2(LpSolution& sol) {
    set_costs_phase2();
    std::vector<char> allow(ncols_, 1);
    for (int j = nstd_ + m_; j < ncols_; ++j) allow[j] = 0;
    bool unbounded = false;
    iterate(allow, &unbounded);
    if (unbounded) {
      sol.status = LpStatus::Unbounded;
      sol.iterations = iters_;
      return false;
    }
    return true;
  }

  void extract(LpSolution& sol) {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ncols_);
    for (int i = 0; i < m_; ++i) z(basis_[i]) = tab_->rhs(i);

    const int n = lp_.num_vars();
    sol.x.resize(n);
    for (int j = 0; j < n; ++j) {
      const VarMap& vm = vmap_[j];
      switch (vm.kind) {
        case VarMap::Shifted: sol.x(j) = vm.offset + z(vm.col); break;
        case VarMap::Mirrored: sol.x(j) = vm.offset - z(vm.col); break;
        case VarMap::Split: sol.x(j) = z(vm.col) - z(vm.col2); break;
      }
    }
    sol.status = LpStatus::Optimal;
    sol.objective = lp_.objective.dot(sol.x) + lp_.objective_constant;
    sol.iterations = iters_;

    sol.row_duals = Eigen::VectorXd::Zero(lp_.num_rows());
    for (int i = 0; i < m_; ++i) {
      if (row_origin_[i] < 0) continue;
      sol.row_duals(row_origin_[i]) = -tab_->cost(nstd_ + i);
    }
  }
};

}  // namespace

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

void LpProblem::validate() const {
  const int n = num_vars();
  if (A.cols() != n || rhs.size() != A.rows() || lower.size() != n || upper.size() != n)
    throw validation_error("lp: inconsistent dimensions");
  if (!objective.allFinite()) throw validation_error("lp: non-finite objective coefficient");
  if (!A.allFinite()) throw validation_error("lp: non-finite constraint coefficient");
  if (!rhs.allFinite()) throw validation_error("lp: non-finite rhs");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lower(j)) || std::isnan(upper(j)))
      throw validation_error("lp: NaN variable bound");
  }
}

LpSolution solve_lp(const LpProblem& lp, const SimplexOptions& opt) {
  lp.validate();
  SimplexSolver solver(lp, opt);
  return solver.run();
}

std::string lp_export_text(const LpProblem& lp) {
  auto var = [&lp](int j) {
    return j < static_cast<int>(lp.var_labels.size()) && !lp.var_labels[j].empty()
               ? lp.var_labels[j]
               : "x" + std::to_string(j + 1);
  };
  std::ostringstream out;
  out << "\\ ccopf LP export\n";
  out << "\\ objective constant: " << detail::fmt_double(lp.objective_constant) << "\n";
  out << "Minimize\n obj:";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double c = lp.objective(j);
    if (c == 0.0) continue;
    out << (c < 0 ? " - " : " + ") << detail::fmt_double(std::abs(c)) << ' ' << var(j);
  }
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const std::string name = i < static_cast<int>(lp.row_labels.size()) && !lp.row_labels[i].empty()
                                 ? lp.row_labels[i]
                                 : "r" + std::to_string(i + 1);
    out << ' ' << name << ':';
    bool any = false;
    for (int j = 0; j < lp.num_vars(); ++j) {
      double a = lp.A(i, j);
      if (a == 0.0) continue;
      out << (a < 0 ? " - " : " + ") << detail::fmt_double(std::abs(a)) << ' ' << var(j);
      any = true;
    }
    if (!any) out << " 0 " << var(0);
    out << " <= " << detail::fmt_double(lp.rhs(i)) << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    double lo = lp.lower(j), up = lp.upper(j);
    if (!std::isfinite(lo) && !std::isfinite(up)) {
      out << ' ' << var(j) << " free\n";
    } else {
      out << ' ' << (std::isfinite(lo) ? detail::fmt_double(lo) : "-inf") << " <= " << var(j) << " <= "
          << (std::isfinite(up) ? detail::fmt_double(up) : "+inf") << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

}  // namespace ccopf
