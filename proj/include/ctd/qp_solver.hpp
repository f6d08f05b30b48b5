#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ctd/errors.hpp"

namespace ctd {

/// Convex quadratic program
///   min 1/2 u'Hu + c'u + offset   s.t.  A u = b,  G u <= h.
struct QpProblem {
    Eigen::MatrixXd H;
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double, Eigen::RowMajor> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double, Eigen::RowMajor> G;
    Eigen::VectorXd h;
    double offset = 0.0;

    Eigen::Index num_vars() const { return c.size(); }
    Eigen::Index num_eq() const { return b.size(); }
    Eigen::Index num_ineq() const { return h.size(); }

    /// Checks dimensional consistency, symmetry of H, and positive
    /// semidefiniteness (Cholesky of H plus a small shift).
    void validate() const;
};

enum class QpStatus { Optimal, MaxIter, Infeasible, Unbounded };
const char* to_string(QpStatus s);

/// One row of the iterate log; kept for determinism and weak-duality tests.
struct QpIterate {
    double primal_obj = 0.0;
    double dual_obj = 0.0;   // Lagrangian dual estimate at the iterate
    double comp_gap = 0.0;   // s'omega
    double r_dual = 0.0;
    double r_eq = 0.0;
    double r_ineq = 0.0;
};

struct QpSolution {
    QpStatus status = QpStatus::MaxIter;
    Eigen::VectorXd u;
    Eigen::VectorXd nu;     // equality duals: L = f + nu'(Au-b)
    Eigen::VectorXd omega;  // inequality duals, >= 0
    Eigen::VectorXd slack;  // h - Gu at the returned point
    double gap = 0.0;       // relative complementarity gap
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    int iterations = 0;
    std::vector<QpIterate> trace;
};

struct KktResiduals {
    double stationarity = 0.0;
    double primal_eq = 0.0;
    double primal_ineq = 0.0;
    double complementarity = 0.0;
    double dual_negativity = 0.0;
    double worst() const;
};

/// Mehrotra predictor-corrector interior-point method. Deterministic: a fixed
/// starting-point rule and no pivoting, so identical inputs give bit-identical
/// iterate sequences.
QpSolution solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 100);

KktResiduals residuals(const QpProblem& p, const QpSolution& s);

/// LDL' factorization of a symmetric quasidefinite matrix, lower triangle,
/// no pivoting, blocked right-looking updates. Kept public for direct tests.
class QdLdlt {
public:
    /// Factors in place; only the lower triangle of K is referenced.
    void compute(Eigen::MatrixXd K);
    Eigen::VectorXd solve(Eigen::VectorXd rhs) const;
    const Eigen::VectorXd& diagonal() const { return d_; }

private:
    Eigen::MatrixXd l_;
    Eigen::VectorXd d_;
};

}  // namespace ctd
