#include "ctd/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctd {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpIt = SpMat::InnerIterator;

double inf_norm(const Eigen::VectorXd& v) {
    return v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
}

// Largest step in [0, inf) keeping v + alpha * dv >= 0 for strictly positive v.
double max_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
    double a = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    return a;
}

}  // namespace

const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "OPTIMAL";
        case QpStatus::MaxIter: return "MAX_ITER";
        case QpStatus::Infeasible: return "INFEASIBLE";
        case QpStatus::Unbounded: return "UNBOUNDED";
    }
    return "UNKNOWN";
}

void QpProblem::validate() const {
    const Eigen::Index n = num_vars();
    if (n < 1) throw DomainError("QpProblem: need at least one variable");
    if (H.rows() != n || H.cols() != n)
        throw DomainError("QpProblem: H dimensions inconsistent with c");
    if (A.rows() != b.size()) throw DomainError("QpProblem: A rows must match b");
    if (num_eq() > 0 && A.cols() != n) throw DomainError("QpProblem: A cols must match c");
    if (G.rows() != h.size()) throw DomainError("QpProblem: G rows must match h");
    if (num_ineq() > 0 && G.cols() != n) throw DomainError("QpProblem: G cols must match c");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw DomainError("QpProblem: H must be symmetric");
    Eigen::MatrixXd Hs = H;
    Hs.diagonal().array() += 1e-8 * scale;
    if (Eigen::LLT<Eigen::MatrixXd>(Hs).info() != Eigen::Success)
        throw DomainError("QpProblem: H must be positive semidefinite");
}

double KktResiduals::worst() const {
    return std::max({stationarity, primal_eq, primal_ineq, complementarity, dual_negativity});
}

void QdLdlt::compute(Eigen::MatrixXd K) {
    const Eigen::Index n = K.rows();
    if (K.cols() != n) throw DomainError("QdLdlt: matrix must be square");
    d_.resize(n);
    const Eigen::Index B = 96;
    for (Eigen::Index p0 = 0; p0 < n; p0 += B) {
        const Eigen::Index p1 = std::min(p0 + B, n);
        for (Eigen::Index j = p0; j < p1; ++j) {
            double dj = K(j, j);
            // Quasidefinite inputs keep the pivots away from zero; guard anyway.
            if (dj == 0.0) dj = std::numeric_limits<double>::min();
            d_(j) = dj;
            const Eigen::Index r = p1 - j - 1;
            if (r > 0) {
                auto col = K.col(j).segment(j + 1, r);
                col /= dj;
                for (Eigen::Index cc = 0; cc < r; ++cc)
                    K.col(j + 1 + cc).segment(j + 1 + cc, r - cc).noalias() -=
                        col.segment(cc, r - cc) * (dj * col(cc));
            }
        }
        const Eigen::Index rows = n - p1;
        if (rows > 0) {
            const Eigen::Index bw = p1 - p0;
            // K_panel = L_panel D_p L_pp', so L_pp (D_p L_panel') = K_panel'.
            Eigen::MatrixXd yt = K.block(p1, p0, rows, bw).transpose();
            K.block(p0, p0, bw, bw).triangularView<Eigen::UnitLower>().solveInPlace(yt);
            Eigen::MatrixXd w = yt.transpose();  // = L_panel * D_p
            Eigen::MatrixXd lp = w;
            for (Eigen::Index jj = 0; jj < bw; ++jj) lp.col(jj) /= d_(p0 + jj);
            K.block(p1, p1, rows, rows).noalias() -= lp * w.transpose();
            K.block(p1, p0, rows, bw) = lp;
        }
    }
    l_ = std::move(K);
}

Eigen::VectorXd QdLdlt::solve(Eigen::VectorXd rhs) const {
    l_.triangularView<Eigen::UnitLower>().solveInPlace(rhs);
    rhs.array() /= d_.array();
    l_.triangularView<Eigen::UnitLower>().transpose().solveInPlace(rhs);
    return rhs;
}

QpSolution solve_qp(const QpProblem& p, double tol, int max_iter) {
    if (!(tol > 0.0)) throw DomainError("solve_qp: tol must be positive");
    if (max_iter < 1) throw DomainError("solve_qp: max_iter must be positive");
    p.validate();

    const Eigen::Index n = p.num_vars();
    const Eigen::Index me = p.num_eq();
    const Eigen::Index mi = p.num_ineq();
    const double delta = 1e-10;
    const Eigen::Index dim = n + me;

    // Normalize the objective so the iterates do not depend on the cost
    // units; dual variables and reported objectives are mapped back on exit.
    double scale = std::max(p.H.cwiseAbs().maxCoeff(), inf_norm(p.c));
    if (!(scale > 0.0)) scale = 1.0;
    const Eigen::MatrixXd Hs = p.H / scale;
    const Eigen::VectorXd cs = p.c / scale;
    const double offs = p.offset / scale;

    QpSolution sol;
    Eigen::MatrixXd K(dim, dim);
    QdLdlt ldlt;

    auto build_kkt = [&](const Eigen::VectorXd& D) {
        K.setZero();
        K.topLeftCorner(n, n) = Hs;
        K.topLeftCorner(n, n).diagonal().array() += delta;
        for (Eigen::Index r = 0; r < mi; ++r) {
            const double dr = D(r);
            for (SpIt it1(p.G, r); it1; ++it1)
                for (SpIt it2(p.G, r); it2; ++it2)
                    K(it1.col(), it2.col()) += dr * it1.value() * it2.value();
        }
        for (Eigen::Index r = 0; r < me; ++r)
            for (SpIt it(p.A, r); it; ++it) K(n + r, it.col()) = it.value();
        if (me > 0) K.bottomRightCorner(me, me).diagonal().setConstant(-delta);
    };

    auto solve_refined = [&](const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = ldlt.solve(rhs);
        Eigen::VectorXd resid = rhs - K.selfadjointView<Eigen::Lower>() * x;
        x += ldlt.solve(resid);
        return x;
    };

    auto objective = [&](const Eigen::VectorXd& u) {
        return 0.5 * u.dot(Hs * u) + cs.dot(u) + offs;
    };

    // Equality-constrained quadratic: one Newton solve.
    if (mi == 0) {
        build_kkt(Eigen::VectorXd());
        ldlt.compute(K);
        Eigen::VectorXd rhs(dim);
        rhs.head(n) = -cs;
        rhs.tail(me) = p.b;
        Eigen::VectorXd x = solve_refined(rhs);
        sol.u = x.head(n);
        sol.nu = scale * x.tail(me);
        sol.omega.resize(0);
        sol.slack.resize(0);
        sol.iterations = 1;
        sol.primal_obj = scale * objective(sol.u);
        sol.dual_obj = sol.primal_obj;
        sol.gap = 0.0;
        Eigen::VectorXd r_dual = Hs * sol.u + cs;
        if (me > 0) r_dual += p.A.transpose() * (sol.nu / scale);
        const double rd = inf_norm(r_dual) / (1.0 + inf_norm(cs));
        const double re = me > 0 ? inf_norm(p.A * sol.u - p.b) / (1.0 + inf_norm(p.b)) : 0.0;
        sol.trace.push_back({sol.primal_obj, sol.dual_obj, 0.0, rd, re, 0.0});
        if (inf_norm(sol.u) > 1e8)
            sol.status = QpStatus::Unbounded;
        else if (rd <= 10.0 * tol && re <= 10.0 * tol)
            sol.status = QpStatus::Optimal;
        else
            sol.status = QpStatus::MaxIter;
        return sol;
    }

    Eigen::VectorXd u, nu, s, omega;
    {
        build_kkt(Eigen::VectorXd::Ones(mi));
        ldlt.compute(K);
        Eigen::VectorXd rhs(dim);
        rhs.head(n) = -cs + p.G.transpose() * p.h;
        rhs.tail(me) = p.b;
        Eigen::VectorXd x = solve_refined(rhs);
        u = x.head(n);
        nu = x.tail(me);
        Eigen::VectorXd st = p.h - p.G * u;
        s = st.cwiseMax(1.0);
        omega = (-st).cwiseMax(1.0);
    }

    sol.status = QpStatus::MaxIter;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mi);
    for (int iter = 0; iter < max_iter; ++iter) {
        Eigen::VectorXd r_dual = Hs * u + cs + p.G.transpose() * omega;
        if (me > 0) r_dual += p.A.transpose() * nu;
        Eigen::VectorXd r_eq = me > 0 ? Eigen::VectorXd(p.A * u - p.b) : Eigen::VectorXd();
        Eigen::VectorXd r_in = p.G * u + s - p.h;
        const double comp = s.dot(omega);
        const double mu = comp / static_cast<double>(mi);
        const double primal = objective(u);
        double dual_lagr = -0.5 * u.dot(Hs * u) - p.h.dot(omega) + offs;
        if (me > 0) dual_lagr -= p.b.dot(nu);
        const double relgap = comp / (1.0 + std::abs(primal));
        const double rd = inf_norm(r_dual) / (1.0 + inf_norm(cs));
        const double re = inf_norm(r_eq) / (1.0 + inf_norm(p.b));
        const double ri = inf_norm(r_in) / (1.0 + inf_norm(p.h));
        sol.trace.push_back({scale * primal, scale * dual_lagr, scale * comp, rd, re, ri});
        sol.iterations = iter;
        sol.primal_obj = scale * primal;
        sol.dual_obj = scale * (primal - comp);
        sol.gap = relgap;
        if (relgap <= tol && rd <= 10.0 * tol && re <= 10.0 * tol && ri <= 10.0 * tol) {
            sol.status = QpStatus::Optimal;
            break;
        }
        if (primal < -1e12 || !std::isfinite(primal) || inf_norm(u) > 1e10) {
            sol.status = QpStatus::Unbounded;
            break;
        }
        if (std::max(inf_norm(r_eq), inf_norm(r_in)) > 1e-6 && dual_lagr > 1e8) {
            sol.status = QpStatus::Infeasible;
            break;
        }

        const Eigen::VectorXd D = omega.cwiseQuotient(s);
        build_kkt(D);
        ldlt.compute(K);

        Eigen::VectorXd rhs(dim);
        if (me > 0) rhs.tail(me) = -r_eq;

        // Predictor (affine scaling direction).
        Eigen::VectorXd rc = s.cwiseProduct(omega);
        rhs.head(n) = -r_dual + p.G.transpose() *
                                    (rc.cwiseQuotient(s) - D.cwiseProduct(r_in));
        Eigen::VectorXd x = solve_refined(rhs);
        Eigen::VectorXd du = x.head(n);
        Eigen::VectorXd ds = -r_in - p.G * du;
        Eigen::VectorXd dom = -rc.cwiseQuotient(s) - D.cwiseProduct(ds);

        const double ap_aff = std::min(1.0, max_step(s, ds));
        const double ad_aff = std::min(1.0, max_step(omega, dom));
        const double mu_aff =
            (s + ap_aff * ds).dot(omega + ad_aff * dom) / static_cast<double>(mi);
        double sigma = std::pow(mu_aff / mu, 3);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector with centering.
        rc += ds.cwiseProduct(dom) - sigma * mu * ones;
        rhs.head(n) = -r_dual + p.G.transpose() *
                                    (rc.cwiseQuotient(s) - D.cwiseProduct(r_in));
        x = solve_refined(rhs);
        du = x.head(n);
        Eigen::VectorXd dnu = x.tail(me);
        ds = -r_in - p.G * du;
        dom = -rc.cwiseQuotient(s) - D.cwiseProduct(ds);

        const double alpha =
            std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(omega, dom)));
        u += alpha * du;
        if (me > 0) nu += alpha * dnu;
        s += alpha * ds;
        omega += alpha * dom;
    }

    sol.u = u;
    sol.nu = scale * nu;
    sol.omega = scale * omega;
    sol.slack = p.h - p.G * u;
    return sol;
}

KktResiduals residuals(const QpProblem& p, const QpSolution& s) {
    if (s.u.size() != p.num_vars() || s.nu.size() != p.num_eq() ||
        s.omega.size() != p.num_ineq())
        throw DomainError("residuals: solution dimensions do not match problem");
    KktResiduals r;
    Eigen::VectorXd stat = p.H * s.u + p.c;
    if (p.num_eq() > 0) stat += p.A.transpose() * s.nu;
    if (p.num_ineq() > 0) stat += p.G.transpose() * s.omega;
    r.stationarity = inf_norm(stat);
    if (p.num_eq() > 0) r.primal_eq = inf_norm(p.A * s.u - p.b);
    if (p.num_ineq() > 0) {
        Eigen::VectorXd viol = p.G * s.u - p.h;
        r.primal_ineq = std::max(0.0, viol.maxCoeff());
        r.complementarity = inf_norm(s.omega.cwiseProduct(viol));
        r.dual_negativity = std::max(0.0, -s.omega.minCoeff());
    }
    return r;
}

}  // namespace ctd
