#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctd/market_model.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/trajectory.hpp"

namespace ctd {

/// Load perturbation y -> y + epsilon * eta for the marginal-value check.
struct PerturbationSpec {
    enum class Shape { UniformLift, Custom };
    Shape shape = Shape::UniformLift;
    double epsilon = 1e-3;
    /// Custom shape only; must vanish at both horizon ends (within 1e-9).
    std::optional<Trajectory> eta;
};

struct VerificationReport {
    std::string mode;
    bool passed = false;
    double lhs = 0.0;             // mode-specific left side (see each check)
    double rhs = 0.0;
    double relative_error = 0.0;
    KktResiduals kkt;             // worst over all solves involved
    std::vector<int> interval_counts;
    std::vector<double> lambda_errors;
    std::vector<double> x_errors;
    std::vector<double> el_residuals;
    std::vector<double> orders;   // observed convergence orders (refine mode)
    bool ramp_activated = false;  // perturbation newly activated a ramp bound
    std::vector<std::string> notes;
};

/// Solve once and audit the optimality conditions: duality gap, KKT
/// residuals, dual signs, and the stationarity identity at the nodes.
VerificationReport kkt_check(const Scenario& s, Scheme scheme, int intervals, double tol);

/// Finite-difference marginal value of the load against the integral of
/// lambda: lhs = (L(eps) - L)/eps, rhs = sum of w_i lambda_i eta_i.
/// A perturbation that newly activates a ramp constraint is flagged rather
/// than failed, since the marginal-value identity is then one-sided.
VerificationReport perturbation_check(const Scenario& s, const PerturbationSpec& spec,
                                      Scheme scheme, int intervals);

/// Solve on each interval count (strictly increasing, at least three) and
/// measure lambda and x drift against the finest run at shared interior
/// nodes, plus the observed convergence orders.
VerificationReport refinement_study(const Scenario& s, const std::vector<int>& counts,
                                    Scheme scheme);

/// Solve with both schemes on the same mesh and compare lambda node by node,
/// masking nodes within two intervals of a constraint-activity switch.
VerificationReport cross_scheme_check(const Scenario& s, int intervals);

}  // namespace ctd
