#pragma once

#include <string>
#include <vector>

#include "ctd/market_model.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/trajectory.hpp"
#include "ctd/transcribe.hpp"

namespace ctd {

/// Samples of a multiplier that lives on the ramp-point grid rather than the
/// mesh nodes (interval midpoints for the linear scheme, nodes and midpoints
/// interleaved for the C1 scheme). Times are increasing.
struct StaggeredSeries {
    std::vector<double> times;
    std::vector<double> values;
};

struct UnitMultipliers {
    std::vector<double> mu_hi;   // capacity, at nodes
    std::vector<double> mu_lo;
    std::vector<double> beta_hi; // energy cap, at nodes (zeros when untranscribed)
    StaggeredSeries gamma_hi;    // ramp-up, on the ramp-point grid
    StaggeredSeries gamma_lo;    // ramp-down
};

struct MultiplierTrajectories {
    Mesh mesh;
    std::vector<std::string> unit_ids;
    std::vector<double> lambda;  // balance dual per node
    std::vector<UnitMultipliers> units;
    std::vector<double> slack_mu_lo;  // slack bound duals at nodes; empty if disabled
    std::vector<double> slack_mu_hi;
};

/// Scale QP duals back to continuous-time multiplier samples using the row
/// weights recorded in the DualMap. Refuses non-optimal solutions.
MultiplierTrajectories recover_multipliers(const QpSolution& sol, const DualMap& map);

/// Piecewise-linear interpolation of a staggered series at the mesh nodes,
/// clamped at the ends.
std::vector<double> staggered_at_nodes(const StaggeredSeries& series, const Mesh& mesh);

/// Centered finite difference of a staggered series at time t, one-sided at
/// the ends of the series.
double staggered_derivative_at(const StaggeredSeries& series, double t);

/// Activity threshold below which a multiplier is treated as zero:
/// 1e-6 * (median of the active multipliers + 1).
double default_marginal_tol(const MultiplierTrajectories& m);

/// Per node, the ids of units whose private constraints (capacity, ramp near
/// the node, energy cap) all carry multipliers below tol. An interior slack
/// unit appears as "slack".
std::vector<std::vector<std::string>> marginal_units(const MultiplierTrajectories& m, double tol);

/// A node where a unit's ramp cost is nondifferentiable (|xdot| at the kink of
/// b_abs |xdot|); the price identity only pins lambda to the subgradient range.
struct KinkFlag {
    int unit = 0;
    int node = 0;
    double sub_lo = 0.0;  // subgradient interval of the ramp cost at xdot = 0
    double sub_hi = 0.0;
};

struct PriceReport {
    std::vector<std::string> unit_ids;
    std::vector<double> times;
    std::vector<double> lambda_dual;     // balance dual
    std::vector<double> lambda_formula;  // marginal-unit formula; NaN when unavailable
    std::vector<double> residual;        // |dual - formula|, NaN-propagating
    std::vector<std::vector<std::string>> marginal_set;
    std::vector<std::vector<double>> lambda_hat;  // per unit: full price identity, NaN at kinks
    std::vector<KinkFlag> kinks;
    double marginal_tol = 0.0;
    double max_identity_residual = 0.0;  // over units and interior nodes, ignoring NaNs
};

/// Evaluate the marginal-unit price formula and the per-unit price identity
/// lambda = dC/dx + mu_hi - mu_lo - d/dt(dC/dxdot + gamma_hi - gamma_lo)
///          + integral to t2 of (dC/dz + beta_hi)
/// against the balance dual.
PriceReport price_formula(const Scenario& s, const Schedule& sched,
                          const MultiplierTrajectories& m);

struct EulerLagrangeReport {
    std::vector<double> times;
    std::vector<std::vector<double>> residual;  // per unit per node, NaN at kinks
    std::vector<double> terminal_dgamma;        // d/dt(gamma_hi - gamma_lo) at t2, per unit
    double max_interior_residual = 0.0;
};

/// Residual of the stationarity identity per unit and node; the terminal
/// ramp-dual slope is reported rather than enforced.
EulerLagrangeReport euler_lagrange_residual(const Scenario& s, const Schedule& sched,
                                            const MultiplierTrajectories& m);

struct HourlyAggregate {
    std::vector<std::string> ids;  // unit ids, plus "slack" when present
    std::vector<std::vector<double>> mwh;  // per id, per hour
};

/// Per-unit energy per clock hour. The horizon must span an integer number of
/// hours (within 1e-9), else a DomainError.
HourlyAggregate aggregate_hourly(const Schedule& sched);

}  // namespace ctd
