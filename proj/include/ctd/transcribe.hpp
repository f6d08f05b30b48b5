#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctd/market_model.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/trajectory.hpp"

namespace ctd {

enum class RowKind {
    // equality rows
    Balance,       // y(t_i) - sum_k x_k(t_i) = 0; dual/weight = lambda(t_i)
    BalanceDeriv,  // ydot(t_i) - sum_k xdot_k(t_i) = 0 (C1 scheme only)
    EnergyInit,    // z_k(t_0) = 0
    EnergyLink,    // z_k(t_{j+1}) = z_k(t_j) + segment integral of x_k
    RampSplit,     // xdot = r+ - r- where |xdot| is priced
    // inequality rows
    PMax,          // dual/weight = mu_hi
    PMin,          // dual/weight = mu_lo
    RMax,          // dual/weight = gamma_hi, on the ramp point grid
    RMin,          // dual/weight = gamma_lo
    ZMax,          // dual/weight = beta_hi
    SplitPos,      // r+ >= 0, r- >= 0
    SlackMin,
    SlackMax,
};

/// Where one QP constraint row came from and how its dual maps back to a
/// continuous-time multiplier sample: multiplier = sign * dual / weight.
struct DualRow {
    RowKind kind;
    int unit = -1;  // -1 for system rows and the slack unit
    int index = 0;  // node, interval, or ramp-point index
    double time = 0.0;
    double weight = 1.0;
    double sign = 1.0;
};

/// Column layout of the transcribed QP.
struct VarLayout {
    Scheme scheme = Scheme::PiecewiseLinear;
    int intervals = 0;
    int num_units = 0;
    bool slack_enabled = false;
    std::vector<int> x_base;   // per unit: node power values (N+1 columns)
    std::vector<int> d_base;   // per unit: node derivatives, C1 scheme (-1 otherwise)
    std::vector<int> z_base;   // per unit: node energies (-1 when inactive)
    std::vector<int> rp_base;  // per unit: ramp-split r+ (-1 when b_abs = 0)
    std::vector<int> rm_base;  // per unit: ramp-split r-
    int slack_base = -1;
    int slack_d_base = -1;
    int split_points = 0;  // split columns per split unit: N (PL) or N+1 (C1)
    int total_vars = 0;
};

struct DualMap {
    Mesh mesh;
    VarLayout layout;
    std::vector<std::string> unit_ids;
    std::vector<DualRow> eq_rows;    // one entry per equality row, in row order
    std::vector<DualRow> ineq_rows;  // one entry per inequality row, in row order
};

struct Transcription {
    QpProblem qp;
    DualMap map;
};

/// Collocation transcription of the dispatch problem. Constraint rows are in
/// natural units; the quadrature weight of each row is recorded in the DualMap
/// so that dual/weight is a sample of the continuous multiplier.
Transcription transcribe(const Scenario& s, Scheme scheme, int intervals);

struct Schedule {
    std::vector<std::string> unit_ids;
    std::vector<Trajectory> power;                 // per unit
    std::vector<std::optional<Trajectory>> energy; // per unit, when z is transcribed
    std::optional<Trajectory> slack_power;
    Trajectory load;      // the load as materialized on the transcription mesh
    double objective = 0.0;
    double balance_repair = 0.0;  // largest node adjustment applied to restore balance
};

/// Assemble trajectories from a primal vector. The objective is recomputed
/// from the recovered coefficients through closed-form segment integrals that
/// never touch the assembled H and c, so it doubles as an assembly
/// cross-check against the QP value. Residual node imbalance is folded into
/// the slack unit (or the unit with most headroom) and the magnitude
/// recorded.
Schedule recover_schedule(const Eigen::VectorXd& primal, const DualMap& map,
                          const Scenario& s);

}  // namespace ctd
