#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctd/trajectory.hpp"

namespace ctd {

/// Bid structure of one unit. Covers plain power bids (a terms), ramp bids
/// (b terms, with b_abs the coefficient on |xdot|) and energy bids (e terms
/// on the accumulated energy z).
struct CostFunction {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double b_abs = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;

    bool has_ramp_terms() const { return b1 != 0.0 || b2 != 0.0 || b_abs != 0.0; }
    bool has_energy_terms() const { return e1 != 0.0 || e2 != 0.0; }
};

/// Partial derivatives of a CostFunction at a point, in (z, x, r) order.
struct CostGradients {
    double dz = 0.0;
    double dx = 0.0;
    double dr = 0.0;
};

/// C(z, x, r) = a0 + a1 x + a2 x^2 + b1 r + b2 r^2 + b_abs |r| + e1 z + e2 z^2.
double cost_value(const CostFunction& c, double z, double x, double r);

/// Gradient of cost_value. Throws NondifferentiableError at the |r| kink
/// (b_abs > 0 and r = 0); callers fall back to ramp_subgradient there.
CostGradients cost_gradients(const CostFunction& c, double z, double x, double r);

/// Subgradient interval of the r-derivative at r = 0: [b1 - b_abs, b1 + b_abs].
std::pair<double, double> ramp_subgradient(const CostFunction& c);

struct Unit {
    std::string id;
    double p_min = 0.0;
    double p_max = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    std::optional<double> z_max;
    CostFunction cost;
};

struct SlackPolicy {
    bool enabled = false;
    double price = 10000.0;
};

/// Synthetic net-load shape: base plus morning and evening Gaussian bumps
/// minus a midday solar well.
struct DuckParams {
    double base = 800.0;
    double morning_peak = 150.0;
    double morning_center = 8.0;
    double morning_width = 2.0;
    double evening_peak = 350.0;
    double evening_center = 19.5;
    double evening_width = 2.0;
    double solar_depth = 400.0;
    double solar_center = 13.5;
    double solar_width = 3.0;
};

double duck_value(const DuckParams& p, double t);
double duck_slope(const DuckParams& p, double t);
/// Samples the closed-form curve on a 24 h mesh (values and exact slopes).
Trajectory duck_curve(const DuckParams& p, const Mesh& mesh);

/// Raw load description as ingested; kept alongside the realized trajectory
/// so scenarios serialize back to their input form.
struct LoadSpec {
    enum class Kind { Samples, Duck };
    Kind kind = Kind::Samples;
    std::vector<double> times;
    std::vector<double> values;
    DuckParams duck;
};

struct Scenario {
    Horizon horizon{0.0, 1.0};
    LoadSpec load_spec;
    Trajectory load;
    std::vector<Unit> units;
    SlackPolicy slack;
};

/// Validates all invariants and realizes the load trajectory.
/// Every violation is reported as a SchemaError naming the offending field.
Scenario make_scenario(Horizon horizon, LoadSpec load, std::vector<Unit> units,
                       SlackPolicy slack);

/// Parse scenario JSON (see README for the schema). Unknown keys are rejected.
Scenario load_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

/// Load value and derivative at the nodes of an arbitrary mesh over the
/// scenario horizon. Duck loads use the closed form; sampled loads are
/// interpolated (derivatives by centered differences).
std::pair<std::vector<double>, std::vector<double>> sample_load(const Scenario& s,
                                                                const Mesh& mesh);

}  // namespace ctd
