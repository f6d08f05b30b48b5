#include "ctd/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ctd/errors.hpp"

namespace ctd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> ramp_grid_times(const Mesh& mesh, Scheme scheme) {
    std::vector<double> times;
    if (scheme == Scheme::CubicHermite) {
        times.reserve(2 * mesh.interval_count() + 1);
        for (std::size_t i = 0; i < mesh.node_count(); ++i) {
            times.push_back(mesh.node(i));
            if (i < mesh.interval_count()) times.push_back(mesh.midpoint(i));
        }
    } else {
        times.reserve(mesh.interval_count());
        for (std::size_t j = 0; j < mesh.interval_count(); ++j) times.push_back(mesh.midpoint(j));
    }
    return times;
}

}  // namespace

MultiplierTrajectories recover_multipliers(const QpSolution& sol, const DualMap& map) {
    if (sol.status != QpStatus::Optimal)
        throw DomainError("multiplier recovery requires an optimal solution, got " +
                          std::string(to_string(sol.status)));
    const Mesh& mesh = map.mesh;
    const std::size_t nodes = mesh.node_count();
    const int K = map.layout.num_units;

    MultiplierTrajectories m{mesh, map.unit_ids, std::vector<double>(nodes, 0.0), {}};
    m.units.resize(K);
    const std::vector<double> grid = ramp_grid_times(mesh, map.layout.scheme);
    for (UnitMultipliers& um : m.units) {
        um.mu_hi.assign(nodes, 0.0);
        um.mu_lo.assign(nodes, 0.0);
        um.beta_hi.assign(nodes, 0.0);
        um.gamma_hi.times = grid;
        um.gamma_hi.values.assign(grid.size(), 0.0);
        um.gamma_lo.times = grid;
        um.gamma_lo.values.assign(grid.size(), 0.0);
    }

    for (std::size_t r = 0; r < map.eq_rows.size(); ++r) {
        const DualRow& row = map.eq_rows[r];
        if (row.kind == RowKind::Balance)
            m.lambda[row.index] = sol.nu[static_cast<Eigen::Index>(r)] / row.weight;
    }
    if (map.layout.slack_enabled) {
        m.slack_mu_lo.assign(nodes, 0.0);
        m.slack_mu_hi.assign(nodes, 0.0);
    }
    for (std::size_t r = 0; r < map.ineq_rows.size(); ++r) {
        const DualRow& row = map.ineq_rows[r];
        const double value = sol.omega[static_cast<Eigen::Index>(r)] / row.weight;
        switch (row.kind) {
            case RowKind::PMax:
                m.units[row.unit].mu_hi[row.index] = value;
                break;
            case RowKind::PMin:
                m.units[row.unit].mu_lo[row.index] = value;
                break;
            case RowKind::RMax:
                m.units[row.unit].gamma_hi.values[row.index] = value;
                break;
            case RowKind::RMin:
                m.units[row.unit].gamma_lo.values[row.index] = value;
                break;
            case RowKind::ZMax:
                m.units[row.unit].beta_hi[row.index] = value;
                break;
            case RowKind::SlackMin:
                m.slack_mu_lo[row.index] = value;
                break;
            case RowKind::SlackMax:
                m.slack_mu_hi[row.index] = value;
                break;
            default:
                break;
        }
    }
    return m;
}

std::vector<double> staggered_at_nodes(const StaggeredSeries& series, const Mesh& mesh) {
    std::vector<double> out(mesh.node_count(), 0.0);
    const auto& T = series.times;
    const auto& V = series.values;
    if (T.empty()) return out;
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const double t = mesh.node(i);
        if (t <= T.front()) {
            out[i] = V.front();
            continue;
        }
        if (t >= T.back()) {
            out[i] = V.back();
            continue;
        }
        const auto it = std::upper_bound(T.begin(), T.end(), t);
        const std::size_t hi = static_cast<std::size_t>(it - T.begin());
        const std::size_t lo = hi - 1;
        const double a = (t - T[lo]) / (T[hi] - T[lo]);
        out[i] = (1.0 - a) * V[lo] + a * V[hi];
    }
    return out;
}

double staggered_derivative_at(const StaggeredSeries& series, double t) {
    const auto& T = series.times;
    const auto& V = series.values;
    const std::size_t n = T.size();
    if (n < 2) return 0.0;
    const double eps = 1e-12 * (1.0 + std::abs(t));
    // Exact grid hit: centered difference over the two neighbors.
    const auto it = std::lower_bound(T.begin(), T.end(), t - eps);
    if (it != T.end() && std::abs(*it - t) <= eps) {
        const std::size_t i = static_cast<std::size_t>(it - T.begin());
        const std::size_t lo = (i == 0) ? 0 : i - 1;
        const std::size_t hi = (i + 1 >= n) ? n - 1 : i + 1;
        return (V[hi] - V[lo]) / (T[hi] - T[lo]);
    }
    // Between grid points (or outside): slope of the bracketing pair.
    std::size_t hi = static_cast<std::size_t>(std::upper_bound(T.begin(), T.end(), t) - T.begin());
    if (hi == 0) hi = 1;
    if (hi >= n) hi = n - 1;
    return (V[hi] - V[hi - 1]) / (T[hi] - T[hi - 1]);
}

double default_marginal_tol(const MultiplierTrajectories& m) {
    std::vector<double> samples;
    for (const UnitMultipliers& um : m.units) {
        samples.insert(samples.end(), um.mu_hi.begin(), um.mu_hi.end());
        samples.insert(samples.end(), um.mu_lo.begin(), um.mu_lo.end());
        samples.insert(samples.end(), um.beta_hi.begin(), um.beta_hi.end());
        samples.insert(samples.end(), um.gamma_hi.values.begin(), um.gamma_hi.values.end());
        samples.insert(samples.end(), um.gamma_lo.values.begin(), um.gamma_lo.values.end());
    }
    double top = 0.0;
    for (double v : samples) top = std::max(top, v);
    const double floor = 1e-7 * (1.0 + top);
    std::vector<double> active;
    for (double v : samples)
        if (v > floor) active.push_back(v);
    double median = 0.0;
    if (!active.empty()) {
        std::sort(active.begin(), active.end());
        const std::size_t mid = active.size() / 2;
        median = (active.size() % 2 == 1) ? active[mid] : 0.5 * (active[mid - 1] + active[mid]);
    }
    return 1e-6 * (median + 1.0);
}

namespace {

// Staggered ramp-grid points a finite difference at node i can reach: the
// neighboring intervals, or two intervals deep at the ends where the
// difference is one-sided.
std::pair<double, double> node_window(const Mesh& mesh, std::size_t i) {
    const std::size_t N = mesh.interval_count();
    double lo = (i > 0) ? mesh.node(i - 1) : mesh.node(0);
    double hi = (i < N) ? mesh.node(i + 1) : mesh.node(N);
    if (i == 0) hi = mesh.node(std::min<std::size_t>(2, N));
    if (i == N) lo = mesh.node(N >= 2 ? N - 2 : 0);
    const double pad = 1e-9 * (1.0 + mesh.horizon().span());
    return {lo - pad, hi + pad};
}

bool series_quiet_near(const StaggeredSeries& s, double lo, double hi, double tol) {
    for (std::size_t p = 0; p < s.times.size(); ++p)
        if (s.times[p] >= lo && s.times[p] <= hi && s.values[p] > tol) return false;
    return true;
}

std::vector<std::vector<int>> marginal_indices(const MultiplierTrajectories& m, double tol) {
    const Mesh& mesh = m.mesh;
    std::vector<std::vector<int>> out(mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const auto [lo, hi] = node_window(mesh, i);
        for (std::size_t k = 0; k < m.units.size(); ++k) {
            const UnitMultipliers& um = m.units[k];
            if (um.mu_hi[i] > tol || um.mu_lo[i] > tol || um.beta_hi[i] > tol) continue;
            if (!series_quiet_near(um.gamma_hi, lo, hi, tol)) continue;
            if (!series_quiet_near(um.gamma_lo, lo, hi, tol)) continue;
            out[i].push_back(static_cast<int>(k));
        }
    }
    return out;
}

std::vector<char> slack_is_marginal(const MultiplierTrajectories& m, double tol) {
    std::vector<char> out(m.mesh.node_count(), 0);
    if (m.slack_mu_lo.empty()) return out;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (m.slack_mu_lo[i] <= tol && m.slack_mu_hi[i] <= tol) ? 1 : 0;
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> marginal_units(const MultiplierTrajectories& m, double tol) {
    const auto idx = marginal_indices(m, tol);
    const auto slack = slack_is_marginal(m, tol);
    std::vector<std::vector<std::string>> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        for (int k : idx[i]) out[i].push_back(m.unit_ids[k]);
        if (slack[i]) out[i].push_back("slack");
    }
    return out;
}

namespace {

struct IdentityEval {
    // Per unit, per node.
    std::vector<std::vector<double>> lambda_hat;  // full identity, NaN at kinks
    std::vector<std::vector<double>> cx;          // dC/dx
    std::vector<std::vector<double>> ddt_pure;    // d/dt dC/dxdot, NaN at kinks
    std::vector<std::vector<double>> cz_forward;  // integral from t1 of dC/dz
    std::vector<std::vector<char>> kinked;
    std::vector<KinkFlag> kinks;
};

IdentityEval evaluate_identity(const Scenario& s, const Schedule& sched,
                               const MultiplierTrajectories& m) {
    const Mesh& mesh = m.mesh;
    const std::size_t nodes = mesh.node_count();
    const std::size_t K = s.units.size();
    IdentityEval ev;
    ev.lambda_hat.assign(K, std::vector<double>(nodes, 0.0));
    ev.cx.assign(K, std::vector<double>(nodes, 0.0));
    ev.ddt_pure.assign(K, std::vector<double>(nodes, 0.0));
    ev.cz_forward.assign(K, std::vector<double>(nodes, 0.0));
    ev.kinked.assign(K, std::vector<char>(nodes, 0));

    for (std::size_t k = 0; k < K; ++k) {
        const Unit& u = s.units[k];
        const CostFunction& cost = u.cost;
        const UnitMultipliers& um = m.units[k];
        const Trajectory& xk = sched.power[k];
        const std::vector<double>& xv = xk.values();

        // dC/dxdot on the ramp grid, with and without the ramp duals folded in.
        const std::size_t P = um.gamma_hi.times.size();
        StaggeredSeries with_gamma{um.gamma_hi.times, std::vector<double>(P, 0.0)};
        StaggeredSeries pure{um.gamma_hi.times, std::vector<double>(P, 0.0)};
        std::vector<char> point_kink(P, 0);
        const double ktol =
            1e-7 * (1.0 + std::max(std::abs(u.r_min), std::abs(u.r_max)));
        for (std::size_t p = 0; p < P; ++p) {
            const double xd = xk.eval_derivative(um.gamma_hi.times[p]);
            double cxd = cost.b1 + 2.0 * cost.b2 * xd;
            if (cost.b_abs > 0.0) {
                if (std::abs(xd) <= ktol)
                    point_kink[p] = 1;
                else
                    cxd += (xd > 0.0 ? cost.b_abs : -cost.b_abs);
            }
            pure.values[p] = cxd;
            with_gamma.values[p] = cxd + um.gamma_hi.values[p] - um.gamma_lo.values[p];
        }

        // Energy tail: integral to t2 of dC/dz + beta, and the forward
        // integral of dC/dz alone for the printed formula.
        std::vector<double> tail(nodes, 0.0);
        if (sched.energy[k].has_value()) {
            const std::vector<double>& zv = sched.energy[k]->values();
            std::vector<double> g(nodes), gpure(nodes);
            for (std::size_t i = 0; i < nodes; ++i) {
                gpure[i] = cost.e1 + 2.0 * cost.e2 * zv[i];
                g[i] = gpure[i] + um.beta_hi[i];
            }
            for (std::size_t i = nodes - 1; i-- > 0;) {
                const double h = mesh.interval_length(i);
                tail[i] = tail[i + 1] + 0.5 * h * (g[i] + g[i + 1]);
            }
            for (std::size_t i = 1; i < nodes; ++i) {
                const double h = mesh.interval_length(i - 1);
                ev.cz_forward[k][i] =
                    ev.cz_forward[k][i - 1] + 0.5 * h * (gpure[i - 1] + gpure[i]);
            }
        }

        for (std::size_t i = 0; i < nodes; ++i) {
            ev.cx[k][i] = cost.a1 + 2.0 * cost.a2 * xv[i];
            const auto [wlo, whi] = node_window(mesh, i);
            bool kinked = false;
            for (std::size_t p = 0; p < P && !kinked; ++p)
                if (point_kink[p] && pure.times[p] >= wlo && pure.times[p] <= whi) kinked = true;
            if (kinked) {
                ev.kinked[k][i] = 1;
                const auto sub = ramp_subgradient(cost);
                ev.kinks.push_back(KinkFlag{static_cast<int>(k), static_cast<int>(i), sub.first,
                                            sub.second});
                ev.ddt_pure[k][i] = kNaN;
                ev.lambda_hat[k][i] = kNaN;
                continue;
            }
            ev.ddt_pure[k][i] = staggered_derivative_at(pure, mesh.node(i));
            const double ddt_full = staggered_derivative_at(with_gamma, mesh.node(i));
            ev.lambda_hat[k][i] =
                ev.cx[k][i] + um.mu_hi[i] - um.mu_lo[i] - ddt_full + tail[i];
        }
    }
    return ev;
}

}  // namespace

PriceReport price_formula(const Scenario& s, const Schedule& sched,
                          const MultiplierTrajectories& m) {
    const Mesh& mesh = m.mesh;
    const std::size_t nodes = mesh.node_count();
    IdentityEval ev = evaluate_identity(s, sched, m);
    const double tol = default_marginal_tol(m);
    const auto idx = marginal_indices(m, tol);

    PriceReport rep;
    rep.unit_ids = m.unit_ids;
    rep.times = mesh.nodes();
    rep.lambda_dual = m.lambda;
    rep.marginal_tol = tol;
    rep.lambda_formula.assign(nodes, kNaN);
    rep.residual.assign(nodes, kNaN);
    rep.marginal_set.resize(nodes);
    rep.lambda_hat = ev.lambda_hat;
    rep.kinks = ev.kinks;

    const auto slack = slack_is_marginal(m, tol);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (int k : idx[i]) rep.marginal_set[i].push_back(m.unit_ids[k]);
        if (slack[i]) rep.marginal_set[i].push_back("slack");
        if (idx[i].empty()) {
            // An interior slack unit prices the system at its linear cost.
            if (slack[i]) {
                rep.lambda_formula[i] = s.slack.price;
                rep.residual[i] = std::abs(m.lambda[i] - s.slack.price);
            }
            continue;
        }
        const int k = idx[i].front();
        const CostFunction& cost = s.units[k].cost;
        if (ev.kinked[k][i]) continue;
        double value = ev.cx[k][i];
        if (cost.has_energy_terms()) {
            value -= ev.ddt_pure[k][i];
            value -= ev.cz_forward[k][i];
        } else if (cost.has_ramp_terms()) {
            value -= ev.ddt_pure[k][i];
        }
        rep.lambda_formula[i] = value;
        rep.residual[i] = std::abs(m.lambda[i] - value);
    }

    double worst = 0.0;
    for (std::size_t k = 0; k < ev.lambda_hat.size(); ++k)
        for (std::size_t i = 1; i + 1 < nodes; ++i) {
            const double r = std::abs(ev.lambda_hat[k][i] - m.lambda[i]);
            if (!std::isnan(r)) worst = std::max(worst, r);
        }
    rep.max_identity_residual = worst;
    return rep;
}

EulerLagrangeReport euler_lagrange_residual(const Scenario& s, const Schedule& sched,
                                            const MultiplierTrajectories& m) {
    const Mesh& mesh = m.mesh;
    const std::size_t nodes = mesh.node_count();
    IdentityEval ev = evaluate_identity(s, sched, m);

    EulerLagrangeReport rep;
    rep.times = mesh.nodes();
    rep.residual.assign(s.units.size(), std::vector<double>(nodes, kNaN));
    rep.terminal_dgamma.assign(s.units.size(), 0.0);

    double worst = 0.0;
    for (std::size_t k = 0; k < s.units.size(); ++k) {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double r = ev.lambda_hat[k][i] - m.lambda[i];
            rep.residual[k][i] = r;
            if (i > 0 && i + 1 < nodes && !std::isnan(r)) worst = std::max(worst, std::abs(r));
        }
        const UnitMultipliers& um = m.units[k];
        StaggeredSeries net{um.gamma_hi.times, std::vector<double>(um.gamma_hi.times.size(), 0.0)};
        for (std::size_t p = 0; p < net.times.size(); ++p)
            net.values[p] = um.gamma_hi.values[p] - um.gamma_lo.values[p];
        rep.terminal_dgamma[k] = staggered_derivative_at(net, mesh.horizon().t2);
    }
    rep.max_interior_residual = worst;
    return rep;
}

HourlyAggregate aggregate_hourly(const Schedule& sched) {
    const Horizon& horizon = sched.load.mesh().horizon();
    const double span = horizon.span();
    const double rounded = std::round(span);
    if (std::abs(span - rounded) > 1e-9 || rounded < 1.0)
        throw DomainError("hourly aggregation requires an integer-hour horizon");
    const int H = static_cast<int>(rounded);

    HourlyAggregate agg;
    auto integrate_rows = [&](const Trajectory& traj) {
        std::vector<double> row(H, 0.0);
        for (int h = 0; h < H; ++h) {
            const double a = horizon.t1 + h;
            const double b = (h + 1 == H) ? horizon.t2 : horizon.t1 + h + 1;
            row[h] = traj.integrate(a, b);
        }
        return row;
    };
    for (std::size_t k = 0; k < sched.power.size(); ++k) {
        agg.ids.push_back(sched.unit_ids[k]);
        agg.mwh.push_back(integrate_rows(sched.power[k]));
    }
    if (sched.slack_power.has_value()) {
        agg.ids.push_back("slack");
        agg.mwh.push_back(integrate_rows(*sched.slack_power));
    }
    return agg;
}

}  // namespace ctd
