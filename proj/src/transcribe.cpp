#include "ctd/transcribe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "ctd/errors.hpp"

namespace ctd {

namespace {

// Hermite segment matrices over [0, h] in the local basis (x0, d0, x1, d1).
// M = integral of phi_a phi_b, S = integral of phi_a' phi_b',
// L = integral of phi_a.
std::array<std::array<double, 4>, 4> hermite_mass(double h) {
    const double f = h / 420.0;
    const double h2 = h * h;
    return {{{156.0 * f, 22.0 * h * f, 54.0 * f, -13.0 * h * f},
             {22.0 * h * f, 4.0 * h2 * f, 13.0 * h * f, -3.0 * h2 * f},
             {54.0 * f, 13.0 * h * f, 156.0 * f, -22.0 * h * f},
             {-13.0 * h * f, -3.0 * h2 * f, -22.0 * h * f, 4.0 * h2 * f}}};
}

std::array<std::array<double, 4>, 4> hermite_stiffness(double h) {
    const double f = 1.0 / (30.0 * h);
    const double h2 = h * h;
    return {{{36.0 * f, 3.0 * h * f, -36.0 * f, 3.0 * h * f},
             {3.0 * h * f, 4.0 * h2 * f, -3.0 * h * f, -h2 * f},
             {-36.0 * f, -3.0 * h * f, 36.0 * f, -3.0 * h * f},
             {3.0 * h * f, -h2 * f, -3.0 * h * f, 4.0 * h2 * f}}};
}

std::array<double, 4> hermite_linear(double h) {
    return {h / 2.0, h * h / 12.0, h / 2.0, -h * h / 12.0};
}

VarLayout build_layout(const Scenario& s, Scheme scheme, int intervals) {
    VarLayout lay;
    lay.scheme = scheme;
    lay.intervals = intervals;
    lay.num_units = static_cast<int>(s.units.size());
    lay.slack_enabled = s.slack.enabled;
    const bool ch = scheme == Scheme::CubicHermite;
    lay.split_points = ch ? intervals + 1 : intervals;

    int next = 0;
    auto grab = [&next](int count) {
        int base = next;
        next += count;
        return base;
    };
    const int nodes = intervals + 1;

    lay.x_base.resize(s.units.size());
    lay.d_base.assign(s.units.size(), -1);
    lay.z_base.assign(s.units.size(), -1);
    lay.rp_base.assign(s.units.size(), -1);
    lay.rm_base.assign(s.units.size(), -1);
    for (std::size_t k = 0; k < s.units.size(); ++k) {
        const Unit& u = s.units[k];
        lay.x_base[k] = grab(nodes);
        if (ch) lay.d_base[k] = grab(nodes);
        if (u.cost.has_energy_terms() || u.z_max.has_value()) lay.z_base[k] = grab(nodes);
        if (u.cost.b_abs > 0.0) {
            lay.rp_base[k] = grab(lay.split_points);
            lay.rm_base[k] = grab(lay.split_points);
        }
    }
    lay.slack_base = -1;
    lay.slack_d_base = -1;
    if (s.slack.enabled) {
        lay.slack_base = grab(nodes);
        if (ch) lay.slack_d_base = grab(nodes);
    }
    lay.total_vars = next;
    return lay;
}

}  // namespace

Transcription transcribe(const Scenario& s, Scheme scheme, int intervals) {
    if (scheme != Scheme::PiecewiseLinear && scheme != Scheme::CubicHermite)
        throw TranscriptionError("transcription supports the piecewise-linear and cubic Hermite schemes");
    if (intervals < 2) throw TranscriptionError("at least 2 intervals are required");

    Mesh mesh = Mesh::uniform(s.horizon, intervals);
    auto [y, yd] = sample_load(s, mesh);
    const int N = intervals;
    const int nodes = N + 1;
    const bool ch = scheme == Scheme::CubicHermite;
    const int K = static_cast<int>(s.units.size());

    // Syntactic feasibility screens: aggregate capacity against the load range.
    const double ymax = *std::max_element(y.begin(), y.end());
    const double ymin = *std::min_element(y.begin(), y.end());
    const double smax = s.slack.enabled ? std::max(0.0, ymax) : 0.0;
    double pmax_sum = 0.0, pmin_sum = 0.0;
    for (const Unit& u : s.units) {
        pmax_sum += u.p_max;
        pmin_sum += u.p_min;
    }
    if (ymax > pmax_sum + smax + 1e-9)
        throw TranscriptionError("aggregate capacity cannot cover the peak load");
    if (pmin_sum > ymin + 1e-9)
        throw TranscriptionError("aggregate minimum generation exceeds the load trough");

    VarLayout lay = build_layout(s, scheme, intervals);
    const int n = lay.total_vars;

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    double offset = 0.0;

    const double span = s.horizon.span();

    for (int k = 0; k < K; ++k) {
        const Unit& u = s.units[k];
        const CostFunction& cost = u.cost;
        const int xb = lay.x_base[k];
        const int db = lay.d_base[k];
        const int zb = lay.z_base[k];
        const int rpb = lay.rp_base[k];
        const int rmb = lay.rm_base[k];

        offset += cost.a0 * span;

        if (!ch) {
            // Node-lumped quadrature for the value terms.
            for (int i = 0; i < nodes; ++i) {
                const double w = mesh.weight(i);
                c[xb + i] += w * cost.a1;
                H(xb + i, xb + i) += 2.0 * w * cost.a2;
            }
            // Ramp terms live on interval slopes.
            if (rpb >= 0) {
                for (int j = 0; j < N; ++j) {
                    const double h = mesh.interval_length(j);
                    c[rpb + j] += h * (cost.b1 + cost.b_abs);
                    c[rmb + j] += h * (cost.b_abs - cost.b1);
                    if (cost.b2 > 0.0) {
                        H(rpb + j, rpb + j) += 2.0 * cost.b2 * h;
                        H(rmb + j, rmb + j) += 2.0 * cost.b2 * h;
                        H(rpb + j, rmb + j) -= 2.0 * cost.b2 * h;
                        H(rmb + j, rpb + j) -= 2.0 * cost.b2 * h;
                    }
                }
            } else {
                // b1 integral telescopes; b2 couples adjacent nodes.
                c[xb] -= cost.b1;
                c[xb + N] += cost.b1;
                if (cost.b2 > 0.0) {
                    for (int j = 0; j < N; ++j) {
                        const double g = 2.0 * cost.b2 / mesh.interval_length(j);
                        H(xb + j, xb + j) += g;
                        H(xb + j + 1, xb + j + 1) += g;
                        H(xb + j, xb + j + 1) -= g;
                        H(xb + j + 1, xb + j) -= g;
                    }
                }
            }
        } else {
            // Exact Gram-matrix assembly on the (value, derivative) coefficients;
            // anything less and the balance duals stop being Galerkin projections.
            for (int j = 0; j < N; ++j) {
                const double h = mesh.interval_length(j);
                const std::array<int, 4> idx = {xb + j, db + j, xb + j + 1, db + j + 1};
                if (cost.a1 != 0.0) {
                    const auto L = hermite_linear(h);
                    for (int a = 0; a < 4; ++a) c[idx[a]] += cost.a1 * L[a];
                }
                if (cost.a2 > 0.0) {
                    const auto M = hermite_mass(h);
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b) H(idx[a], idx[b]) += 2.0 * cost.a2 * M[a][b];
                }
                if (cost.b2 > 0.0) {
                    const auto S = hermite_stiffness(h);
                    for (int a = 0; a < 4; ++a)
                        for (int b = 0; b < 4; ++b) H(idx[a], idx[b]) += 2.0 * cost.b2 * S[a][b];
                }
            }
            c[xb] -= cost.b1;
            c[xb + N] += cost.b1;
            // |dx/dt| is lumped at the nodes through the derivative splits.
            if (rpb >= 0) {
                for (int i = 0; i < nodes; ++i) {
                    const double w = mesh.weight(i);
                    c[rpb + i] += w * cost.b_abs;
                    c[rmb + i] += w * cost.b_abs;
                }
            }
        }

        if (zb >= 0) {
            for (int i = 0; i < nodes; ++i) {
                const double w = mesh.weight(i);
                c[zb + i] += w * cost.e1;
                if (cost.e2 > 0.0) H(zb + i, zb + i) += 2.0 * w * cost.e2;
            }
        }
    }
    if (lay.slack_base >= 0) {
        for (int i = 0; i < nodes; ++i) c[lay.slack_base + i] += mesh.weight(i) * s.slack.price;
    }

    // Equality rows.
    std::vector<Eigen::Triplet<double>> At;
    std::vector<double> bv;
    std::vector<DualRow> eq_rows;
    auto eq_row = [&](RowKind kind, int unit, int index, double time, double weight) {
        eq_rows.push_back(DualRow{kind, unit, index, time, weight, 1.0});
        bv.push_back(0.0);
        return static_cast<int>(bv.size()) - 1;
    };

    // Balance at every node, written so the recovered dual is w_i * lambda(t_i):
    //   y_i - sum_k x_{k,i} - s_i = 0, i.e. rows of -1 with rhs -y_i.
    for (int i = 0; i < nodes; ++i) {
        const int r = eq_row(RowKind::Balance, -1, i, mesh.node(i), mesh.weight(i));
        for (int k = 0; k < K; ++k) At.emplace_back(r, lay.x_base[k] + i, -1.0);
        if (lay.slack_base >= 0) At.emplace_back(r, lay.slack_base + i, -1.0);
        bv[r] = -y[i];
    }
    if (ch) {
        for (int i = 0; i < nodes; ++i) {
            const int r = eq_row(RowKind::BalanceDeriv, -1, i, mesh.node(i), mesh.weight(i));
            for (int k = 0; k < K; ++k) At.emplace_back(r, lay.d_base[k] + i, -1.0);
            if (lay.slack_d_base >= 0) At.emplace_back(r, lay.slack_d_base + i, -1.0);
            bv[r] = -yd[i];
        }
    }

    for (int k = 0; k < K; ++k) {
        const int xb = lay.x_base[k];
        const int db = lay.d_base[k];
        const int zb = lay.z_base[k];
        if (zb >= 0) {
            const int r0 = eq_row(RowKind::EnergyInit, k, 0, mesh.node(0), 1.0);
            At.emplace_back(r0, zb, 1.0);
            for (int j = 0; j < N; ++j) {
                const double h = mesh.interval_length(j);
                const int r = eq_row(RowKind::EnergyLink, k, j, mesh.midpoint(j), 1.0);
                At.emplace_back(r, zb + j + 1, 1.0);
                At.emplace_back(r, zb + j, -1.0);
                At.emplace_back(r, xb + j, -h / 2.0);
                At.emplace_back(r, xb + j + 1, -h / 2.0);
                if (ch) {
                    At.emplace_back(r, db + j, -h * h / 12.0);
                    At.emplace_back(r, db + j + 1, h * h / 12.0);
                }
            }
        }
        const int rpb = lay.rp_base[k];
        const int rmb = lay.rm_base[k];
        if (rpb >= 0) {
            if (!ch) {
                for (int j = 0; j < N; ++j) {
                    const double h = mesh.interval_length(j);
                    const int r = eq_row(RowKind::RampSplit, k, j, mesh.midpoint(j), h);
                    At.emplace_back(r, xb + j + 1, 1.0 / h);
                    At.emplace_back(r, xb + j, -1.0 / h);
                    At.emplace_back(r, rpb + j, -1.0);
                    At.emplace_back(r, rmb + j, 1.0);
                }
            } else {
                for (int i = 0; i < nodes; ++i) {
                    const int r = eq_row(RowKind::RampSplit, k, i, mesh.node(i), mesh.weight(i));
                    At.emplace_back(r, db + i, 1.0);
                    At.emplace_back(r, rpb + i, -1.0);
                    At.emplace_back(r, rmb + i, 1.0);
                }
            }
        }
    }

    // Inequality rows.
    std::vector<Eigen::Triplet<double>> Gt;
    std::vector<double> hv;
    std::vector<DualRow> in_rows;
    auto in_row = [&](RowKind kind, int unit, int index, double time, double weight, double sign,
                      double rhs) {
        in_rows.push_back(DualRow{kind, unit, index, time, weight, sign});
        hv.push_back(rhs);
        return static_cast<int>(hv.size()) - 1;
    };

    for (int k = 0; k < K; ++k) {
        const Unit& u = s.units[k];
        const int xb = lay.x_base[k];
        const int db = lay.d_base[k];
        for (int i = 0; i < nodes; ++i) {
            const double w = mesh.weight(i);
            const double t = mesh.node(i);
            int r = in_row(RowKind::PMax, k, i, t, w, 1.0, u.p_max);
            Gt.emplace_back(r, xb + i, 1.0);
            r = in_row(RowKind::PMin, k, i, t, w, -1.0, -u.p_min);
            Gt.emplace_back(r, xb + i, -1.0);
        }
        if (!ch) {
            for (int j = 0; j < N; ++j) {
                const double h = mesh.interval_length(j);
                const double t = mesh.midpoint(j);
                int r = in_row(RowKind::RMax, k, j, t, h, 1.0, u.r_max);
                Gt.emplace_back(r, xb + j + 1, 1.0 / h);
                Gt.emplace_back(r, xb + j, -1.0 / h);
                r = in_row(RowKind::RMin, k, j, t, h, -1.0, -u.r_min);
                Gt.emplace_back(r, xb + j + 1, -1.0 / h);
                Gt.emplace_back(r, xb + j, 1.0 / h);
            }
        } else {
            // Collocate the ramp on nodes and midpoints; the staggered weights
            // partition each interval as h/6 + 2h/3 + h/6 (Simpson measure).
            for (int i = 0; i < nodes; ++i) {
                double w = 0.0;
                if (i > 0) w += mesh.interval_length(i - 1) / 6.0;
                if (i < N) w += mesh.interval_length(i) / 6.0;
                const double t = mesh.node(i);
                int r = in_row(RowKind::RMax, k, 2 * i, t, w, 1.0, u.r_max);
                Gt.emplace_back(r, db + i, 1.0);
                r = in_row(RowKind::RMin, k, 2 * i, t, w, -1.0, -u.r_min);
                Gt.emplace_back(r, db + i, -1.0);
            }
            for (int j = 0; j < N; ++j) {
                const double h = mesh.interval_length(j);
                const double t = mesh.midpoint(j);
                const double w = 2.0 * h / 3.0;
                int r = in_row(RowKind::RMax, k, 2 * j + 1, t, w, 1.0, u.r_max);
                Gt.emplace_back(r, xb + j, -1.5 / h);
                Gt.emplace_back(r, xb + j + 1, 1.5 / h);
                Gt.emplace_back(r, db + j, -0.25);
                Gt.emplace_back(r, db + j + 1, -0.25);
                r = in_row(RowKind::RMin, k, 2 * j + 1, t, w, -1.0, -u.r_min);
                Gt.emplace_back(r, xb + j, 1.5 / h);
                Gt.emplace_back(r, xb + j + 1, -1.5 / h);
                Gt.emplace_back(r, db + j, 0.25);
                Gt.emplace_back(r, db + j + 1, 0.25);
            }
        }
        if (lay.z_base[k] >= 0 && u.z_max.has_value()) {
            for (int i = 0; i < nodes; ++i) {
                const int r = in_row(RowKind::ZMax, k, i, mesh.node(i), mesh.weight(i), 1.0, *u.z_max);
                Gt.emplace_back(r, lay.z_base[k] + i, 1.0);
            }
        }
        if (lay.rp_base[k] >= 0) {
            for (int p = 0; p < lay.split_points; ++p) {
                const double t = ch ? mesh.node(p) : mesh.midpoint(p);
                int r = in_row(RowKind::SplitPos, k, 2 * p, t, 1.0, -1.0, 0.0);
                Gt.emplace_back(r, lay.rp_base[k] + p, -1.0);
                r = in_row(RowKind::SplitPos, k, 2 * p + 1, t, 1.0, -1.0, 0.0);
                Gt.emplace_back(r, lay.rm_base[k] + p, -1.0);
            }
        }
    }
    if (lay.slack_base >= 0) {
        for (int i = 0; i < nodes; ++i) {
            const double w = mesh.weight(i);
            const double t = mesh.node(i);
            int r = in_row(RowKind::SlackMin, -1, i, t, w, -1.0, 0.0);
            Gt.emplace_back(r, lay.slack_base + i, -1.0);
            r = in_row(RowKind::SlackMax, -1, i, t, w, 1.0, smax);
            Gt.emplace_back(r, lay.slack_base + i, 1.0);
        }
    }

    Transcription out{QpProblem{}, DualMap{std::move(mesh), lay, {}, std::move(eq_rows), std::move(in_rows)}};
    for (const Unit& u : s.units) out.map.unit_ids.push_back(u.id);

    QpProblem& qp = out.qp;
    qp.H = std::move(H);
    qp.c = std::move(c);
    qp.offset = offset;
    qp.A.resize(static_cast<Eigen::Index>(bv.size()), n);
    qp.A.setFromTriplets(At.begin(), At.end());
    qp.b = Eigen::Map<const Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
    qp.G.resize(static_cast<Eigen::Index>(hv.size()), n);
    qp.G.setFromTriplets(Gt.begin(), Gt.end());
    qp.h = Eigen::Map<const Eigen::VectorXd>(hv.data(), static_cast<Eigen::Index>(hv.size()));

    if (out.map.eq_rows.size() != static_cast<std::size_t>(qp.A.rows()) ||
        out.map.ineq_rows.size() != static_cast<std::size_t>(qp.G.rows()))
        throw ConsistencyError("dual map rows out of step with the constraint matrices");
    qp.validate();
    return out;
}

namespace {

// Integral over [0, h] of the square of c0 + c1 s + c2 s^2 + c3 s^3 where
// s = (t - t_j) / h, times the Jacobian h.
double cubic_square_integral(const std::array<double, 4>& q, double h) {
    std::array<double, 7> p{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) p[a + b] += q[a] * q[b];
    double total = 0.0;
    for (int m = 0; m < 7; ++m) total += p[m] / (m + 1.0);
    return h * total;
}

std::array<double, 4> segment_coeffs(double x0, double d0, double x1, double d1, double h) {
    return {x0, h * d0, -3.0 * x0 + 3.0 * x1 - 2.0 * h * d0 - h * d1,
            2.0 * x0 - 2.0 * x1 + h * d0 + h * d1};
}

}  // namespace

Schedule recover_schedule(const Eigen::VectorXd& primal, const DualMap& map, const Scenario& s) {
    const VarLayout& lay = map.layout;
    if (primal.size() != lay.total_vars)
        throw DomainError("primal vector does not match the transcription layout");
    const Mesh& mesh = map.mesh;
    const int N = lay.intervals;
    const int nodes = N + 1;
    const int K = lay.num_units;
    const bool ch = lay.scheme == Scheme::CubicHermite;
    auto [y, yd] = sample_load(s, mesh);

    auto node_values = [&](int base) {
        std::vector<double> v(nodes);
        for (int i = 0; i < nodes; ++i) v[i] = primal[base + i];
        return v;
    };

    std::vector<std::vector<double>> xs(K), ds(K);
    for (int k = 0; k < K; ++k) {
        xs[k] = node_values(lay.x_base[k]);
        if (ch) ds[k] = node_values(lay.d_base[k]);
    }
    std::vector<double> sv, sdv;
    if (lay.slack_base >= 0) {
        sv = node_values(lay.slack_base);
        if (ch) sdv = node_values(lay.slack_d_base);
    }

    // Recompute the objective from the recovered coefficients through closed
    // forms that never touch H or c, then insist the two agree.
    double recomputed = 0.0;
    const double span = s.horizon.span();
    for (int k = 0; k < K; ++k) {
        const CostFunction& cost = s.units[k].cost;
        recomputed += cost.a0 * span;
        if (!ch) {
            for (int i = 0; i < nodes; ++i) {
                const double x = xs[k][i];
                recomputed += mesh.weight(i) * (cost.a1 * x + cost.a2 * x * x);
            }
        } else {
            for (int j = 0; j < N; ++j) {
                const double h = mesh.interval_length(j);
                const auto q = segment_coeffs(xs[k][j], ds[k][j], xs[k][j + 1], ds[k][j + 1], h);
                if (cost.a1 != 0.0) {
                    double lin = 0.0;
                    for (int m = 0; m < 4; ++m) lin += q[m] / (m + 1.0);
                    recomputed += cost.a1 * h * lin;
                }
                if (cost.a2 > 0.0) recomputed += cost.a2 * cubic_square_integral(q, h);
            }
        }
        if (!ch && lay.rp_base[k] >= 0) {
            // Every ramp term sits on the interval splits.
            for (int j = 0; j < N; ++j) {
                const double rp = primal[lay.rp_base[k] + j];
                const double rm = primal[lay.rm_base[k] + j];
                const double r = rp - rm;
                recomputed += mesh.interval_length(j) *
                              (cost.b1 * r + cost.b2 * r * r + cost.b_abs * (rp + rm));
            }
        } else {
            recomputed += cost.b1 * (xs[k][N] - xs[k][0]);
            if (cost.b2 > 0.0) {
                for (int j = 0; j < N; ++j) {
                    const double h = mesh.interval_length(j);
                    if (!ch) {
                        const double slope = (xs[k][j + 1] - xs[k][j]) / h;
                        recomputed += cost.b2 * h * slope * slope;
                    } else {
                        const auto q =
                            segment_coeffs(xs[k][j], ds[k][j], xs[k][j + 1], ds[k][j + 1], h);
                        const std::array<double, 4> qd = {q[1] / h, 2.0 * q[2] / h, 3.0 * q[3] / h,
                                                          0.0};
                        recomputed += cost.b2 * cubic_square_integral(qd, h);
                    }
                }
            }
            if (ch && lay.rp_base[k] >= 0) {
                for (int p = 0; p < lay.split_points; ++p) {
                    const double rp = primal[lay.rp_base[k] + p];
                    const double rm = primal[lay.rm_base[k] + p];
                    recomputed += mesh.weight(p) * cost.b_abs * (rp + rm);
                }
            }
        }
        if (lay.z_base[k] >= 0) {
            for (int i = 0; i < nodes; ++i) {
                const double z = primal[lay.z_base[k] + i];
                recomputed += mesh.weight(i) * (cost.e1 * z + cost.e2 * z * z);
            }
        }
    }
    if (lay.slack_base >= 0) {
        for (int i = 0; i < nodes; ++i) recomputed += mesh.weight(i) * s.slack.price * sv[i];
    }

    // Balance repair: absorb the infinitesimal equality residual into the
    // slack when present, otherwise into the unit with the most headroom.
    std::vector<double> rho(nodes, 0.0), rhod;
    for (int i = 0; i < nodes; ++i) {
        double total = 0.0;
        for (int k = 0; k < K; ++k) total += xs[k][i];
        if (!sv.empty()) total += sv[i];
        rho[i] = y[i] - total;
    }
    if (ch) {
        rhod.assign(nodes, 0.0);
        for (int i = 0; i < nodes; ++i) {
            double total = 0.0;
            for (int k = 0; k < K; ++k) total += ds[k][i];
            if (!sdv.empty()) total += sdv[i];
            rhod[i] = yd[i] - total;
        }
    }
    double repair = 0.0;
    for (int i = 0; i < nodes; ++i) {
        repair = std::max(repair, std::abs(rho[i]));
        if (ch) repair = std::max(repair, std::abs(rhod[i]));
        if (!sv.empty()) {
            sv[i] += rho[i];
            if (ch) sdv[i] += rhod[i];
        } else {
            int best = 0;
            double headroom = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < K; ++k) {
                const double room = s.units[k].p_max - xs[k][i];
                if (room > headroom) {
                    headroom = room;
                    best = k;
                }
            }
            xs[best][i] += rho[i];
            if (ch) ds[best][i] += rhod[i];
        }
    }
    Trajectory load_traj = ch ? Trajectory::from_samples_and_slopes(mesh, y, yd)
                              : Trajectory::from_samples(mesh, y, Scheme::PiecewiseLinear);
    Schedule sched{map.unit_ids, {}, {}, std::nullopt, std::move(load_traj)};
    sched.objective = recomputed;
    sched.balance_repair = repair;

    for (int k = 0; k < K; ++k) {
        Trajectory traj = ch ? Trajectory::from_samples_and_slopes(mesh, xs[k], ds[k])
                             : Trajectory::from_samples(mesh, xs[k], Scheme::PiecewiseLinear);
        sched.power.push_back(std::move(traj));
    }
    for (int k = 0; k < K; ++k) {
        if (lay.z_base[k] < 0) {
            sched.energy.emplace_back(std::nullopt);
            continue;
        }
        // z is represented with the power samples as slopes, which reproduces
        // the energy-link integrals exactly.
        sched.energy.emplace_back(
            Trajectory::from_samples_and_slopes(mesh, node_values(lay.z_base[k]), xs[k]));
    }
    if (!sv.empty()) {
        sched.slack_power = ch ? Trajectory::from_samples_and_slopes(mesh, sv, sdv)
                               : Trajectory::from_samples(mesh, sv, Scheme::PiecewiseLinear);
    }
    return sched;
}

}  // namespace ctd
