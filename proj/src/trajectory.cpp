#include "ctd/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace ctd {

namespace {

// Legendre polynomial P_m and its derivative at x, by the three-term recurrence.
std::pair<double, double> legendre(int m, double x) {
    double p0 = 1.0, p1 = x;
    if (m == 0) return {p0, 0.0};
    for (int j = 1; j < m; ++j) {
        double p2 = ((2.0 * j + 1.0) * x * p1 - j * p0) / (j + 1.0);
        p0 = p1;
        p1 = p2;
    }
    double dp = m * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

}  // namespace

std::vector<double> lobatto_nodes(int n) {
    if (n < 2) throw DomainError("lobatto_nodes: need at least 2 nodes");
    const int m = n - 1;
    std::vector<double> x(n);
    x[0] = -1.0;
    x[n - 1] = 1.0;
    // Interior nodes are the roots of P'_m; Chebyshev-Lobatto points are close
    // enough for Newton to converge in a handful of steps.
    const double pi = 3.14159265358979323846;
    for (int k = 1; k < m; ++k) {
        double xi = -std::cos(pi * k / m);
        for (int it = 0; it < 100; ++it) {
            auto [p, dp] = legendre(m, xi);
            // (1 - x^2) P''_m = 2 x P'_m - m (m+1) P_m
            double d2p = (2.0 * xi * dp - m * (m + 1.0) * p) / (1.0 - xi * xi);
            double step = dp / d2p;
            xi -= step;
            if (std::abs(step) < 1e-15) break;
        }
        x[k] = xi;
    }
    // Enforce the symmetry of the node set exactly.
    for (int k = 0; k < n / 2; ++k) {
        double v = 0.5 * (x[k] - x[n - 1 - k]);
        x[k] = v;
        x[n - 1 - k] = -v;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    return x;
}

std::vector<double> lobatto_weights(int n) {
    const auto x = lobatto_nodes(n);
    const int m = n - 1;
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k) {
        double p = legendre(m, x[k]).first;
        w[k] = 2.0 / (m * (m + 1.0) * p * p);
    }
    return w;
}

Mesh::Mesh(Horizon horizon, std::vector<double> nodes, std::vector<double> weights)
    : horizon_(horizon), nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.size() < 2) throw DomainError("Mesh: need at least 2 nodes");
    if (weights_.size() != nodes_.size())
        throw DomainError("Mesh: weights and nodes must have equal length");
    if (nodes_.front() != horizon_.t1 || nodes_.back() != horizon_.t2)
        throw DomainError("Mesh: nodes must start at t1 and end at t2");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i + 1] > nodes_[i]))
            throw DomainError("Mesh: nodes must be strictly increasing");
    double sum = 0.0;
    for (double w : weights_) {
        if (w < 0.0) throw DomainError("Mesh: quadrature weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - horizon_.span()) > 1e-9 * (1.0 + horizon_.span()))
        throw DomainError("Mesh: quadrature weights must sum to the horizon length");
}

Mesh Mesh::uniform(Horizon horizon, int intervals) {
    if (intervals < 1) throw DomainError("Mesh::uniform: need at least 1 interval");
    const double h = horizon.span() / intervals;
    std::vector<double> nodes(intervals + 1), weights(intervals + 1, h);
    for (int i = 0; i <= intervals; ++i) nodes[i] = horizon.t1 + h * i;
    nodes.front() = horizon.t1;
    nodes.back() = horizon.t2;
    weights.front() = 0.5 * h;
    weights.back() = 0.5 * h;
    return Mesh(horizon, std::move(nodes), std::move(weights));
}

Mesh Mesh::gauss_lobatto(Horizon horizon, int node_count) {
    const auto x = lobatto_nodes(node_count);
    const auto w = lobatto_weights(node_count);
    const double mid = 0.5 * (horizon.t1 + horizon.t2);
    const double half = 0.5 * horizon.span();
    std::vector<double> nodes(x.size()), weights(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        nodes[i] = mid + half * x[i];
        weights[i] = half * w[i];
    }
    nodes.front() = horizon.t1;
    nodes.back() = horizon.t2;
    return Mesh(horizon, std::move(nodes), std::move(weights));
}

std::size_t Mesh::locate(double t) const {
    if (!horizon_.contains(t)) throw DomainError("Mesh::locate: time outside horizon");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
    if (j == 0) return 0;
    if (j >= nodes_.size()) return nodes_.size() - 2;
    return j - 1;
}

Trajectory Trajectory::from_samples(Mesh mesh, const std::vector<double>& values, Scheme scheme) {
    switch (scheme) {
        case Scheme::PiecewiseConstant:
            return piecewise_constant(std::move(mesh), values);
        case Scheme::PiecewiseLinear: {
            if (values.size() != mesh.node_count())
                throw DomainError("Trajectory: need one value per node");
            Trajectory tr(scheme, std::move(mesh));
            tr.values_ = values;
            return tr;
        }
        case Scheme::CubicHermite: {
            if (values.size() != mesh.node_count())
                throw DomainError("Trajectory: need one value per node");
            const std::size_t n = mesh.node_count();
            std::vector<double> slopes(n);
            if (n == 2) {
                slopes[0] = slopes[1] =
                    (values[1] - values[0]) / mesh.interval_length(0);
            } else {
                slopes[0] = (values[1] - values[0]) / mesh.interval_length(0);
                slopes[n - 1] =
                    (values[n - 1] - values[n - 2]) / mesh.interval_length(n - 2);
                for (std::size_t i = 1; i + 1 < n; ++i)
                    slopes[i] = (values[i + 1] - values[i - 1]) /
                                (mesh.node(i + 1) - mesh.node(i - 1));
            }
            return from_samples_and_slopes(std::move(mesh), values, slopes);
        }
        case Scheme::PiecewiseQuadratic:
            throw DomainError("Trajectory: piecewise-quadratic cannot be built from samples");
    }
    throw DomainError("Trajectory: unknown scheme");
}

Trajectory Trajectory::from_samples_and_slopes(Mesh mesh, const std::vector<double>& values,
                                               const std::vector<double>& slopes) {
    if (values.size() != mesh.node_count() || slopes.size() != mesh.node_count())
        throw DomainError("Trajectory: need one value and one slope per node");
    Trajectory tr(Scheme::CubicHermite, std::move(mesh));
    tr.values_ = values;
    tr.slopes_ = slopes;
    return tr;
}

Trajectory Trajectory::constant(Mesh mesh, double value, Scheme scheme) {
    switch (scheme) {
        case Scheme::PiecewiseConstant: {
            std::vector<double> v(mesh.interval_count(), value);
            return piecewise_constant(std::move(mesh), v);
        }
        case Scheme::PiecewiseLinear: {
            std::vector<double> v(mesh.node_count(), value);
            return from_samples(std::move(mesh), v, scheme);
        }
        case Scheme::CubicHermite: {
            std::vector<double> v(mesh.node_count(), value), d(mesh.node_count(), 0.0);
            return from_samples_and_slopes(std::move(mesh), v, d);
        }
        case Scheme::PiecewiseQuadratic: {
            Trajectory tr(scheme, std::move(mesh));
            tr.quadratic_.assign(tr.mesh_.interval_count(), {value, 0.0, 0.0});
            return tr;
        }
    }
    throw DomainError("Trajectory: unknown scheme");
}

Trajectory Trajectory::piecewise_constant(Mesh mesh, const std::vector<double>& interval_values) {
    if (interval_values.size() != mesh.interval_count())
        throw DomainError("Trajectory: need one value per interval");
    Trajectory tr(Scheme::PiecewiseConstant, std::move(mesh));
    tr.values_ = interval_values;
    return tr;
}

const std::vector<double>& Trajectory::slopes() const {
    if (scheme_ != Scheme::CubicHermite)
        throw DomainError("Trajectory: slopes are stored for cubic Hermite only");
    return slopes_;
}

std::array<double, 4> Trajectory::segment_cubic(std::size_t j) const {
    const double h = mesh_.interval_length(j);
    switch (scheme_) {
        case Scheme::PiecewiseConstant:
            return {values_[j], 0.0, 0.0, 0.0};
        case Scheme::PiecewiseLinear:
            return {values_[j], values_[j + 1] - values_[j], 0.0, 0.0};
        case Scheme::PiecewiseQuadratic:
            return {quadratic_[j][0], quadratic_[j][1], quadratic_[j][2], 0.0};
        case Scheme::CubicHermite: {
            const double x0 = values_[j], x1 = values_[j + 1];
            const double d0 = h * slopes_[j], d1 = h * slopes_[j + 1];
            return {x0, d0, -3.0 * x0 + 3.0 * x1 - 2.0 * d0 - d1,
                    2.0 * x0 - 2.0 * x1 + d0 + d1};
        }
    }
    throw DomainError("Trajectory: unknown scheme");
}

double Trajectory::eval(double t) const {
    const std::size_t j = mesh_.locate(t);
    const double h = mesh_.interval_length(j);
    const double s = (t - mesh_.node(j)) / h;
    const auto c = segment_cubic(j);
    return ((c[3] * s + c[2]) * s + c[1]) * s + c[0];
}

double Trajectory::eval_derivative(double t) const {
    const std::size_t j = mesh_.locate(t);
    const double h = mesh_.interval_length(j);
    const double s = (t - mesh_.node(j)) / h;
    const auto c = segment_cubic(j);
    return ((3.0 * c[3] * s + 2.0 * c[2]) * s + c[1]) / h;
}

Trajectory Trajectory::derivative() const {
    switch (scheme_) {
        case Scheme::PiecewiseConstant:
            return piecewise_constant(mesh_,
                                      std::vector<double>(mesh_.interval_count(), 0.0));
        case Scheme::PiecewiseLinear: {
            std::vector<double> slopes(mesh_.interval_count());
            for (std::size_t j = 0; j < slopes.size(); ++j)
                slopes[j] = (values_[j + 1] - values_[j]) / mesh_.interval_length(j);
            return piecewise_constant(mesh_, slopes);
        }
        case Scheme::CubicHermite: {
            Trajectory tr(Scheme::PiecewiseQuadratic, mesh_);
            tr.quadratic_.resize(mesh_.interval_count());
            for (std::size_t j = 0; j < tr.quadratic_.size(); ++j) {
                const double h = mesh_.interval_length(j);
                const auto c = segment_cubic(j);
                tr.quadratic_[j] = {c[1] / h, 2.0 * c[2] / h, 3.0 * c[3] / h};
            }
            return tr;
        }
        case Scheme::PiecewiseQuadratic:
            throw DomainError(
                "Trajectory: derivative of a piecewise-quadratic trajectory is not stored; "
                "differentiate the originating cubic instead");
    }
    throw DomainError("Trajectory: unknown scheme");
}

double Trajectory::integrate(double a, double b) const {
    if (!mesh_.horizon().contains(a) || !mesh_.horizon().contains(b))
        throw DomainError("Trajectory::integrate: limits outside horizon");
    if (a > b) return -integrate(b, a);
    if (a == b) return 0.0;
    const std::size_t ja = mesh_.locate(a);
    const std::size_t jb = mesh_.locate(b);
    double total = 0.0;
    for (std::size_t j = ja; j <= jb; ++j) {
        const double h = mesh_.interval_length(j);
        const double sa = (j == ja) ? (a - mesh_.node(j)) / h : 0.0;
        const double sb = (j == jb) ? (b - mesh_.node(j)) / h : 1.0;
        const auto c = segment_cubic(j);
        auto antider = [&](double s) {
            return (((c[3] / 4.0 * s + c[2] / 3.0) * s + c[1] / 2.0) * s + c[0]) * s;
        };
        total += h * (antider(sb) - antider(sa));
    }
    return total;
}

}  // namespace ctd
