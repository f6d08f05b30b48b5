#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ctd/errors.hpp"

namespace ctd {

/// Operating horizon [t1, t2], in hours.
struct Horizon {
    double t1 = 0.0;
    double t2 = 0.0;

    Horizon() = default;
    Horizon(double begin, double end) : t1(begin), t2(end) {
        if (!(t2 > t1)) throw DomainError("Horizon: t2 must be greater than t1");
    }
    double span() const { return t2 - t1; }
    bool contains(double t) const { return t >= t1 && t <= t2; }
};

/// n-point Gauss-Lobatto nodes on [-1, 1], endpoints included. n >= 2.
std::vector<double> lobatto_nodes(int n);
/// Matching Gauss-Lobatto weights; exact for polynomials up to degree 2n-3.
std::vector<double> lobatto_weights(int n);

/// Time discretization of a horizon: strictly increasing nodes with
/// nodes.front() = t1, nodes.back() = t2, plus per-node quadrature weights
/// that sum to the horizon length.
class Mesh {
public:
    Mesh(Horizon horizon, std::vector<double> nodes, std::vector<double> weights);

    /// Uniform nodes with trapezoid weights.
    static Mesh uniform(Horizon horizon, int intervals);
    /// Global Gauss-Lobatto nodes and weights (node_count points).
    static Mesh gauss_lobatto(Horizon horizon, int node_count);

    const Horizon& horizon() const { return horizon_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t interval_count() const { return nodes_.size() - 1; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    double interval_length(std::size_t j) const { return nodes_[j + 1] - nodes_[j]; }
    double midpoint(std::size_t j) const { return 0.5 * (nodes_[j] + nodes_[j + 1]); }

    /// Index of the interval containing t (the last interval owns t2).
    std::size_t locate(double t) const;

private:
    Horizon horizon_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

enum class Scheme {
    PiecewiseConstant,   // per-interval values; arises as the derivative of PiecewiseLinear
    PiecewiseLinear,
    PiecewiseQuadratic,  // per-interval quadratic coefficients; derivative of CubicHermite
    CubicHermite,        // C1, per-node (value, derivative) pairs
};

/// A piecewise-polynomial function of time. Immutable after construction;
/// evaluation, differentiation and integration are exact for the stored
/// polynomial.
class Trajectory {
public:
    static Trajectory from_samples(Mesh mesh, const std::vector<double>& values, Scheme scheme);
    /// Cubic Hermite with explicitly supplied node derivatives.
    static Trajectory from_samples_and_slopes(Mesh mesh, const std::vector<double>& values,
                                              const std::vector<double>& slopes);
    static Trajectory constant(Mesh mesh, double value, Scheme scheme);
    /// Piecewise-constant from per-interval values.
    static Trajectory piecewise_constant(Mesh mesh, const std::vector<double>& interval_values);

    double eval(double t) const;
    /// d/dt of the stored polynomial at t (one-sided limit from the owning interval).
    double eval_derivative(double t) const;
    Trajectory derivative() const;
    double integrate(double a, double b) const;

    Scheme scheme() const { return scheme_; }
    const Mesh& mesh() const { return mesh_; }
    /// Node values (PiecewiseLinear / CubicHermite) or interval values (PiecewiseConstant).
    const std::vector<double>& values() const { return values_; }
    /// Node derivatives; CubicHermite only.
    const std::vector<double>& slopes() const;

private:
    Trajectory(Scheme scheme, Mesh mesh) : scheme_(scheme), mesh_(std::move(mesh)) {}

    // Cubic coefficients of segment j in local coordinate s in [0,1].
    std::array<double, 4> segment_cubic(std::size_t j) const;

    Scheme scheme_;
    Mesh mesh_;
    std::vector<double> values_;
    std::vector<double> slopes_;                    // CubicHermite
    std::vector<std::array<double, 3>> quadratic_;  // PiecewiseQuadratic, local s
};

namespace hermite {
// Cubic Hermite basis on s in [0,1].
inline double h00(double s) { return (2.0 * s - 3.0) * s * s + 1.0; }
inline double h10(double s) { return ((s - 2.0) * s + 1.0) * s; }
inline double h01(double s) { return (3.0 - 2.0 * s) * s * s; }
inline double h11(double s) { return (s - 1.0) * s * s; }
inline double dh00(double s) { return 6.0 * s * (s - 1.0); }
inline double dh10(double s) { return (3.0 * s - 4.0) * s + 1.0; }
inline double dh01(double s) { return 6.0 * s * (1.0 - s); }
inline double dh11(double s) { return (3.0 * s - 2.0) * s; }
}  // namespace hermite

}  // namespace ctd
