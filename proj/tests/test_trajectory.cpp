#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ctd/trajectory.hpp"

using ctd::Horizon;
using ctd::Mesh;
using ctd::Scheme;
using ctd::Trajectory;

TEST_CASE("horizon validation") {
    CHECK_THROWS_AS(Horizon(1.0, 1.0), ctd::DomainError);
    CHECK_THROWS_AS(Horizon(2.0, 1.0), ctd::DomainError);
    Horizon h(0.0, 24.0);
    CHECK(h.span() == 24.0);
    CHECK(h.contains(0.0));
    CHECK(h.contains(24.0));
    CHECK_FALSE(h.contains(24.0001));
}

TEST_CASE("lobatto rules") {
    auto n2 = ctd::lobatto_nodes(2);
    auto w2 = ctd::lobatto_weights(2);
    CHECK(n2 == std::vector<double>{-1.0, 1.0});
    CHECK(w2 == std::vector<double>{1.0, 1.0});

    auto n3 = ctd::lobatto_nodes(3);
    auto w3 = ctd::lobatto_weights(3);
    CHECK(n3[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(w3[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));

    // n-point rule integrates monomials up to degree 2n-3 exactly.
    for (int n = 2; n <= 7; ++n) {
        auto nodes = ctd::lobatto_nodes(n);
        auto weights = ctd::lobatto_weights(n);
        double wsum = 0.0;
        for (double w : weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        for (int d = 0; d <= 2 * n - 3; ++d) {
            double q = 0.0;
            for (int i = 0; i < n; ++i) q += weights[i] * std::pow(nodes[i], d);
            const double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
            CHECK(q == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
        }
    }
    CHECK_THROWS_AS(ctd::lobatto_nodes(1), ctd::DomainError);
}

TEST_CASE("mesh construction and validation") {
    Horizon h(0.0, 2.0);
    Mesh m = Mesh::uniform(h, 4);
    CHECK(m.node_count() == 5);
    CHECK(m.interval_count() == 4);
    CHECK(m.node(0) == 0.0);
    CHECK(m.node(4) == 2.0);
    CHECK(m.weight(0) == doctest::Approx(0.25));
    CHECK(m.weight(2) == doctest::Approx(0.5));
    double wsum = 0.0;
    for (double w : m.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));

    Mesh gl = Mesh::gauss_lobatto(h, 6);
    CHECK(gl.node_count() == 6);
    CHECK(gl.node(0) == doctest::Approx(0.0));
    CHECK(gl.node(5) == doctest::Approx(2.0));
    wsum = 0.0;
    for (double w : gl.weights()) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));

    CHECK_THROWS_AS(Mesh(h, {0.0, 1.0, 1.0, 2.0}, {0.5, 0.5, 0.5, 0.5}), ctd::DomainError);
    CHECK_THROWS_AS(Mesh(h, {0.0, 1.0, 2.0}, {0.5, 0.5}), ctd::DomainError);
    CHECK_THROWS_AS(Mesh(h, {0.0, 1.0, 2.0}, {0.5, 1.0, 1.0}), ctd::DomainError);
    CHECK_THROWS_AS(Mesh(h, {0.1, 1.0, 2.0}, {0.45, 0.95, 0.5}), ctd::DomainError);
    CHECK_THROWS_AS(Mesh::uniform(h, 0), ctd::DomainError);
}

TEST_CASE("mesh locate") {
    Mesh m = Mesh::uniform(Horizon(0.0, 1.0), 4);
    CHECK(m.locate(0.0) == 0);
    CHECK(m.locate(0.25) == 1);
    CHECK(m.locate(0.999) == 3);
    CHECK(m.locate(1.0) == 3);  // t2 belongs to the last interval
    CHECK_THROWS_AS(m.locate(-0.1), ctd::DomainError);
    CHECK_THROWS_AS(m.locate(1.1), ctd::DomainError);
}

TEST_CASE("piecewise linear sampling") {
    Mesh m = Mesh::uniform(Horizon(0.0, 2.0), 2);
    Trajectory f = Trajectory::from_samples(m, {0.0, 1.0, 0.0}, Scheme::PiecewiseLinear);
    CHECK(f.eval(0.5) == doctest::Approx(0.5));
    CHECK(f.eval(1.5) == doctest::Approx(0.5));
    CHECK(f.eval_derivative(0.5) == doctest::Approx(1.0));
    CHECK(f.eval_derivative(1.5) == doctest::Approx(-1.0));
    CHECK(f.integrate(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(f.integrate(0.5, 1.5) == doctest::Approx(0.75));
    CHECK_THROWS_AS(f.slopes(), ctd::DomainError);
    CHECK_THROWS_AS(Trajectory::from_samples(m, {0.0, 1.0}, Scheme::PiecewiseLinear),
                    ctd::DomainError);
}

TEST_CASE("hermite fit from samples pins one-sided end slopes") {
    Mesh m = Mesh::uniform(Horizon(0.0, 2.0), 2);
    Trajectory f = Trajectory::from_samples(m, {0.0, 1.0, 0.0}, Scheme::CubicHermite);
    // Interior slopes are centered differences; ends are plain one-sided slopes.
    CHECK(f.slopes() == std::vector<double>{1.0, 0.0, -1.0});
    CHECK(f.eval(0.5) == doctest::Approx(0.625));
    CHECK(f.eval_derivative(0.5) == doctest::Approx(1.25));
    CHECK(f.integrate(0.0, 2.0) == doctest::Approx(7.0 / 6.0));
}

TEST_CASE("hermite matches explicit basis") {
    Mesh m = Mesh::uniform(Horizon(0.0, 1.0), 1);
    Trajectory f = Trajectory::from_samples_and_slopes(m, {2.0, -1.0}, {0.5, 3.0});
    for (double s : {0.0, 0.25, 0.7, 1.0}) {
        const double want = 2.0 * ctd::hermite::h00(s) + 0.5 * ctd::hermite::h10(s) -
                            1.0 * ctd::hermite::h01(s) + 3.0 * ctd::hermite::h11(s);
        CHECK(f.eval(s) == doctest::Approx(want).epsilon(1e-14));
        const double dwant = 2.0 * ctd::hermite::dh00(s) + 0.5 * ctd::hermite::dh10(s) -
                             1.0 * ctd::hermite::dh01(s) + 3.0 * ctd::hermite::dh11(s);
        CHECK(f.eval_derivative(s) == doctest::Approx(dwant).epsilon(1e-13));
    }
}

TEST_CASE("hermite interpolation is C1 and reproduces cubics") {
    Mesh m = Mesh::uniform(Horizon(0.0, 3.0), 5);
    auto g = [](double t) { return ((t - 1.0) * t + 2.0) * t - 5.0; };   // t^3 - t^2 + 2t - 5
    auto dg = [](double t) { return (3.0 * t - 2.0) * t + 2.0; };
    std::vector<double> v(m.node_count()), d(m.node_count());
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        v[i] = g(m.node(i));
        d[i] = dg(m.node(i));
    }
    Trajectory f = Trajectory::from_samples_and_slopes(m, v, d);
    for (double t : {0.0, 0.37, 1.2, 2.5, 2.999, 3.0}) {
        CHECK(f.eval(t) == doctest::Approx(g(t)).epsilon(1e-12));
        CHECK(f.eval_derivative(t) == doctest::Approx(dg(t)).epsilon(1e-11));
    }
    CHECK(f.integrate(0.3, 2.7) ==
          doctest::Approx(53.136 / 4 - 19.656 / 3 + 7.2 - 12.0).epsilon(1e-10));

    // C1 continuity at interior nodes.
    Trajectory fd = f.derivative();
    CHECK(fd.scheme() == Scheme::PiecewiseQuadratic);
    for (std::size_t i = 1; i + 1 < m.node_count(); ++i) {
        const double t = m.node(i);
        const double left = fd.eval(t - 1e-12);
        const double right = fd.eval(t + 1e-12);
        CHECK(left == doctest::Approx(right).epsilon(1e-9));
        CHECK(right == doctest::Approx(dg(t)).epsilon(1e-9));
    }
}

TEST_CASE("derivative then integrate recovers increments") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    Mesh m = Mesh::uniform(Horizon(-1.0, 2.0), 7);
    std::vector<double> v(m.node_count()), d(m.node_count());
    for (std::size_t i = 0; i < m.node_count(); ++i) {
        v[i] = uni(rng);
        d[i] = uni(rng);
    }
    Trajectory f = Trajectory::from_samples_and_slopes(m, v, d);
    Trajectory fd = f.derivative();
    for (auto [a, b] : {std::pair{-1.0, 2.0}, {-0.4, 1.7}, {0.3, 0.9}}) {
        CHECK(fd.integrate(a, b) == doctest::Approx(f.eval(b) - f.eval(a)).epsilon(1e-11));
    }
    // Reversed limits flip the sign.
    CHECK(f.integrate(1.5, 0.5) == doctest::Approx(-f.integrate(0.5, 1.5)).epsilon(1e-13));
    CHECK_THROWS_AS(f.integrate(-1.5, 0.0), ctd::DomainError);
    CHECK_THROWS_AS(f.integrate(0.0, 2.5), ctd::DomainError);
}

TEST_CASE("integration matches dense riemann sums") {
    Mesh m = Mesh::uniform(Horizon(0.0, 1.0), 4);
    std::vector<double> v{0.2, -1.0, 0.5, 2.0, 1.0};
    Trajectory f = Trajectory::from_samples(m, v, Scheme::CubicHermite);
    const double a = 0.13, b = 0.91;
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += f.eval(a + (b - a) * (i + 0.5) / n);
    acc *= (b - a) / n;
    CHECK(f.integrate(a, b) == doctest::Approx(acc).epsilon(1e-8));
}

TEST_CASE("piecewise constant trajectories") {
    Mesh m = Mesh::uniform(Horizon(0.0, 3.0), 3);
    Trajectory f = Trajectory::piecewise_constant(m, {1.0, -2.0, 4.0});
    CHECK(f.eval(0.5) == 1.0);
    CHECK(f.eval(1.0) == -2.0);  // node value comes from the right interval
    CHECK(f.eval(3.0) == 4.0);
    CHECK(f.eval_derivative(1.5) == 0.0);
    CHECK(f.integrate(0.5, 2.5) == doctest::Approx(0.5 - 2.0 + 2.0));
    CHECK_THROWS_AS(Trajectory::piecewise_constant(m, {1.0, 2.0}), ctd::DomainError);
}

TEST_CASE("constant trajectory of each scheme") {
    Mesh m = Mesh::uniform(Horizon(0.0, 2.0), 4);
    for (Scheme s : {Scheme::PiecewiseConstant, Scheme::PiecewiseLinear, Scheme::CubicHermite}) {
        Trajectory f = Trajectory::constant(m, 3.5, s);
        CHECK(f.eval(1.3) == doctest::Approx(3.5));
        CHECK(f.eval_derivative(0.7) == doctest::Approx(0.0));
        CHECK(f.integrate(0.0, 2.0) == doctest::Approx(7.0));
    }
}
