#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctd/market_model.hpp"
#include "ctd/pricing.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/transcribe.hpp"

namespace fixtures {

inline ctd::Unit plain_unit(std::string id, double p_min, double p_max, double r_min,
                            double r_max, double a1, double a2) {
    ctd::Unit u;
    u.id = std::move(id);
    u.p_min = p_min;
    u.p_max = p_max;
    u.r_min = r_min;
    u.r_max = r_max;
    u.cost.a1 = a1;
    u.cost.a2 = a2;
    return u;
}

inline ctd::LoadSpec sampled_load(std::vector<double> times, std::vector<double> values) {
    ctd::LoadSpec load;
    load.kind = ctd::LoadSpec::Kind::Samples;
    load.times = std::move(times);
    load.values = std::move(values);
    return load;
}

inline ctd::LoadSpec constant_load(const ctd::Horizon& h, double value) {
    return sampled_load({h.t1, h.t2}, {value, value});
}

// C1 = x^2/2, C2 = x^2, y = 3: dispatch (2, 1) at price 2.
inline ctd::Scenario two_unit() {
    ctd::Horizon h(0.0, 1.0);
    return ctd::make_scenario(h, constant_load(h, 3.0),
                              {plain_unit("u1", -10, 10, -10, 10, 0.0, 0.5),
                               plain_unit("u2", -10, 10, -10, 10, 0.0, 1.0)},
                              ctd::SlackPolicy{});
}

// u1 marginal everywhere; u2 priced out and pinned at zero.
inline ctd::Scenario unique_marginal() {
    ctd::Horizon h(0.0, 1.0);
    return ctd::make_scenario(h, constant_load(h, 3.0),
                              {plain_unit("u1", 0, 10, -10, 10, 0.0, 0.5),
                               plain_unit("u2", 0, 5, -10, 10, 10.0, 0.0)},
                              ctd::SlackPolicy{});
}

// C = x^2/2 + xdot^2/2, y = t^2: lambda = t^2 - 2 in the continuum.
inline ctd::Scenario thm2() {
    const int n = 400;
    std::vector<double> times(n + 1), values(n + 1);
    for (int i = 0; i <= n; ++i) {
        times[i] = static_cast<double>(i) / n;
        values[i] = times[i] * times[i];
    }
    ctd::Unit u = plain_unit("g", -10, 10, -10, 10, 0.0, 0.5);
    u.cost.b2 = 0.5;
    return ctd::make_scenario(ctd::Horizon(0.0, 1.0), sampled_load(times, values), {u},
                              ctd::SlackPolicy{});
}

// C = x^2/2 + z/10, y = 4 on [0,2]: dual lambda = 4.2 - 0.1 t.
inline ctd::Scenario thm3() {
    ctd::Horizon h(0.0, 2.0);
    ctd::Unit u = plain_unit("g", 0, 10, -10, 10, 0.0, 0.5);
    u.cost.e1 = 0.1;
    return ctd::make_scenario(h, constant_load(h, 4.0), {u}, ctd::SlackPolicy{});
}

// Cheap unit ramp-limited below the load slope; expensive unit covers the rest.
inline ctd::Scenario ramp_scarcity() {
    ctd::Horizon h(0.0, 2.0);
    return ctd::make_scenario(h, sampled_load({0.0, 2.0}, {2.0, 8.0}),
                              {plain_unit("cheap", 0, 10, -5, 1, 1.0, 0.0),
                               plain_unit("exp", 0, 10, -10, 10, 2.0, 0.0)},
                              ctd::SlackPolicy{});
}

// Three plain quadratic bids under the default duck curve.
inline ctd::Scenario duck3() {
    ctd::LoadSpec load;
    load.kind = ctd::LoadSpec::Kind::Duck;
    return ctd::make_scenario(ctd::Horizon(0.0, 24.0), load,
                              {plain_unit("u1", 0, 600, -200, 200, 8.0, 0.004),
                               plain_unit("u2", 0, 500, -150, 150, 12.0, 0.006),
                               plain_unit("u3", 0, 400, -100, 100, 20.0, 0.01)},
                              ctd::SlackPolicy{});
}

// Every bid class at once: energy cap, absolute-value ramp cost, slack.
inline ctd::Scenario mixed() {
    ctd::Horizon h(0.0, 4.0);
    ctd::Unit a = plain_unit("a", 0, 6, -4, 4, 5.0, 0.3);
    a.cost.a0 = 1.0;
    a.cost.e1 = 0.2;
    a.cost.e2 = 0.01;
    a.z_max = 18.0;
    ctd::Unit b = plain_unit("b", 0, 7, -2, 2, 7.0, 0.2);
    b.cost.b1 = 0.5;
    b.cost.b2 = 0.1;
    b.cost.b_abs = 1.5;
    ctd::SlackPolicy slack;
    slack.enabled = true;
    return ctd::make_scenario(h, sampled_load({0, 1, 2, 3, 4}, {5, 8, 6, 9, 7}), {a, b}, slack);
}

// Deterministic mixed-class scenario family for the solver suite.
inline ctd::Scenario randomized(unsigned seed) {
    std::mt19937 rng(12345u + seed);
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    const int K = static_cast<int>(seed % 5) + 1;
    const ctd::Horizon h(0.0, 24.0);

    std::vector<ctd::Unit> units;
    int energy_left = 2, abs_left = 1;
    double cap = 0.0;
    for (int k = 0; k < K; ++k) {
        ctd::Unit u = plain_unit("g" + std::to_string(k + 1), 0.0, uni(200, 600), 0.0, 0.0,
                                 uni(5, 30), uni(0.005, 0.05));
        u.r_max = uni(80, 300);
        u.r_min = -uni(40, 300);
        const int cls = static_cast<int>(rng() % 4);
        if (cls == 1) {
            u.cost.b1 = uni(0, 2);
            u.cost.b2 = uni(0.01, 0.3);
        } else if (cls == 2 && abs_left > 0) {
            --abs_left;
            u.cost.b_abs = uni(0.5, 5);
        } else if (cls == 3 && energy_left > 0) {
            --energy_left;
            u.cost.e1 = uni(0.05, 0.5);
            if (rng() % 2 == 0) u.cost.e2 = uni(1e-4, 1e-3);
            u.z_max = uni(0.3, 0.7) * u.p_max * h.span();
        }
        cap += u.p_max;
        units.push_back(std::move(u));
    }

    const int samples = 192;
    std::vector<double> times(samples + 1), values(samples + 1);
    const double base = uni(0.35, 0.55) * cap;
    struct Bump {
        double amp, center, width;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < 3; ++b)
        bumps.push_back(Bump{uni(-0.15, 0.2) * cap, uni(2, 22), uni(1.5, 4)});
    for (int i = 0; i <= samples; ++i) {
        const double t = 24.0 * i / samples;
        double y = base;
        for (const Bump& b : bumps) {
            const double s = (t - b.center) / b.width;
            y += b.amp * std::exp(-0.5 * s * s);
        }
        times[i] = t;
        values[i] = std::max(y, 0.05 * cap);
    }

    ctd::SlackPolicy slack;
    slack.enabled = true;
    return ctd::make_scenario(h, sampled_load(std::move(times), std::move(values)),
                              std::move(units), slack);
}

struct Solved {
    ctd::Transcription trans;
    ctd::QpSolution sol;
    ctd::Schedule sched;
    ctd::MultiplierTrajectories mult;
};

inline Solved solve(const ctd::Scenario& s, ctd::Scheme scheme, int intervals,
                    double tol = 1e-10) {
    ctd::Transcription t = ctd::transcribe(s, scheme, intervals);
    ctd::QpSolution sol = ctd::solve_qp(t.qp, tol);
    ctd::Schedule sched = ctd::recover_schedule(sol.u, t.map, s);
    ctd::MultiplierTrajectories mult = ctd::recover_multipliers(sol, t.map);
    return Solved{std::move(t), std::move(sol), std::move(sched), std::move(mult)};
}

}  // namespace fixtures
