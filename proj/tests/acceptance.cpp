// Acceptance suite: one line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ctd/pricing.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/transcribe.hpp"
#include "ctd/verify.hpp"
#include "fixtures.hpp"

using namespace ctd;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific << v;
    return out.str();
}

Outcome criterion_kkt_suite() {
    double worst_gap = 0.0, worst_comp = 0.0, worst_time = 0.0;
    int optimal = 0;
    const int total = 20;
    for (unsigned seed = 0; seed < total; ++seed) {
        Scenario s = fixtures::randomized(seed);
        const auto start = std::chrono::steady_clock::now();
        Transcription t = transcribe(s, Scheme::PiecewiseLinear, 100);
        QpSolution sol = solve_qp(t.qp, 1e-8);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (sol.status != QpStatus::Optimal) continue;
        ++optimal;
        const double comp =
            residuals(t.qp, sol).complementarity / (1.0 + std::abs(sol.primal_obj));
        worst_gap = std::max(worst_gap, sol.gap);
        worst_comp = std::max(worst_comp, comp);
        worst_time = std::max(worst_time, secs);
    }
    Outcome o;
    o.passed = optimal == total && worst_gap <= 1e-8 && worst_comp <= 1e-7 &&
               worst_time <= 5.0;
    std::ostringstream d;
    d << optimal << "/" << total << " optimal, worst gap " << num(worst_gap)
      << ", worst complementarity " << num(worst_comp) << ", worst time " << num(worst_time)
      << " s";
    o.detail = d.str();
    return o;
}

Outcome criterion_analytic_dispatch() {
    auto r = fixtures::solve(fixtures::two_unit(), Scheme::PiecewiseLinear, 100, 1e-11);
    Outcome o;
    if (r.sol.status != QpStatus::Optimal) {
        o.detail = "solve not optimal";
        return o;
    }
    double ex = 0.0, el = 0.0;
    for (std::size_t i = 0; i <= 100; ++i) {
        ex = std::max(ex, std::abs(r.sched.power[0].values()[i] - 2.0));
        ex = std::max(ex, std::abs(r.sched.power[1].values()[i] - 1.0));
        el = std::max(el, std::abs(r.mult.lambda[i] - 2.0));
    }
    o.passed = ex <= 1e-6 && el <= 1e-6;
    o.detail = "max |x - (2,1)| " + num(ex) + ", max |lambda - 2| " + num(el);
    return o;
}

Outcome criterion_marginal_price() {
    Scenario s = fixtures::duck3();
    auto r = fixtures::solve(s, Scheme::PiecewiseLinear, 200, 1e-10);
    Outcome o;
    if (r.sol.status != QpStatus::Optimal) {
        o.detail = "solve not optimal";
        return o;
    }
    PriceReport pr = price_formula(s, r.sched, r.mult);
    double worst = 0.0;
    int counted = 0;
    for (std::size_t i = 0; i < pr.times.size(); ++i) {
        if (pr.marginal_set[i].empty()) continue;
        ++counted;
        worst = std::max(worst, pr.residual[i] / (1.0 + std::abs(pr.lambda_dual[i])));
    }
    o.passed = counted > 100 && worst <= 1e-5;
    o.detail = "scaled |lambda - marginal cost| " + num(worst) + " over " +
               std::to_string(counted) + " priced nodes";
    return o;
}

Outcome criterion_price_decomposition() {
    Scenario s = fixtures::ramp_scarcity();
    const int n = 100;
    auto r = fixtures::solve(s, Scheme::PiecewiseLinear, n, 1e-10);
    Outcome o;
    if (r.sol.status != QpStatus::Optimal) {
        o.detail = "solve not optimal";
        return o;
    }
    PriceReport pr = price_formula(s, r.sched, r.mult);
    const double dt = s.horizon.span() / n;
    double worst_lambda = 0.0, worst_identity = 0.0;
    bool have_identity = false;
    for (int i = 2; i + 1 < static_cast<int>(pr.times.size()); ++i) {
        worst_lambda = std::max(worst_lambda, std::abs(pr.lambda_dual[i] - 2.0));
        const double hat = pr.lambda_hat[0][i];
        if (i + 2 < static_cast<int>(pr.times.size()) && !std::isnan(hat)) {
            have_identity = true;
            worst_identity = std::max(worst_identity, std::abs(hat - pr.lambda_dual[i]));
        }
    }
    o.passed = worst_lambda <= 1e-4 && have_identity && worst_identity <= 5.0 * dt;
    o.detail = "max |lambda - 2| " + num(worst_lambda) + " in the binding window, identity residual " +
               num(worst_identity) + " (allowance " + num(5.0 * dt) + ")";
    return o;
}

Outcome criterion_theorem1() {
    Scenario s = fixtures::two_unit();
    const int n = 400;
    PerturbationSpec lift;
    lift.epsilon = 1e-3;
    VerificationReport uplift = perturbation_check(s, lift, Scheme::PiecewiseLinear, n);

    PerturbationSpec sine;
    sine.shape = PerturbationSpec::Shape::Custom;
    sine.epsilon = 1e-3;
    Mesh mesh = Mesh::uniform(s.horizon, n);
    std::vector<double> eta(mesh.node_count());
    for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = std::sin(M_PI * mesh.node(i));
    sine.eta = Trajectory::from_samples(mesh, eta, Scheme::PiecewiseLinear);
    VerificationReport sin_rep = perturbation_check(s, sine, Scheme::PiecewiseLinear, n);

    Outcome o;
    o.passed = uplift.passed && uplift.relative_error <= 0.01 && sin_rep.passed &&
               sin_rep.relative_error <= 0.01 && !uplift.ramp_activated;
    o.detail = "uniform lift error " + num(uplift.relative_error) + ", sine shape error " +
               num(sin_rep.relative_error);
    return o;
}

Outcome criterion_theorem2() {
    Scenario s = fixtures::thm2();
    const std::vector<int> counts{50, 100, 200, 400};
    std::vector<double> errors;
    Outcome o;
    for (int n : counts) {
        auto r = fixtures::solve(s, Scheme::CubicHermite, n, 1e-10);
        if (r.sol.status != QpStatus::Optimal) {
            o.detail = "solve not optimal at N=" + std::to_string(n);
            return o;
        }
        double err = 0.0;
        for (int i = 1; i < n; ++i) {
            const double t = r.mult.mesh.node(i);
            err = std::max(err, std::abs(r.mult.lambda[i] - (t * t - 2.0)));
        }
        errors.push_back(err);
    }
    bool monotone = true;
    for (std::size_t j = 1; j < errors.size(); ++j)
        if (errors[j] >= errors[j - 1]) monotone = false;
    const double order =
        std::log(errors.front() / errors.back()) / std::log(400.0 / 50.0);
    o.passed = monotone && order >= 1.0 && errors.back() <= 5e-2;
    std::ostringstream d;
    d << "interior errors";
    for (double e : errors) d << " " << num(e);
    d << ", observed order " << num(order);
    o.detail = d.str();
    return o;
}

Outcome criterion_theorem3() {
    Scenario s = fixtures::thm3();
    auto r = fixtures::solve(s, Scheme::PiecewiseLinear, 400, 1e-10);
    Outcome o;
    if (r.sol.status != QpStatus::Optimal) {
        o.detail = "solve not optimal";
        return o;
    }
    PriceReport pr = price_formula(s, r.sched, r.mult);
    double worst = 0.0;
    for (std::size_t i = 0; i < pr.times.size(); ++i) {
        const double want = 4.0 - 0.1 * (pr.times[i] - s.horizon.t1);
        if (std::isnan(pr.lambda_formula[i])) {
            o.detail = "price formula unavailable at node " + std::to_string(i);
            return o;
        }
        worst = std::max(worst, std::abs(pr.lambda_formula[i] - want));
    }
    o.passed = worst <= 5e-3;
    o.detail = "max |reported lambda - (4 - 0.1 (t - t1))| " + num(worst);
    return o;
}

Outcome criterion_cross_scheme() {
    VerificationReport rep = cross_scheme_check(fixtures::duck3(), 200);
    Outcome o;
    o.passed = rep.passed && rep.relative_error <= 0.01;
    o.detail = "relative lambda disagreement " + num(rep.relative_error) +
               " away from activity switches";
    return o;
}

Outcome criterion_invariance() {
    Scenario base = fixtures::duck3();
    auto rb = fixtures::solve(base, Scheme::PiecewiseLinear, 100, 1e-10);
    Outcome o;
    if (rb.sol.status != QpStatus::Optimal) {
        o.detail = "base solve not optimal";
        return o;
    }

    std::vector<Unit> shifted = base.units;
    for (Unit& u : shifted) u.cost.a0 += 5.0;
    Scenario s_shift = make_scenario(base.horizon, base.load_spec, shifted, base.slack);
    auto rs = fixtures::solve(s_shift, Scheme::PiecewiseLinear, 100, 1e-10);

    std::vector<Unit> scaled = base.units;
    for (Unit& u : scaled) {
        u.cost.a0 *= 3.0;
        u.cost.a1 *= 3.0;
        u.cost.a2 *= 3.0;
        u.cost.b1 *= 3.0;
        u.cost.b2 *= 3.0;
        u.cost.b_abs *= 3.0;
        u.cost.e1 *= 3.0;
        u.cost.e2 *= 3.0;
    }
    Scenario s_scale = make_scenario(base.horizon, base.load_spec, scaled, base.slack);
    auto rc = fixtures::solve(s_scale, Scheme::PiecewiseLinear, 100, 1e-10);

    if (rs.sol.status != QpStatus::Optimal || rc.sol.status != QpStatus::Optimal) {
        o.detail = "perturbed solve not optimal";
        return o;
    }
    double shift_x = 0.0, shift_l = 0.0, scale_x = 0.0, scale_l = 0.0;
    for (std::size_t k = 0; k < base.units.size(); ++k) {
        for (std::size_t i = 0; i <= 100; ++i) {
            shift_x = std::max(shift_x, std::abs(rs.sched.power[k].values()[i] -
                                                 rb.sched.power[k].values()[i]));
            scale_x = std::max(scale_x, std::abs(rc.sched.power[k].values()[i] -
                                                 rb.sched.power[k].values()[i]));
        }
    }
    for (std::size_t i = 0; i <= 100; ++i) {
        shift_l = std::max(shift_l, std::abs(rs.mult.lambda[i] - rb.mult.lambda[i]));
        scale_l = std::max(scale_l, std::abs(rc.mult.lambda[i] - 3.0 * rb.mult.lambda[i]) /
                                        (1.0 + std::abs(3.0 * rb.mult.lambda[i])));
    }
    o.passed = shift_x <= 1e-7 && shift_l <= 1e-7 && scale_x <= 1e-6 && scale_l <= 1e-6;
    o.detail = "a0 shift moved x by " + num(shift_x) + ", lambda by " + num(shift_l) +
               "; scaling moved x by " + num(scale_x) + ", relative lambda by " + num(scale_l);
    return o;
}

Outcome criterion_hourly() {
    Outcome o;
    double worst = 0.0;
    std::vector<Scenario> cases{fixtures::duck3(), fixtures::randomized(3),
                                fixtures::randomized(7), fixtures::randomized(12)};
    std::vector<int> meshes{200, 100, 100, 100};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        auto r = fixtures::solve(cases[c], Scheme::PiecewiseLinear, meshes[c], 1e-9);
        if (r.sol.status != QpStatus::Optimal) {
            o.detail = "solve not optimal for case " + std::to_string(c);
            return o;
        }
        HourlyAggregate agg = aggregate_hourly(r.sched);
        double total = 0.0;
        for (const auto& row : agg.mwh)
            for (double v : row) total += v;
        const double want =
            r.sched.load.integrate(cases[c].horizon.t1, cases[c].horizon.t2);
        worst = std::max(worst, std::abs(total - want) / (1.0 + std::abs(want)));
    }
    o.passed = worst <= 1e-9;
    o.detail = "worst scaled |sum of hourly energy - integral of load| " + num(worst);
    return o;
}

}  // namespace

int main() {
    struct Entry {
        const char* label;
        Outcome (*fn)();
    };
    const std::vector<Entry> entries{
        {"randomized KKT suite", criterion_kkt_suite},
        {"two-unit analytic dispatch", criterion_analytic_dispatch},
        {"marginal-unit pricing on a smooth duck scenario", criterion_marginal_price},
        {"price decomposition under ramp scarcity", criterion_price_decomposition},
        {"marginal value of load (theorem 1)", criterion_theorem1},
        {"ramp-bid price convergence (theorem 2)", criterion_theorem2},
        {"energy-bid price formula (theorem 3)", criterion_theorem3},
        {"cross-scheme price agreement", criterion_cross_scheme},
        {"cost shift and scaling invariance", criterion_invariance},
        {"hourly aggregation closes the energy balance", criterion_hourly},
    };
    int failures = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        Outcome o;
        try {
            o = entries[i].fn();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.passed) ++failures;
        std::printf("[%s] criterion %zu: %s (%s)\n", o.passed ? "PASS" : "FAIL", i + 1,
                    entries[i].label, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
