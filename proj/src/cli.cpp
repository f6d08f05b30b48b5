#include "ctd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctd/errors.hpp"
#include "ctd/pricing.hpp"
#include "ctd/qp_solver.hpp"
#include "ctd/report_io.hpp"
#include "ctd/transcribe.hpp"
#include "ctd/verify.hpp"

namespace ctd {

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitIngestion = 2;
constexpr int kExitNotOptimal = 3;
constexpr int kExitVerification = 4;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

bool integer_hour_span(const Horizon& horizon) {
    const double span = horizon.span();
    return std::abs(span - std::round(span)) <= 1e-9 && std::round(span) >= 1.0;
}

Trajectory load_eta(const std::string& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    if (!j.is_object() || !j.contains("times") || !j.contains("values"))
        throw SchemaError("eta file must be an object with times and values arrays");
    std::vector<double> times = j.at("times").get<std::vector<double>>();
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    if (times.size() != values.size() || times.size() < 2)
        throw SchemaError("eta: times and values must have equal length >= 2");
    std::vector<double> weights(times.size(), 0.0);
    for (std::size_t j2 = 0; j2 + 1 < times.size(); ++j2) {
        const double h = times[j2 + 1] - times[j2];
        weights[j2] += h / 2.0;
        weights[j2 + 1] += h / 2.0;
    }
    Mesh mesh(Horizon(times.front(), times.back()), times, weights);
    return Trajectory::from_samples(mesh, values, Scheme::PiecewiseLinear);
}

int run_solve(const RunConfig& config, const Scenario& s) {
    Transcription t = transcribe(s, config.scheme, config.intervals);
    QpSolution sol = solve_qp(t.qp, config.tol);
    if (sol.status != QpStatus::Optimal) {
        std::cerr << "solver ended " << to_string(sol.status) << " after " << sol.iterations
                  << " iterations\n";
        return kExitNotOptimal;
    }
    Schedule sched = recover_schedule(sol.u, t.map, s);
    MultiplierTrajectories mult = recover_multipliers(sol, t.map);
    PriceReport price = price_formula(s, sched, mult);

    write_file(config.out_path, schedule_csv(sched, mult));
    write_file(config.out_path + ".price.json", price_report_json(price));
    if (integer_hour_span(s.horizon)) {
        const std::string hourly_path =
            config.out_hourly.empty() ? config.out_path + ".hourly.csv" : config.out_hourly;
        write_file(hourly_path, hourly_csv(aggregate_hourly(sched)));
    } else if (!config.out_hourly.empty()) {
        std::cerr << "out-hourly ignored: horizon does not span whole hours\n";
    }
    std::cout << "status " << to_string(sol.status) << " objective "
              << format_double(sched.objective) << " iterations " << sol.iterations << "\n";
    return 0;
}

int run_verify(const RunConfig& config, const Scenario& s) {
    VerificationReport rep;
    if (config.mode == "kkt") {
        rep = kkt_check(s, config.scheme, config.intervals, config.tol);
    } else if (config.mode == "theorem1") {
        PerturbationSpec spec;
        spec.epsilon = config.epsilon;
        if (!config.eta_path.empty()) {
            spec.shape = PerturbationSpec::Shape::Custom;
            spec.eta = load_eta(config.eta_path);
        }
        rep = perturbation_check(s, spec, config.scheme, config.intervals);
    } else if (config.mode == "refine") {
        const std::vector<int> counts = {config.intervals, 2 * config.intervals,
                                         4 * config.intervals};
        rep = refinement_study(s, counts, config.scheme);
    } else if (config.mode == "cross") {
        rep = cross_scheme_check(s, config.intervals);
    } else {
        std::cerr << "unknown verify mode: " << config.mode << "\n";
        return kExitIngestion;
    }
    const std::string text = verification_report_json(rep);
    if (config.out_path.empty())
        std::cout << text;
    else
        write_file(config.out_path, text);
    if (!rep.passed) {
        std::cerr << "verification failed in mode " << rep.mode << "\n";
        return kExitVerification;
    }
    return 0;
}

int run_duckgen(const RunConfig& config) {
    const Horizon horizon(0.0, 24.0);
    double peak = 0.0, steep = 0.0;
    for (int i = 0; i <= 24 * 60; ++i) {
        const double t = 24.0 * i / (24.0 * 60);
        peak = std::max(peak, duck_value(config.duck, t));
        steep = std::max(steep, std::abs(duck_slope(config.duck, t)));
    }
    Unit unit;
    unit.id = "g1";
    unit.p_min = 0.0;
    unit.p_max = std::ceil(1.05 * peak);
    unit.r_max = std::ceil(2.0 * steep) + 10.0;
    unit.r_min = -unit.r_max;
    unit.cost.a1 = 25.0;
    unit.cost.a2 = 0.01;

    LoadSpec load;
    load.kind = LoadSpec::Kind::Duck;
    load.duck = config.duck;
    Scenario s = make_scenario(horizon, std::move(load), {unit}, SlackPolicy{});
    write_file(config.out_path, serialize_scenario(s));
    return 0;
}

}  // namespace

int run(const RunConfig& config) {
    try {
        if (config.command != RunConfig::Command::DuckGen) {
            if (config.intervals < 2) {
                std::cerr << "intervals must be at least 2\n";
                return kExitIngestion;
            }
            if (!(config.tol > 0.0)) {
                std::cerr << "tol must be positive\n";
                return kExitIngestion;
            }
        }
        if (config.out_path.empty() && config.command != RunConfig::Command::Verify) {
            std::cerr << "an output path is required\n";
            return kExitIngestion;
        }
        switch (config.command) {
            case RunConfig::Command::DuckGen:
                return run_duckgen(config);
            case RunConfig::Command::Solve:
                return run_solve(config, load_scenario(read_file(config.scenario_path)));
            case RunConfig::Command::Verify:
                return run_verify(config, load_scenario(read_file(config.scenario_path)));
        }
        return kExitInternal;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitIngestion;
    } catch (const TranscriptionError& e) {
        std::cerr << "transcription error: " << e.what() << "\n";
        return kExitIngestion;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitIngestion;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace ctd
