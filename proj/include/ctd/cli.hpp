#pragma once

#include <string>
#include <vector>

#include "ctd/market_model.hpp"
#include "ctd/trajectory.hpp"

namespace ctd {

struct RunConfig {
    enum class Command { Solve, Verify, DuckGen };
    Command command = Command::Solve;
    std::string scenario_path;
    Scheme scheme = Scheme::PiecewiseLinear;
    int intervals = 100;
    double tol = 1e-8;
    std::string out_path;
    std::string out_hourly;  // default: <out>.hourly.csv on integer-hour horizons
    std::string mode = "kkt";
    double epsilon = 1e-3;
    std::string eta_path;    // theorem1: sampled eta, JSON {"times":[],"values":[]}
    DuckParams duck;         // duckgen
};

/// Exit codes: 0 success, 1 internal error, 2 ingestion/schema error,
/// 3 solver not optimal, 4 verification failure.
int run(const RunConfig& config);

}  // namespace ctd
