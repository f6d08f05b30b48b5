#include <string>

#include <CLI11.hpp>

#include "ctd/cli.hpp"

namespace {

void add_common(CLI::App* cmd, ctd::RunConfig& config, std::string& scheme) {
    cmd->add_option("--scenario", config.scenario_path, "Scenario JSON path")->required();
    cmd->add_option("--scheme", scheme, "Collocation scheme")
        ->check(CLI::IsMember({"uniform", "spline"}));
    cmd->add_option("--intervals", config.intervals, "Mesh intervals");
    cmd->add_option("--tol", config.tol, "Solver relative gap tolerance");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continuous-time economic dispatch"};
    app.require_subcommand(1);

    ctd::RunConfig config;
    std::string scheme = "uniform";

    CLI::App* solve = app.add_subcommand("solve", "Solve a scenario and write trajectories");
    add_common(solve, config, scheme);
    solve->add_option("--out", config.out_path, "Trajectory CSV path")->required();
    solve->add_option("--out-hourly", config.out_hourly, "Hourly energy CSV path");

    CLI::App* verify = app.add_subcommand("verify", "Audit optimality and the price theorems");
    add_common(verify, config, scheme);
    verify->add_option("--mode", config.mode, "Verification mode")
        ->check(CLI::IsMember({"kkt", "theorem1", "refine", "cross"}));
    verify->add_option("--out", config.out_path, "Report JSON path (stdout when omitted)");
    verify->add_option("--epsilon", config.epsilon, "Perturbation size (theorem1)");
    verify->add_option("--eta", config.eta_path, "Sampled eta JSON (theorem1)");

    CLI::App* duckgen = app.add_subcommand("duckgen", "Write a duck-curve scenario");
    duckgen->add_option("--out", config.out_path, "Scenario JSON path")->required();
    duckgen->add_option("--base", config.duck.base, "Base load, MW");
    duckgen->add_option("--morning-peak", config.duck.morning_peak, "Morning bump, MW");
    duckgen->add_option("--morning-center", config.duck.morning_center, "Morning center, h");
    duckgen->add_option("--morning-width", config.duck.morning_width, "Morning width, h");
    duckgen->add_option("--evening-peak", config.duck.evening_peak, "Evening bump, MW");
    duckgen->add_option("--evening-center", config.duck.evening_center, "Evening center, h");
    duckgen->add_option("--evening-width", config.duck.evening_width, "Evening width, h");
    duckgen->add_option("--solar-depth", config.duck.solar_depth, "Midday dip, MW");
    duckgen->add_option("--solar-center", config.duck.solar_center, "Dip center, h");
    duckgen->add_option("--solar-width", config.duck.solar_width, "Dip width, h");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (solve->parsed()) config.command = ctd::RunConfig::Command::Solve;
    if (verify->parsed()) config.command = ctd::RunConfig::Command::Verify;
    if (duckgen->parsed()) config.command = ctd::RunConfig::Command::DuckGen;
    config.scheme = (scheme == "spline") ? ctd::Scheme::CubicHermite : ctd::Scheme::PiecewiseLinear;
    return ctd::run(config);
}
