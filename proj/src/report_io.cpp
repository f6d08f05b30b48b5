#include "ctd/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "ctd/errors.hpp"

namespace ctd {

std::string format_double(double v) {
    // 17 significant digits, locale-independent.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw Error("number formatting failed");
    return std::string(buf, res.ptr);
}

std::string schedule_csv(const Schedule& sched, const MultiplierTrajectories& m) {
    const Mesh& mesh = m.mesh;
    std::string out = "t,y,lambda";
    for (const std::string& id : m.unit_ids)
        out += ",x_" + id + ",mu_hi_" + id + ",mu_lo_" + id + ",gamma_hi_" + id + ",gamma_lo_" +
               id + ",beta_" + id;
    out += "\n";

    std::vector<std::vector<double>> gh(m.units.size()), gl(m.units.size());
    for (std::size_t k = 0; k < m.units.size(); ++k) {
        gh[k] = staggered_at_nodes(m.units[k].gamma_hi, mesh);
        gl[k] = staggered_at_nodes(m.units[k].gamma_lo, mesh);
    }
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        const double t = mesh.node(i);
        out += format_double(t);
        out += ',';
        out += format_double(sched.load.eval(t));
        out += ',';
        out += format_double(m.lambda[i]);
        for (std::size_t k = 0; k < m.units.size(); ++k) {
            out += ',';
            out += format_double(sched.power[k].eval(t));
            out += ',';
            out += format_double(m.units[k].mu_hi[i]);
            out += ',';
            out += format_double(m.units[k].mu_lo[i]);
            out += ',';
            out += format_double(gh[k][i]);
            out += ',';
            out += format_double(gl[k][i]);
            out += ',';
            out += format_double(m.units[k].beta_hi[i]);
        }
        out += '\n';
    }
    return out;
}

std::string hourly_csv(const HourlyAggregate& agg) {
    std::string out = "hour";
    for (const std::string& id : agg.ids) out += ",e_" + id;
    out += "\n";
    const std::size_t hours = agg.mwh.empty() ? 0 : agg.mwh.front().size();
    for (std::size_t h = 0; h < hours; ++h) {
        out += std::to_string(h);
        for (const auto& row : agg.mwh) {
            out += ',';
            out += format_double(row[h]);
        }
        out += '\n';
    }
    return out;
}

namespace {

nlohmann::json kkt_json(const KktResiduals& k) {
    return {{"stationarity", k.stationarity},
            {"primal_eq", k.primal_eq},
            {"primal_ineq", k.primal_ineq},
            {"complementarity", k.complementarity},
            {"dual_negativity", k.dual_negativity}};
}

}  // namespace

std::string price_report_json(const PriceReport& rep) {
    nlohmann::json j;
    j["times"] = rep.times;
    j["lambda_dual"] = rep.lambda_dual;
    j["lambda_formula"] = rep.lambda_formula;
    j["residual"] = rep.residual;
    j["marginal_set"] = rep.marginal_set;
    j["marginal_tol"] = rep.marginal_tol;
    j["max_identity_residual"] = rep.max_identity_residual;
    nlohmann::json hats = nlohmann::json::object();
    for (std::size_t k = 0; k < rep.unit_ids.size(); ++k)
        hats[rep.unit_ids[k]] = rep.lambda_hat[k];
    j["lambda_hat"] = hats;
    nlohmann::json kinks = nlohmann::json::array();
    for (const KinkFlag& f : rep.kinks)
        kinks.push_back({{"unit", rep.unit_ids[f.unit]},
                         {"node", f.node},
                         {"sub_lo", f.sub_lo},
                         {"sub_hi", f.sub_hi}});
    j["kinks"] = kinks;
    return j.dump(2) + "\n";
}

std::string verification_report_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["mode"] = rep.mode;
    j["passed"] = rep.passed;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["relative_error"] = rep.relative_error;
    j["kkt"] = kkt_json(rep.kkt);
    j["interval_counts"] = rep.interval_counts;
    j["lambda_errors"] = rep.lambda_errors;
    j["x_errors"] = rep.x_errors;
    j["el_residuals"] = rep.el_residuals;
    j["orders"] = rep.orders;
    j["ramp_activated"] = rep.ramp_activated;
    j["notes"] = rep.notes;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("failed writing " + path);
}

}  // namespace ctd
