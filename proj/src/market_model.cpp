#include "ctd/market_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <json.hpp>

namespace ctd {

double cost_value(const CostFunction& c, double z, double x, double r) {
    return c.a0 + c.a1 * x + c.a2 * x * x + c.b1 * r + c.b2 * r * r +
           c.b_abs * std::abs(r) + c.e1 * z + c.e2 * z * z;
}

CostGradients cost_gradients(const CostFunction& c, double z, double x, double r) {
    CostGradients g;
    g.dz = c.e1 + 2.0 * c.e2 * z;
    g.dx = c.a1 + 2.0 * c.a2 * x;
    g.dr = c.b1 + 2.0 * c.b2 * r;
    if (c.b_abs > 0.0) {
        if (r == 0.0)
            throw NondifferentiableError(
                "cost_gradients: |r| term is not differentiable at r = 0");
        g.dr += (r > 0.0) ? c.b_abs : -c.b_abs;
    }
    return g;
}

std::pair<double, double> ramp_subgradient(const CostFunction& c) {
    return {c.b1 - c.b_abs, c.b1 + c.b_abs};
}

namespace {

double gaussian(double t, double center, double width) {
    const double u = (t - center) / width;
    return std::exp(-0.5 * u * u);
}

double dgaussian(double t, double center, double width) {
    const double u = (t - center) / width;
    return -u / width * std::exp(-0.5 * u * u);
}

}  // namespace

double duck_value(const DuckParams& p, double t) {
    return p.base + p.morning_peak * gaussian(t, p.morning_center, p.morning_width) +
           p.evening_peak * gaussian(t, p.evening_center, p.evening_width) -
           p.solar_depth * gaussian(t, p.solar_center, p.solar_width);
}

double duck_slope(const DuckParams& p, double t) {
    return p.morning_peak * dgaussian(t, p.morning_center, p.morning_width) +
           p.evening_peak * dgaussian(t, p.evening_center, p.evening_width) -
           p.solar_depth * dgaussian(t, p.solar_center, p.solar_width);
}

namespace {

void validate_duck(const DuckParams& p, const Horizon& horizon) {
    if (p.base < 0.0 || p.morning_peak < 0.0 || p.evening_peak < 0.0 || p.solar_depth < 0.0)
        throw SchemaError("duck params: magnitudes must be nonnegative");
    if (p.morning_width <= 0.0 || p.evening_width <= 0.0 || p.solar_width <= 0.0)
        throw SchemaError("duck params: widths must be positive");
    // Scan the closed form on a 1-minute grid.
    const int steps = 1440;
    for (int i = 0; i <= steps; ++i) {
        const double t = horizon.t1 + horizon.span() * i / steps;
        if (duck_value(p, t) <= 0.0)
            throw SchemaError("duck params: load is not positive everywhere");
    }
}

}  // namespace

Trajectory duck_curve(const DuckParams& p, const Mesh& mesh) {
    if (std::abs(mesh.horizon().span() - 24.0) > 1e-9)
        throw DomainError("duck_curve: mesh must span a 24 h horizon");
    validate_duck(p, mesh.horizon());
    std::vector<double> v(mesh.node_count()), d(mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        v[i] = duck_value(p, mesh.node(i));
        d[i] = duck_slope(p, mesh.node(i));
    }
    return Trajectory::from_samples_and_slopes(mesh, v, d);
}

namespace {

Mesh trapezoid_mesh(const Horizon& horizon, std::vector<double> nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = nodes[j + 1] - nodes[j];
        w[j] += 0.5 * h;
        w[j + 1] += 0.5 * h;
    }
    return Mesh(horizon, std::move(nodes), std::move(w));
}

Trajectory realize_load(const Horizon& horizon, const LoadSpec& spec) {
    if (spec.kind == LoadSpec::Kind::Duck) {
        validate_duck(spec.duck, horizon);
        return duck_curve(spec.duck, Mesh::uniform(horizon, 288));
    }
    if (spec.times.size() != spec.values.size())
        throw SchemaError("load: times and values must have the same length");
    if (spec.times.size() < 2) throw SchemaError("load: need at least 2 samples");
    for (std::size_t i = 0; i + 1 < spec.times.size(); ++i)
        if (!(spec.times[i + 1] > spec.times[i]))
            throw SchemaError("load: times must be strictly increasing");
    if (spec.times.front() != horizon.t1 || spec.times.back() != horizon.t2)
        throw SchemaError("load: times must span the horizon exactly");
    return Trajectory::from_samples(trapezoid_mesh(horizon, spec.times), spec.values,
                                    Scheme::PiecewiseLinear);
}

void validate_unit(const Unit& u, const std::string& where) {
    if (u.id.empty()) throw SchemaError(where + ".id must be nonempty");
    if (u.id == "slack") throw SchemaError(where + ".id 'slack' is reserved");
    for (char ch : u.id)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            throw SchemaError(where + ".id has characters outside [A-Za-z0-9_-]");
    if (u.p_min > u.p_max) throw SchemaError(where + ": p_min > p_max");
    if (u.r_min > u.r_max) throw SchemaError(where + ": r_min > r_max");
    if (!(u.r_min <= 0.0 && 0.0 <= u.r_max))
        throw SchemaError(where + ": ramp bounds must satisfy r_min <= 0 <= r_max");
    if (u.z_max) {
        if (*u.z_max < 0.0) throw SchemaError(where + ".z_max must be nonnegative");
        if (u.p_min < 0.0)
            throw SchemaError(where + ": z_max requires p_min >= 0");
    }
    const CostFunction& c = u.cost;
    if (c.a2 < 0.0 || c.b2 < 0.0 || c.e2 < 0.0 || c.b_abs < 0.0)
        throw SchemaError(where + ".cost: a2, b2, e2, b_abs must be nonnegative");
}

}  // namespace

Scenario make_scenario(Horizon horizon, LoadSpec load, std::vector<Unit> units,
                       SlackPolicy slack) {
    if (units.empty()) throw SchemaError("units: need at least one unit");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < units.size(); ++k) {
        const std::string where = "units[" + std::to_string(k) + "]";
        validate_unit(units[k], where);
        if (!ids.insert(units[k].id).second)
            throw SchemaError(where + ".id duplicates '" + units[k].id + "'");
    }
    if (slack.price <= 0.0) throw SchemaError("slack.price must be positive");
    Scenario s{horizon, load, realize_load(horizon, load), std::move(units), slack};
    return s;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known) throw SchemaError(where + ": unknown key '" + item.key() + "'");
    }
}

const json& need(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing key '" + key + "'");
    return *it;
}

double need_number(const json& obj, const std::string& where, const char* key) {
    const json& v = need(obj, where, key);
    if (!v.is_number()) throw SchemaError(where + "." + key + " must be a number");
    return v.get<double>();
}

double opt_number(const json& obj, const std::string& where, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw SchemaError(where + "." + key + " must be a number");
    return it->get<double>();
}

std::vector<double> need_number_array(const json& obj, const std::string& where,
                                      const char* key) {
    const json& v = need(obj, where, key);
    if (!v.is_array()) throw SchemaError(where + "." + key + " must be an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number()) throw SchemaError(where + "." + key + " must contain numbers only");
        out.push_back(e.get<double>());
    }
    return out;
}

CostFunction parse_cost(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be an object");
    reject_unknown_keys(obj, where, {"a0", "a1", "a2", "b1", "b2", "b_abs", "e1", "e2"});
    CostFunction c;
    c.a0 = opt_number(obj, where, "a0", 0.0);
    c.a1 = opt_number(obj, where, "a1", 0.0);
    c.a2 = opt_number(obj, where, "a2", 0.0);
    c.b1 = opt_number(obj, where, "b1", 0.0);
    c.b2 = opt_number(obj, where, "b2", 0.0);
    c.b_abs = opt_number(obj, where, "b_abs", 0.0);
    c.e1 = opt_number(obj, where, "e1", 0.0);
    c.e2 = opt_number(obj, where, "e2", 0.0);
    return c;
}

DuckParams parse_duck(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be an object");
    reject_unknown_keys(obj, where,
                        {"base", "morning_peak", "morning_center", "morning_width",
                         "evening_peak", "evening_center", "evening_width", "solar_depth",
                         "solar_center", "solar_width"});
    DuckParams d;
    d.base = opt_number(obj, where, "base", d.base);
    d.morning_peak = opt_number(obj, where, "morning_peak", d.morning_peak);
    d.morning_center = opt_number(obj, where, "morning_center", d.morning_center);
    d.morning_width = opt_number(obj, where, "morning_width", d.morning_width);
    d.evening_peak = opt_number(obj, where, "evening_peak", d.evening_peak);
    d.evening_center = opt_number(obj, where, "evening_center", d.evening_center);
    d.evening_width = opt_number(obj, where, "evening_width", d.evening_width);
    d.solar_depth = opt_number(obj, where, "solar_depth", d.solar_depth);
    d.solar_center = opt_number(obj, where, "solar_center", d.solar_center);
    d.solar_width = opt_number(obj, where, "solar_width", d.solar_width);
    return d;
}

}  // namespace

Scenario load_scenario(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!root.is_object()) throw SchemaError("scenario: top level must be an object");
    reject_unknown_keys(root, "scenario", {"horizon", "load", "units", "slack"});

    const json& jh = need(root, "scenario", "horizon");
    if (!jh.is_object()) throw SchemaError("horizon must be an object");
    reject_unknown_keys(jh, "horizon", {"t1", "t2"});
    const double t1 = need_number(jh, "horizon", "t1");
    const double t2 = need_number(jh, "horizon", "t2");
    if (!(t2 > t1)) throw SchemaError("horizon: t2 must be greater than t1");
    Horizon horizon(t1, t2);

    const json& jl = need(root, "scenario", "load");
    if (!jl.is_object()) throw SchemaError("load must be an object");
    const json& jkind = need(jl, "load", "kind");
    if (!jkind.is_string()) throw SchemaError("load.kind must be a string");
    LoadSpec spec;
    const std::string kind = jkind.get<std::string>();
    if (kind == "samples") {
        reject_unknown_keys(jl, "load", {"kind", "times", "values"});
        spec.kind = LoadSpec::Kind::Samples;
        spec.times = need_number_array(jl, "load", "times");
        spec.values = need_number_array(jl, "load", "values");
    } else if (kind == "duck") {
        reject_unknown_keys(jl, "load", {"kind", "params"});
        spec.kind = LoadSpec::Kind::Duck;
        spec.duck = parse_duck(need(jl, "load", "params"), "load.params");
    } else {
        throw SchemaError("load.kind must be 'samples' or 'duck'");
    }

    const json& ju = need(root, "scenario", "units");
    if (!ju.is_array()) throw SchemaError("units must be an array");
    std::vector<Unit> units;
    for (std::size_t k = 0; k < ju.size(); ++k) {
        const std::string where = "units[" + std::to_string(k) + "]";
        const json& j = ju[k];
        if (!j.is_object()) throw SchemaError(where + " must be an object");
        reject_unknown_keys(j, where,
                            {"id", "p_min", "p_max", "r_min", "r_max", "z_max", "cost"});
        Unit u;
        const json& jid = need(j, where, "id");
        if (!jid.is_string()) throw SchemaError(where + ".id must be a string");
        u.id = jid.get<std::string>();
        u.p_min = need_number(j, where, "p_min");
        u.p_max = need_number(j, where, "p_max");
        u.r_min = need_number(j, where, "r_min");
        u.r_max = need_number(j, where, "r_max");
        if (auto it = j.find("z_max"); it != j.end() && !it->is_null()) {
            if (!it->is_number()) throw SchemaError(where + ".z_max must be a number or null");
            u.z_max = it->get<double>();
        }
        u.cost = parse_cost(need(j, where, "cost"), where + ".cost");
        units.push_back(std::move(u));
    }

    SlackPolicy slack;
    if (auto it = root.find("slack"); it != root.end()) {
        const json& js = *it;
        if (!js.is_object()) throw SchemaError("slack must be an object");
        reject_unknown_keys(js, "slack", {"enabled", "price"});
        const json& je = need(js, "slack", "enabled");
        if (!je.is_boolean()) throw SchemaError("slack.enabled must be a boolean");
        slack.enabled = je.get<bool>();
        slack.price = opt_number(js, "slack", "price", slack.price);
    }

    return make_scenario(horizon, std::move(spec), std::move(units), slack);
}

std::string serialize_scenario(const Scenario& s) {
    json root;
    root["horizon"] = {{"t1", s.horizon.t1}, {"t2", s.horizon.t2}};
    if (s.load_spec.kind == LoadSpec::Kind::Samples) {
        root["load"] = {{"kind", "samples"},
                        {"times", s.load_spec.times},
                        {"values", s.load_spec.values}};
    } else {
        const DuckParams& d = s.load_spec.duck;
        root["load"] = {{"kind", "duck"},
                        {"params",
                         {{"base", d.base},
                          {"morning_peak", d.morning_peak},
                          {"morning_center", d.morning_center},
                          {"morning_width", d.morning_width},
                          {"evening_peak", d.evening_peak},
                          {"evening_center", d.evening_center},
                          {"evening_width", d.evening_width},
                          {"solar_depth", d.solar_depth},
                          {"solar_center", d.solar_center},
                          {"solar_width", d.solar_width}}}};
    }
    root["units"] = json::array();
    for (const Unit& u : s.units) {
        json ju = {{"id", u.id},       {"p_min", u.p_min}, {"p_max", u.p_max},
                   {"r_min", u.r_min}, {"r_max", u.r_max},
                   {"z_max", u.z_max ? json(*u.z_max) : json(nullptr)},
                   {"cost",
                    {{"a0", u.cost.a0},
                     {"a1", u.cost.a1},
                     {"a2", u.cost.a2},
                     {"b1", u.cost.b1},
                     {"b2", u.cost.b2},
                     {"b_abs", u.cost.b_abs},
                     {"e1", u.cost.e1},
                     {"e2", u.cost.e2}}}};
        root["units"].push_back(std::move(ju));
    }
    root["slack"] = {{"enabled", s.slack.enabled}, {"price", s.slack.price}};
    return root.dump(2) + "\n";
}

std::pair<std::vector<double>, std::vector<double>> sample_load(const Scenario& s,
                                                                const Mesh& mesh) {
    const std::size_t n = mesh.node_count();
    std::vector<double> values(n), slopes(n);
    if (s.load_spec.kind == LoadSpec::Kind::Duck) {
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = duck_value(s.load_spec.duck, mesh.node(i));
            slopes[i] = duck_slope(s.load_spec.duck, mesh.node(i));
        }
        return {std::move(values), std::move(slopes)};
    }
    for (std::size_t i = 0; i < n; ++i) values[i] = s.load.eval(mesh.node(i));
    // Centered differences inside, quadratic-fit one-sided at the ends (the
    // first-order one-sided formula would seed an O(1) boundary artifact in
    // the C1 scheme's balance dual).
    auto fit_deriv = [&](std::size_t i0, std::size_t i1, std::size_t i2, std::size_t at) {
        const double t0 = mesh.node(i0), t1 = mesh.node(i1), t2 = mesh.node(i2);
        const double ta = mesh.node(at);
        return values[i0] * (2.0 * ta - t1 - t2) / ((t0 - t1) * (t0 - t2)) +
               values[i1] * (2.0 * ta - t0 - t2) / ((t1 - t0) * (t1 - t2)) +
               values[i2] * (2.0 * ta - t0 - t1) / ((t2 - t0) * (t2 - t1));
    };
    if (n == 2) {
        slopes[0] = slopes[1] = (values[1] - values[0]) / mesh.interval_length(0);
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i)
            slopes[i] = (values[i + 1] - values[i - 1]) / (mesh.node(i + 1) - mesh.node(i - 1));
        slopes[0] = fit_deriv(0, 1, 2, 0);
        slopes[n - 1] = fit_deriv(n - 3, n - 2, n - 1, n - 1);
    }
    return {std::move(values), std::move(slopes)};
}

}  // namespace ctd
