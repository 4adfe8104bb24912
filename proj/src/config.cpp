#include "shyp/config.hpp"

#include <fstream>
#include <sstream>

#include "shyp/catalog.hpp"
#include "shyp/error.hpp"

namespace shyp {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

template <class T>
T get(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": field \"" + key + "\" has the wrong type");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Interval interval(const json& j, const char* key, Interval fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const auto v = get<std::vector<double>>(j, key, where);
    if (v.size() != 2) throw ConfigError(where + ": \"" + std::string(key) + "\" must be [lo, hi]");
    return {v[0], v[1]};
}

void line_column(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

ojson interval_json(const Interval& i) { return ojson::array({i.lo, i.hi}); }

}  // namespace

Generator generator_from_json(const json& j, int dimension) {
    if (j.is_number()) return Generator(Constant{j.get<double>()});
    if (!j.is_object()) throw ConfigError("generator must be an object or a number");
    const auto type = get<std::string>(j, "type", "generator");
    const std::string where = "generator \"" + type + "\"";
    if (type == "power_law") {
        PowerLaw p;
        p.coefficient = get_or(j, "coefficient", 1.0, where);
        if (j.contains("order")) {
            if (j.contains("exponent")) throw ConfigError(where + ": give either \"order\" or \"exponent\"");
            p.exponent = get<double>(j, "order", where) / dimension;
        } else {
            p.exponent = get<double>(j, "exponent", where);
        }
        return Generator(p);
    }
    if (type == "exp_law")
        return Generator(ExpLaw{get_or(j, "coefficient", 1.0, where), get<double>(j, "rate", where)});
    if (type == "log_law")
        return Generator(LogLaw{get_or(j, "coefficient", 1.0, where), get_or(j, "exponent", 1.0, where),
                                get_or(j, "shift", 0.0, where)});
    if (type == "loglog_law")
        return Generator(LogLogLaw{get_or(j, "coefficient", 1.0, where), get_or(j, "shift", 0.0, where)});
    if (type == "constant") return Generator(Constant{get<double>(j, "coefficient", where)});
    if (type == "explicit") {
        auto v = get<std::vector<double>>(j, "values", where);
        if (v.empty()) throw ConfigError(where + ": \"values\" is empty");
        return Generator(Explicit{std::move(v)});
    }
    if (type == "signed_alternating") {
        if (!j.contains("inner")) throw ConfigError(where + ": missing field \"inner\"");
        const Generator inner = generator_from_json(j.at("inner"), dimension);
        if (inner.alternating()) throw ConfigError(where + ": nested alternation");
        return Generator(inner.law(), true);
    }
    throw ConfigError("unknown generator type \"" + type + "\"");
}

SpectrumSpec spectrum_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("\"spectrum\" must be an object");
    SpectrumSpec s;
    s.dimension = get_or(j, "dimension", 1, "spectrum");
    if (s.dimension < 1) throw ConfigError("spectrum: dimension must be positive");
    s.k_max = get_or<std::int64_t>(j, "k_max", s.k_max, "spectrum");
    if (s.k_max < 1) throw ConfigError("spectrum: k_max must be positive");
    for (auto [key, slot] : {std::pair{"kappa", &s.kappa}, {"tau", &s.tau}, {"rho", &s.rho}, {"nu", &s.nu}})
        if (j.contains(key)) *slot = generator_from_json(j.at(key), s.dimension);
    return s;
}

ojson to_json(const Generator& g) {
    ojson j = std::visit(
        [](const auto& law) -> ojson {
            using L = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<L, PowerLaw>)
                return {{"type", "power_law"}, {"coefficient", law.coefficient}, {"exponent", law.exponent}};
            else if constexpr (std::is_same_v<L, ExpLaw>)
                return {{"type", "exp_law"}, {"coefficient", law.coefficient}, {"rate", law.rate}};
            else if constexpr (std::is_same_v<L, LogLaw>)
                return {{"type", "log_law"},
                        {"coefficient", law.coefficient},
                        {"exponent", law.exponent},
                        {"shift", law.shift}};
            else if constexpr (std::is_same_v<L, LogLogLaw>)
                return {{"type", "loglog_law"}, {"coefficient", law.coefficient}, {"shift", law.shift}};
            else if constexpr (std::is_same_v<L, Constant>)
                return {{"type", "constant"}, {"coefficient", law.value}};
            else
                return {{"type", "explicit"}, {"values", law.values}};
        },
        g.law());
    if (g.alternating()) return {{"type", "signed_alternating"}, {"inner", j}};
    return j;
}

ojson to_json(const SpectrumSpec& s) {
    return {{"dimension", s.dimension}, {"k_max", s.k_max}, {"kappa", to_json(s.kappa)},
            {"tau", to_json(s.tau)},    {"rho", to_json(s.rho)}, {"nu", to_json(s.nu)}};
}

ojson to_json(const ModelParams& p) {
    return {{"theta1", p.theta1},
            {"theta2", p.theta2},
            {"theta1_box", interval_json(p.theta1_box)},
            {"theta2_box", interval_json(p.theta2_box)},
            {"T", p.T}};
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 0, col = 0;
        line_column(text, e.byte == 0 ? 0 : e.byte - 1, line, col);
        std::string msg = e.what();
        if (const auto cut = msg.rfind(": "); cut != std::string::npos) msg = msg.substr(cut + 2);
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                              msg,
                          line, col);
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object", 1, 1);
    for (const auto& [key, _] : doc.items())
        if (key != "spectrum" && key != "params" && key != "grid" && key != "experiment" && key != "check" &&
            key != "output" && key != "name")
            throw ConfigError("unknown top-level key \"" + key + "\"");
    if (!doc.contains("spectrum")) throw ConfigError("missing \"spectrum\" block");

    RunConfig rc;
    ExperimentConfig& ex = rc.experiment;
    const json& sj = doc.at("spectrum");
    if (sj.is_object() && sj.contains("catalog")) {
        rc.catalog_name = get<std::string>(sj, "catalog", "spectrum");
        const int d = get_or(sj, "dimension", 1, "spectrum");
        try {
            const catalog::Entry e = catalog::lookup(rc.catalog_name, d);
            ex.spectrum = e.spectrum;
            ex.params = e.params;
            rc.equation = e.equation;
        } catch (const std::out_of_range& e) {
            throw ConfigError(e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("spectrum: ") + e.what());
        }
        ex.spectrum.k_max = get_or<std::int64_t>(sj, "k_max", ex.spectrum.k_max, "spectrum");
    } else {
        ex.spectrum = spectrum_from_json(sj);
    }
    ex.name = get_or<std::string>(doc, "name", rc.catalog_name, "config");

    if (doc.contains("params")) {
        const json& pj = doc.at("params");
        ex.params.theta1 = get_or(pj, "theta1", ex.params.theta1, "params");
        ex.params.theta2 = get_or(pj, "theta2", ex.params.theta2, "params");
        ex.params.theta1_box = interval(pj, "theta1_box", ex.params.theta1_box, "params");
        ex.params.theta2_box = interval(pj, "theta2_box", ex.params.theta2_box, "params");
        ex.params.T = get_or(pj, "T", ex.params.T, "params");
    } else if (rc.catalog_name.empty()) {
        throw ConfigError("missing \"params\" block");
    }
    try {
        ex.params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }

    ex.grid.T = ex.params.T;
    if (doc.contains("grid")) ex.grid.n_steps = get_or<std::int64_t>(doc.at("grid"), "n_steps", ex.grid.n_steps, "grid");
    if (ex.grid.n_steps < 1) throw ConfigError("grid: n_steps must be positive");

    if (doc.contains("experiment")) {
        const json& ej = doc.at("experiment");
        ex.N_list = get_or<std::vector<std::int64_t>>(ej, "N_list", {}, "experiment");
        ex.replicates = get_or(ej, "replicates", ex.replicates, "experiment");
        ex.seed = get_or<std::uint64_t>(ej, "seed", ex.seed, "experiment");
        ex.use_endpoint_identities = get_or(ej, "endpoint_identities", ex.use_endpoint_identities, "experiment");
        ex.workers = get_or(ej, "workers", ex.workers, "experiment");
        ex.significance = get_or(ej, "significance", ex.significance, "experiment");
        const auto route = get_or<std::string>(ej, "route", "statistics", "experiment");
        if (route == "statistics")
            ex.route = EstimatorRoute::statistics;
        else if (route == "innovation")
            ex.route = EstimatorRoute::innovation;
        else
            throw ConfigError("experiment: route must be \"statistics\" or \"innovation\"");
        if (!(ex.significance > 0 && ex.significance < 1)) throw ConfigError("experiment: significance must be in (0, 1)");
    }

    if (doc.contains("check")) {
        const json& cj = doc.at("check");
        rc.check.range.first = get_or<std::int64_t>(cj, "k_first", rc.check.range.first, "check");
        rc.check.range.last = get_or<std::int64_t>(cj, "k_last", rc.check.range.last, "check");
        rc.check.theta_grid = get_or(cj, "theta_grid", rc.check.theta_grid, "check");
        if (cj.contains("C_star")) rc.check.fixed.C_star = get<double>(cj, "C_star", "check");
        if (cj.contains("C")) rc.check.fixed.C = get<double>(cj, "C", "check");
        if (cj.contains("J")) rc.check.fixed.J = get<std::int64_t>(cj, "J", "check");
        if (rc.check.range.first < 1 || rc.check.range.last < rc.check.range.first)
            throw ConfigError("check: need 1 <= k_first <= k_last");
        if (rc.check.theta_grid < 1) throw ConfigError("check: theta_grid must be positive");
    }
    rc.check.range.last = std::min(rc.check.range.last, ex.spectrum.max_index());

    if (doc.contains("output")) ex.out_dir = get_or<std::string>(doc.at("output"), "dir", "", "output");

    ojson& e = rc.echo;
    e["name"] = ex.name;
    if (!rc.catalog_name.empty()) e["catalog"] = rc.catalog_name;
    e["spectrum"] = to_json(ex.spectrum);
    e["params"] = to_json(ex.params);
    e["grid"] = {{"n_steps", ex.grid.n_steps}};
    e["experiment"] = {{"N_list", ex.N_list},
                       {"replicates", ex.replicates},
                       {"seed", ex.seed},
                       {"route", to_string(ex.route)},
                       {"endpoint_identities", ex.use_endpoint_identities},
                       {"significance", ex.significance}};
    e["check"] = {{"k_first", rc.check.range.first}, {"k_last", rc.check.range.last}, {"theta_grid", rc.check.theta_grid}};
    e["output"] = {{"dir", ex.out_dir}};
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace shyp
