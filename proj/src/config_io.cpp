#include "bubbledate/config_io.hpp"

#include <fstream>

namespace bubbledate {

using nlohmann::json;

namespace {

void check_version(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schema_version")) throw ConfigError("config is missing schema_version");
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion) {
        throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j[key].is_null()) return fallback;
    try {
        return j[key].get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("bad value for key '") + key + "'");
    }
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    return get_or<T>(j, key, T{});
}

json profile_to_json(const VolatilityProfile& p) {
    if (const auto* c = std::get_if<ConstantVolatility>(&p.kind())) return {{"kind", "constant"}, {"sigma", c->sigma}};
    const auto& s = std::get<SingleShiftVolatility>(p.kind());
    return {{"kind", "single_shift"}, {"sigma0", s.sigma0}, {"sigma1", s.sigma1}, {"tau_sigma", s.tau_sigma}};
}

VolatilityProfile profile_from_json(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    try {
        if (kind == "constant") return VolatilityProfile::constant(require<double>(j, "sigma"));
        if (kind == "single_shift") {
            return VolatilityProfile::single_shift(require<double>(j, "sigma0"), require<double>(j, "sigma1"),
                                                   get_or<double>(j, "tau_sigma", 0.5));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown volatility profile kind '" + kind + "'");
}

}  // namespace

json to_json(const DgpConfig& c) {
    json j = {{"tau_e", c.tau_e}, {"tau_c", c.tau_c}, {"tau_r", c.tau_r}, {"phi_a", c.phi_a},
              {"phi_b", c.phi_b}, {"c0", c.c0},       {"c1", c.c1},       {"eta0", c.eta0},
              {"eta1", c.eta1},   {"y0", c.y0},       {"T", c.T}};
    if (c.drift0_override) j["drift0"] = *c.drift0_override;
    if (c.drift1_override) j["drift1"] = *c.drift1_override;
    return j;
}

DgpConfig dgp_from_json(const json& j, const DgpConfig& d) {
    if (!j.is_object()) throw ConfigError("'dgp' must be an object");
    DgpConfig c = d;
    c.tau_e = get_or(j, "tau_e", d.tau_e);
    c.tau_c = get_or(j, "tau_c", d.tau_c);
    c.tau_r = get_or(j, "tau_r", d.tau_r);
    c.phi_a = get_or(j, "phi_a", d.phi_a);
    c.phi_b = get_or(j, "phi_b", d.phi_b);
    c.c0 = get_or(j, "c0", d.c0);
    c.c1 = get_or(j, "c1", d.c1);
    c.eta0 = get_or(j, "eta0", d.eta0);
    c.eta1 = get_or(j, "eta1", d.eta1);
    c.y0 = get_or(j, "y0", d.y0);
    c.T = get_or<std::size_t>(j, "T", d.T);
    if (j.contains("drift0")) c.drift0_override = get_or<double>(j, "drift0", 0.0);
    if (j.contains("drift1")) c.drift1_override = get_or<double>(j, "drift1", 0.0);
    return c;
}

json to_json(const ErrorSpec& e) {
    if (const auto* iid = std::get_if<IidGaussianErrors>(&e.kind)) return {{"kind", "iid"}, {"sigma", iid->sigma}};
    if (const auto* vol = std::get_if<VolatilityScaledErrors>(&e.kind)) {
        return {{"kind", "volatility"}, {"profile", profile_to_json(vol->profile)}};
    }
    const auto& lp = std::get<LinearProcessErrors>(e.kind);
    std::vector<double> psi(lp.coeffs.psi().begin(), lp.coeffs.psi().end());
    return {{"kind", "linear"}, {"psi", psi}, {"innovation_sigma", lp.innovation_sigma}, {"burn_in", lp.burn_in}};
}

ErrorSpec errors_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("'errors' must be an object");
    const auto kind = require<std::string>(j, "kind");
    ErrorSpec spec;
    if (kind == "iid") {
        spec.kind = IidGaussianErrors{get_or(j, "sigma", 1.0)};
    } else if (kind == "volatility") {
        if (!j.contains("profile")) throw ConfigError("missing key 'profile'");
        spec.kind = VolatilityScaledErrors{profile_from_json(j["profile"])};
    } else if (kind == "linear") {
        try {
            LinearProcessErrors lp{LinearProcessCoeffs(require<std::vector<double>>(j, "psi")),
                                   get_or(j, "innovation_sigma", 1.0), get_or<std::size_t>(j, "burn_in", 50)};
            spec.kind = std::move(lp);
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else {
        throw ConfigError("unknown error kind '" + kind + "'");
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

json to_json(const ExperimentConfig& c) {
    json pairs = json::array();
    for (const auto& p : c.phi_pairs) pairs.push_back({p.phi_a, p.phi_b});
    json targets = json::array();
    for (auto t : c.targets) targets.push_back(to_string(t));
    return {{"schema_version", kSchemaVersion},
            {"name", c.name},
            {"dgp", to_json(c.dgp)},
            {"errors", to_json(c.errors)},
            {"T_grid", c.T_grid},
            {"phi_pairs", pairs},
            {"trimming", c.trimming.rho},
            {"reps", c.reps},
            {"base_seed", c.base_seed},
            {"targets", targets},
            {"bic", c.bic}};
}

ExperimentConfig experiment_from_json(const json& j) {
    check_version(j);
    ExperimentConfig c;
    if (j.contains("preset")) c = preset(preset_from_string(require<std::string>(j, "preset")));
    c.name = get_or(j, "name", c.name);
    if (j.contains("dgp")) c.dgp = dgp_from_json(j["dgp"], c.dgp);
    if (j.contains("errors")) c.errors = errors_from_json(j["errors"]);
    c.T_grid = get_or(j, "T_grid", c.T_grid);

    if (j.contains("phi_pairs")) {
        c.phi_pairs.clear();
        for (const auto& p : j["phi_pairs"]) {
            if (!p.is_array() || p.size() != 2) throw ConfigError("phi_pairs entries must be [phi_a, phi_b]");
            c.phi_pairs.push_back({p[0].get<double>(), p[1].get<double>()});
        }
    } else if (j.contains("phi_a_grid") || j.contains("phi_b_grid")) {
        // Full product of the two grids.
        const auto as = require<std::vector<double>>(j, "phi_a_grid");
        const auto bs = require<std::vector<double>>(j, "phi_b_grid");
        c.phi_pairs.clear();
        for (double a : as)
            for (double b : bs) c.phi_pairs.push_back({a, b});
    }
    try {
        c.trimming = TrimmingPolicy::of(get_or(j, "trimming", c.trimming.rho));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.reps = get_or(j, "reps", c.reps);
    c.base_seed = get_or(j, "base_seed", c.base_seed);
    if (j.contains("targets")) {
        c.targets.clear();
        for (const auto& t : j["targets"]) {
            try {
                c.targets.push_back(target_from_string(t.get<std::string>()));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
    }
    c.bic = get_or(j, "bic", c.bic);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

json to_json(const SimulationConfig& c) {
    json j = {{"schema_version", kSchemaVersion}, {"dgp", to_json(c.dgp)}};
    j["errors"] = c.errors ? to_json(*c.errors) : json{{"kind", "none"}};
    return j;
}

SimulationConfig simulation_from_json(const json& j) {
    check_version(j);
    if (!j.contains("dgp")) throw ConfigError("missing key 'dgp'");
    SimulationConfig c;
    c.dgp = dgp_from_json(j["dgp"]);
    if (j.contains("errors") && get_or<std::string>(j["errors"], "kind", "") != "none") {
        c.errors = errors_from_json(j["errors"]);
    }
    try {
        c.dgp.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

}  // namespace bubbledate
