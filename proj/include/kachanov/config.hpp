#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "kachanov/simulation.hpp"

namespace kachanov {

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for '" + key + "' in " + where + ": " + e.what());
    }
}

inline BoundaryData parse_boundary_data(std::string name, const std::string& where) {
    BoundaryData d;
    if (!name.empty() && name[0] == '-') {
        d.negate = true;
        name = name.substr(1);
    }
    if (name == "tau0") d.kind = BoundaryDataKind::Tau0;
    else if (name == "tau1") d.kind = BoundaryDataKind::Tau1;
    else if (name == "tau2") d.kind = BoundaryDataKind::Tau2;
    else if (name == "u0") d.kind = BoundaryDataKind::U0;
    else if (name == "u1") d.kind = BoundaryDataKind::U1;
    else if (name == "u2") d.kind = BoundaryDataKind::U2;
    else if (name == "linear") d.kind = BoundaryDataKind::LinearInSpace;
    else throw ConfigError("unknown boundary data '" + name + "' in " + where);
    return d;
}

inline BcSpec parse_bc(const json& obj, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    reject_unknown(obj, {"type", "u", "tau", "beta"}, where);
    const auto type = get_as<std::string>(obj, "type", where);
    BcSpec bc;
    if (type == "dirichlet") {
        bc = BcSpec::dirichlet(parse_boundary_data(get_as<std::string>(obj, "u", where), where));
        if (obj.contains("tau") || obj.contains("beta"))
            throw ConfigError("dirichlet takes only 'u' in " + where);
    } else if (type == "neumann") {
        bc = BcSpec::neumann(parse_boundary_data(get_as<std::string>(obj, "tau", where), where));
        if (obj.contains("u") || obj.contains("beta"))
            throw ConfigError("neumann takes only 'tau' in " + where);
    } else if (type == "robin") {
        bc = BcSpec::robin(get_as<double>(obj, "beta", where),
                           parse_boundary_data(get_as<std::string>(obj, "u", where), where),
                           parse_boundary_data(get_as<std::string>(obj, "tau", where), where));
    } else {
        throw ConfigError("unknown bc type '" + type + "' in " + where);
    }
    return bc;
}

}  // namespace detail

/// Parses a scenario config document. Either a complete scenario or
/// overrides on top of a "base_scenario" from the catalog. Unknown keys are
/// rejected everywhere.
inline Scenario parse_config(const std::string& text) {
    using detail::get_as;
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown(doc,
                           {"base_scenario", "name", "mesh", "bc", "g_model", "lambda", "mu",
                            "alpha", "horizon", "steps", "omega_cap", "load_scale", "solver",
                            "output", "tag_aliases", "stress_measure"},
                           "config");

    Scenario s;
    if (doc.contains("base_scenario")) {
        const auto base = get_as<std::string>(doc, "base_scenario", "config");
        auto found = find_scenario(base);
        if (!found) throw ConfigError("unknown base_scenario '" + base + "'");
        s = *found;
    } else {
        const std::set<std::string> required = {"name", "mesh", "bc", "g_model"};
        for (const auto& key : required)
            if (!doc.contains(key))
                throw ConfigError("config without base_scenario must set '" + key + "'");
    }

    if (doc.contains("name")) s.name = get_as<std::string>(doc, "name", "config");
    if (doc.contains("mesh")) {
        const json& mesh = doc.at("mesh");
        detail::reject_unknown(mesh, {"builtin_n", "msh"}, "mesh");
        if (mesh.contains("builtin_n") == mesh.contains("msh"))
            throw ConfigError("mesh needs exactly one of 'builtin_n' or 'msh'");
        if (mesh.contains("builtin_n"))
            s.mesh = MeshSource::builtin(get_as<int>(mesh, "builtin_n", "mesh"));
        else
            s.mesh = MeshSource::file(get_as<std::string>(mesh, "msh", "mesh"));
    }
    if (doc.contains("bc")) {
        const json& bc = doc.at("bc");
        detail::reject_unknown(bc, {"gamma0", "gamma1", "gamma2"}, "bc");
        const std::pair<const char*, BoundaryTag> tags[] = {
            {"gamma0", BoundaryTag::Gamma0},
            {"gamma1", BoundaryTag::Gamma1},
            {"gamma2", BoundaryTag::Gamma2}};
        for (const auto& [key, tag] : tags)
            if (bc.contains(key)) s.bc[tag] = detail::parse_bc(bc.at(key), std::string("bc.") + key);
    }
    if (doc.contains("g_model")) {
        const auto g = get_as<std::string>(doc, "g_model", "config");
        if (g == "g0") s.g = GKind::G0;
        else if (g == "g1") s.g = GKind::G1;
        else if (g == "g2") s.g = GKind::G2;
        else throw ConfigError("unknown g_model '" + g + "'");
    }
    if (doc.contains("lambda")) s.lambda = get_as<double>(doc, "lambda", "config");
    if (doc.contains("mu")) s.mu = get_as<double>(doc, "mu", "config");
    if (doc.contains("alpha")) s.alpha = get_as<double>(doc, "alpha", "config");
    if (doc.contains("horizon")) s.horizon = get_as<double>(doc, "horizon", "config");
    if (doc.contains("steps")) s.steps = get_as<int>(doc, "steps", "config");
    if (doc.contains("omega_cap")) s.omega_cap = get_as<double>(doc, "omega_cap", "config");
    if (doc.contains("load_scale")) s.load_scale = get_as<double>(doc, "load_scale", "config");
    if (doc.contains("solver")) {
        const json& solver = doc.at("solver");
        detail::reject_unknown(solver, {"tol", "max_iter_factor"}, "solver");
        if (solver.contains("tol")) s.solver.tol = get_as<double>(solver, "tol", "solver");
        if (solver.contains("max_iter_factor"))
            s.solver.max_iter_factor = get_as<int>(solver, "max_iter_factor", "solver");
    }
    if (doc.contains("output")) {
        const json& output = doc.at("output");
        detail::reject_unknown(output, {"dir", "snapshot_interval"}, "output");
        if (output.contains("dir")) s.output.dir = get_as<std::string>(output, "dir", "output");
        if (output.contains("snapshot_interval"))
            s.output.snapshot_interval = get_as<double>(output, "snapshot_interval", "output");
    }
    if (doc.contains("tag_aliases")) {
        const json& aliases = doc.at("tag_aliases");
        detail::reject_unknown(aliases, {"gamma0", "gamma1", "gamma2"}, "tag_aliases");
        if (aliases.contains("gamma0"))
            s.aliases.gamma0 = get_as<int>(aliases, "gamma0", "tag_aliases");
        if (aliases.contains("gamma1"))
            s.aliases.gamma1 = get_as<int>(aliases, "gamma1", "tag_aliases");
        if (aliases.contains("gamma2"))
            s.aliases.gamma2 = get_as<int>(aliases, "gamma2", "tag_aliases");
        if (!s.aliases.injective()) throw ConfigError("tag_aliases must be distinct");
    }
    if (doc.contains("stress_measure")) {
        const auto mode = get_as<std::string>(doc, "stress_measure", "config");
        if (mode == "literal2d") s.measure = StressMeasure::Literal2d;
        else if (mode == "plane_strain_augmented") s.measure = StressMeasure::PlaneStrainAugmented;
        else throw ConfigError("unknown stress_measure '" + mode + "'");
    }
    validate_scenario(s);
    return s;
}

}  // namespace kachanov
