// Command-line driver: run catalog or custom scenarios, run convergence
// studies, inspect meshes.
//
// Exit codes:
//   0 success              3 run halted on substantial damage
//   1 error                4 convergence level degenerated
//   2 usage / unknown name 5 mesh invariant violations found

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kachanov/config.hpp"
#include "kachanov/gmsh_io.hpp"
#include "kachanov/mesh.hpp"
#include "kachanov/simulation.hpp"
#include "kachanov/verification.hpp"

namespace {

using namespace kachanov;

std::string default_out_dir() {
    const char* env = std::getenv("KACHANOV_OUT_DIR");
    return env ? env : "out";
}

void list_catalog(std::ostream& os) {
    os << "available scenarios:\n";
    for (const auto& s : catalog()) os << "  " << s.name << "\n";
}

Scenario load_scenario_or_config(const std::string& scenario, const std::string& config_path) {
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_config(buf.str());
    }
    auto found = find_scenario(scenario);
    if (!found) throw std::out_of_range(scenario);
    return *found;
}

int cmd_run(const std::string& scenario_name, const std::string& config_path, int mesh_n,
            int steps, const std::string& out_dir, double snapshot_interval) {
    Scenario s;
    try {
        s = load_scenario_or_config(scenario_name, config_path);
    } catch (const std::out_of_range& e) {
        std::cerr << "unknown scenario '" << e.what() << "'\n";
        list_catalog(std::cerr);
        return 2;
    }
    if (mesh_n > 0) s.mesh = MeshSource::builtin(mesh_n);
    if (steps > 0) s.steps = steps;
    if (!out_dir.empty()) s.output.dir = out_dir;
    if (s.output.dir.empty()) s.output.dir = default_out_dir();
    if (snapshot_interval > 0) s.output.snapshot_interval = snapshot_interval;

    const RunRecord rec = run(s);
    const auto& last = rec.steps.back();
    if (rec.status == RunRecord::Status::HaltedSubstantialDamage) {
        std::printf("%s halted on substantial damage at t = %.6g (step %d)\n", s.name.c_str(),
                    rec.t_halt, last.step);
        std::printf("outputs in %s\n", s.output.dir.c_str());
        return 3;
    }
    std::printf("%s completed: %zu steps, final |u|_H1 = %.6g, max damage = %.6g\n",
                s.name.c_str(), rec.steps.size(), last.h1_u, last.linf_d);
    std::printf("outputs in %s\n", s.output.dir.c_str());
    return 0;
}

void print_report(const ConvergenceReport& rep) {
    std::printf("%-8s %-14s %-14s\n", rep.axis == ConvergenceReport::Axis::Space ? "h" : "dt",
                "err_u_h1", "err_d_linf");
    for (const auto& l : rep.levels)
        std::printf("%-8.5g %-14.6e %-14.6e\n", l.resolution, l.err_u_h1, l.err_d_linf);
    if (rep.exact_u)
        std::printf("u:  exact (all errors <= %.1e, rate fit skipped)\n", kExactErrorLevel);
    else
        std::printf("u:  fitted rate %.3f\n", rep.rate_u);
    if (rep.exact_d)
        std::printf("d:  exact (all errors <= %.1e, rate fit skipped)\n", kExactErrorLevel);
    else
        std::printf("d:  fitted rate %.3f\n", rep.rate_d);
    std::printf("reference: %s\n", rep.reference.c_str());
}

int cmd_convergence(const std::string& axis, int levels, const std::string& scenario_name,
                    const std::string& config_path, int mesh_n, double dt, double horizon,
                    const std::string& csv_path) {
    if (levels < 3) {
        std::cerr << "--levels must be at least 3\n";
        return 2;
    }
    Scenario s;
    try {
        s = load_scenario_or_config(scenario_name, config_path);
    } catch (const std::out_of_range& e) {
        std::cerr << "unknown scenario '" << e.what() << "'\n";
        list_catalog(std::cerr);
        return 2;
    }
    if (horizon > 0) s.horizon = horizon;
    s.output.dir.clear();

    ConvergenceReport rep;
    try {
        if (axis == "space") {
            if (mesh_n > 0) s.mesh = MeshSource::builtin(mesh_n);
            rep = spatial_study(s, levels, dt);
        } else {
            std::vector<double> dts;
            for (int k = 0; k < levels; ++k) dts.push_back(dt / (1 << k));
            rep = temporal_study(s, dts, mesh_n > 0 ? mesh_n : 16);
        }
    } catch (const DegenerateRun& e) {
        std::cerr << e.what() << "\n";
        return 4;
    }
    print_report(rep);
    if (!csv_path.empty()) write_convergence_csv(csv_path, rep);
    // gate the axis's primary error: displacements in space, damage in time
    const bool ok = (axis == "space") ? (rep.exact_u || rep.rate_u >= 0.85)
                                      : (rep.exact_d || rep.rate_d >= 0.85);
    return ok ? 0 : 1;
}

int cmd_mesh_info(const std::string& file, int builtin_n, const TagAliases& aliases) {
    Mesh m;
    std::vector<Violation> violations;
    if (builtin_n > 0) {
        m = generate_unit_square(builtin_n);
    } else {
        std::ifstream in(file);
        if (!in) {
            std::cerr << "cannot open " << file << "\n";
            return 1;
        }
        try {
            m = read_gmsh(in, aliases);
        } catch (const InvalidTopology& e) {
            violations = e.violations;
            // fall through; counts are unavailable, report the violations
            std::printf("%s\n", e.what());
            for (const auto& v : violations)
                std::printf("  %s at index %ld %s\n", to_string(v.kind), v.index,
                            v.detail.c_str());
            return 5;
        }
    }
    violations = validate(m);
    std::map<BoundaryTag, int> per_tag;
    for (const auto& be : m.boundary_edges) ++per_tag[be.tag];
    std::printf("%d vertices, %d triangles, %zu boundary edges, h = %.6g\n", m.num_vertices(),
                m.num_triangles(), m.boundary_edges.size(), m.h);
    for (const auto& [tag, count] : per_tag)
        std::printf("  %s: %d edges\n", to_string(tag), count);
    if (violations.empty()) {
        std::printf("mesh is valid\n");
        return 0;
    }
    for (const auto& v : violations)
        std::printf("  %s at index %ld %s\n", to_string(v.kind), v.index, v.detail.c_str());
    return 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D quasi-static elasticity with Kachanov-type damage evolution"};
    app.require_subcommand(1);

    std::string scenario, config_path, out_dir, csv_path, axis = "space", mesh_file;
    int mesh_n = 0, steps = 0, levels = 4, builtin_n = 0;
    double snapshot_interval = 0.0, dt = 0.0, horizon = 0.0;
    TagAliases aliases;

    auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSV + VTK outputs");
    auto* run_scenario = run_cmd->add_option("--scenario", scenario, "catalog scenario name");
    auto* run_config = run_cmd->add_option("--config", config_path, "scenario config JSON");
    run_scenario->excludes(run_config);
    run_cmd->add_option("--mesh-n", mesh_n, "override: builtin square resolution");
    run_cmd->add_option("--steps", steps, "override: number of time steps");
    run_cmd->add_option("--out", out_dir, "output directory (default $KACHANOV_OUT_DIR or ./out)");
    run_cmd->add_option("--snapshot-interval", snapshot_interval,
                        "override: VTK snapshot interval in seconds");

    auto* conv_cmd = app.add_subcommand("convergence", "run a convergence study");
    conv_cmd->add_option("--axis", axis, "space or time")
        ->check(CLI::IsMember({"space", "time"}));
    conv_cmd->add_option("--levels", levels, "number of study levels (>= 3)");
    auto* conv_scenario = conv_cmd->add_option("--scenario", scenario, "catalog scenario name");
    auto* conv_config = conv_cmd->add_option("--config", config_path, "scenario config JSON");
    conv_scenario->excludes(conv_config);
    conv_cmd->add_option("--mesh-n", mesh_n,
                         "space: coarsest resolution (default scenario mesh); time: fixed mesh");
    conv_cmd->add_option("--dt", dt, "space: fixed dt (default 0.01); time: coarsest dt (0.2)");
    conv_cmd->add_option("--horizon", horizon, "override the scenario time horizon");
    conv_cmd->add_option("--csv", csv_path, "also write the study table to this CSV file");

    auto* mesh_cmd = app.add_subcommand("mesh-info", "validate a mesh and print its counts");
    auto* mesh_file_opt = mesh_cmd->add_option("--file", mesh_file, "MSH 2.2 file");
    auto* mesh_builtin = mesh_cmd->add_option("--builtin", builtin_n, "builtin square resolution");
    mesh_file_opt->excludes(mesh_builtin);
    mesh_cmd->add_option("--tag-gamma0", aliases.gamma0, "physical tag alias for Gamma0");
    mesh_cmd->add_option("--tag-gamma1", aliases.gamma1, "physical tag alias for Gamma1");
    mesh_cmd->add_option("--tag-gamma2", aliases.gamma2, "physical tag alias for Gamma2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run_cmd->parsed()) {
            if (scenario.empty() && config_path.empty()) {
                std::cerr << "run needs --scenario or --config\n";
                return 2;
            }
            return cmd_run(scenario, config_path, mesh_n, steps, out_dir, snapshot_interval);
        }
        if (conv_cmd->parsed()) {
            if (scenario.empty() && config_path.empty()) {
                std::cerr << "convergence needs --scenario or --config\n";
                return 2;
            }
            if (dt <= 0) dt = (axis == "space") ? 0.01 : 0.2;
            if (axis == "space" && mesh_n <= 0) mesh_n = 4;
            return cmd_convergence(axis, levels, scenario, config_path, mesh_n, dt, horizon,
                                   csv_path);
        }
        if (mesh_cmd->parsed()) {
            if (mesh_file.empty() && builtin_n <= 0) {
                std::cerr << "mesh-info needs --file or --builtin\n";
                return 2;
            }
            if (!aliases.injective()) {
                std::cerr << "tag aliases must be distinct\n";
                return 2;
            }
            return cmd_mesh_info(mesh_file, builtin_n, aliases);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
