#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "kachanov/simulation.hpp"

namespace kachanov {

/// Errors below this are treated as exactly reproduced (discretization is
/// exact for the data); rate fits over such levels are meaningless noise.
constexpr double kExactErrorLevel = 1e-9;

struct ConvergenceLevel {
    double resolution;  ///< h for spatial studies, dt for temporal ones
    double err_u_h1;
    double err_d_linf;
};

struct ConvergenceReport {
    enum class Axis { Space, Time };
    Axis axis = Axis::Space;
    std::vector<ConvergenceLevel> levels;
    double rate_u = 0.0;
    double rate_d = 0.0;
    bool exact_u = false;  ///< all u errors at machine-zero level, fit skipped
    bool exact_d = false;
    bool reference_too_coarse = false;  ///< doubling the reference moved errors >= 10%
    double reference_shift_u = 0.0;     ///< relative change at the finest level
    double reference_shift_d = 0.0;
    std::string reference;
};

namespace detail {

inline double fit_rate(const std::vector<double>& res, const std::vector<double>& err) {
    // least-squares slope of log2(err) against log2(resolution)
    const size_t n = res.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double x = std::log2(res[k]), y = std::log2(err[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline void fit_report(ConvergenceReport& rep) {
    std::vector<double> res, eu, ed;
    bool all_u_exact = true, all_d_exact = true;
    for (const auto& l : rep.levels) {
        res.push_back(l.resolution);
        eu.push_back(l.err_u_h1);
        ed.push_back(l.err_d_linf);
        all_u_exact = all_u_exact && l.err_u_h1 <= kExactErrorLevel;
        all_d_exact = all_d_exact && l.err_d_linf <= kExactErrorLevel;
    }
    rep.exact_u = all_u_exact;
    rep.exact_d = all_d_exact;
    if (!all_u_exact) rep.rate_u = fit_rate(res, eu);
    if (!all_d_exact) rep.rate_d = fit_rate(res, ed);
}

struct FinalState {
    DisplacementField u;
    DamageField d;
    bool set = false;
};

inline FinalState run_capture_final(const Scenario& s, const Mesh& mesh) {
    FinalState fin;
    RunObserver obs = [&](int, double, const DisplacementField& u, const DamageField& d) {
        fin.u = u;
        fin.d = d;
        fin.set = true;
    };
    RunRecord rec = run(s, &mesh, obs);
    if (rec.status != RunRecord::Status::Completed)
        throw DegenerateRun(s.name + " halted at t = " + std::to_string(rec.t_halt) +
                            "; convergence levels must complete");
    return fin;
}

}  // namespace detail

/// Convergence study in space on nested refinements of the scenario's builtin
/// square mesh: levels n, 2n, ..., 2^(L-1) n, reference at 2^L n, all at the
/// given fixed time step. Errors at final time; the displacement error is
/// the H1 norm on the reference mesh of (prolonged coarse - reference), the
/// damage error the max difference over the coarse nodes (shared by nesting).
inline ConvergenceReport spatial_study(const Scenario& base, int levels, double dt_fixed,
                                       bool check_reference = false) {
    if (levels < 3) throw ConfigError("spatial study needs at least 3 levels");
    if (base.mesh.builtin_n <= 0)
        throw ConfigError("spatial study requires the builtin square mesh");
    const double steps_real = base.horizon / dt_fixed;
    const int steps = int(std::llround(steps_real));
    if (steps < 1 || std::abs(steps - steps_real) > 1e-9)
        throw ConfigError("dt must divide the scenario horizon");

    Scenario s = base;
    s.steps = steps;
    s.output.dir.clear();

    // mesh chain with refinement maps (one extra level when double-checking
    // the reference resolution)
    const int chain_len = levels + 1 + (check_reference ? 1 : 0);
    std::vector<Mesh> meshes;
    std::vector<RefineMap> maps;  // maps[k]: meshes[k] -> meshes[k+1]
    meshes.push_back(generate_unit_square(base.mesh.builtin_n));
    for (int k = 1; k < chain_len; ++k) {
        RefineMap map;
        meshes.push_back(refine_uniform(meshes[k - 1], &map));
        maps.push_back(map);
    }

    std::vector<detail::FinalState> finals;
    for (int k = 0; k < chain_len; ++k) finals.push_back(detail::run_capture_final(s, meshes[k]));

    auto level_errors = [&](int k, int ref) {
        std::vector<double> u = finals[k].u.values;
        for (int j = k; j < ref; ++j) u = prolong_vector2(maps[j], u);
        DisplacementField diff{&meshes[ref], std::move(u)};
        for (size_t i = 0; i < diff.values.size(); ++i)
            diff.values[i] -= finals[ref].u.values[i];
        double derr = 0.0;
        for (int i = 0; i < meshes[k].num_vertices(); ++i)
            derr = std::max(derr,
                            std::abs(finals[k].d.values[i] - finals[ref].d.values[i]));
        return std::pair{h1_norm(diff), derr};
    };

    ConvergenceReport rep;
    rep.axis = ConvergenceReport::Axis::Space;
    rep.reference = "nested mesh at n = " +
                    std::to_string(base.mesh.builtin_n * (1 << levels)) +
                    ", dt = " + std::to_string(dt_fixed);
    for (int k = 0; k < levels; ++k) {
        auto [eu, ed] = level_errors(k, levels);
        rep.levels.push_back({meshes[k].h, eu, ed});
    }
    detail::fit_report(rep);
    if (check_reference) {
        auto [eu, ed] = level_errors(levels - 1, levels + 1);
        const auto& base_level = rep.levels.back();
        auto shift = [](double refined, double coarse) {
            const double scale = std::max({std::abs(refined), std::abs(coarse), kExactErrorLevel});
            return std::abs(refined - coarse) / scale;
        };
        rep.reference_shift_u = shift(eu, base_level.err_u_h1);
        rep.reference_shift_d = shift(ed, base_level.err_d_linf);
        rep.reference_too_coarse =
            rep.reference_shift_u >= 0.10 || rep.reference_shift_d >= 0.10;
    }
    return rep;
}

/// Convergence study in time on a fixed mesh: one run per step size in dts
/// (a halving sequence), compared at shared time points against a reference
/// run with dt = min(dts)/16. Damage errors in the nodal max norm, the
/// displacement errors in H1 on the shared mesh.
inline ConvergenceReport temporal_study(const Scenario& base, const std::vector<double>& dts,
                                        int n_fixed) {
    if (dts.size() < 3) throw ConfigError("temporal study needs at least 3 step sizes");
    for (size_t k = 0; k + 1 < dts.size(); ++k)
        if (std::abs(dts[k + 1] - 0.5 * dts[k]) > 1e-12 * dts[k])
            throw ConfigError("step sizes must form a halving sequence");
    std::vector<int> step_counts;
    for (double dt : dts) {
        const double real = base.horizon / dt;
        const int n = int(std::llround(real));
        if (n < 1 || std::abs(n - real) > 1e-9)
            throw ConfigError("every dt must divide the scenario horizon");
        step_counts.push_back(n);
    }
    const int ref_steps = step_counts.back() * 16;

    const Mesh mesh = generate_unit_square(n_fixed);
    Scenario s = base;
    s.mesh = MeshSource::builtin(n_fixed);
    s.output.dir.clear();

    struct Trajectory {
        std::map<int, std::pair<std::vector<double>, std::vector<double>>> at;  // step -> (u, d)
    };
    auto run_level = [&](int steps, int keep_stride) {
        Scenario level = s;
        level.steps = steps;
        Trajectory traj;
        RunObserver obs = [&](int step, double, const DisplacementField& u,
                              const DamageField& d) {
            if (step % keep_stride == 0) traj.at[step] = {u.values, d.values};
        };
        RunRecord rec = run(level, &mesh, obs);
        if (rec.status != RunRecord::Status::Completed)
            throw DegenerateRun(s.name + " halted at t = " + std::to_string(rec.t_halt) +
                                "; convergence levels must complete");
        return traj;
    };

    const Trajectory ref = run_level(ref_steps, ref_steps / step_counts.back());

    ConvergenceReport rep;
    rep.axis = ConvergenceReport::Axis::Time;
    rep.reference = "same mesh, dt = " + std::to_string(base.horizon / ref_steps);
    for (size_t lvl = 0; lvl < dts.size(); ++lvl) {
        const Trajectory traj = run_level(step_counts[lvl], 1);
        const int ratio = ref_steps / step_counts[lvl];
        double eu = 0.0, ed = 0.0;
        for (const auto& [step, state] : traj.at) {
            const auto& ref_state = ref.at.at(step * ratio);
            DisplacementField diff{&mesh, state.first};
            for (size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= ref_state.first[i];
            eu = std::max(eu, h1_norm(diff));
            for (size_t i = 0; i < state.second.size(); ++i)
                ed = std::max(ed, std::abs(state.second[i] - ref_state.second[i]));
        }
        rep.levels.push_back({dts[lvl], eu, ed});
    }
    detail::fit_report(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// Local consistency of the damage integrator

/// A frozen evaluation point for the damage ODE: the gradient (and hence the
/// stress input) is held fixed while damage evolves.
struct ProbeState {
    Grad2 grad;
    double d0 = 0.0;
    double t0 = 0.0;
    double alpha = 1.0;
};

struct ProbeResult {
    std::vector<std::pair<double, double>> errors;  ///< (dt, |single - reference|)
    double slope = 0.0;                             ///< ~2 for a first-order scheme
    bool exact = false;                             ///< all errors at machine zero
};

/// Local error of one explicit Euler step against a sub-stepped reference
/// (dt/1024), over a halving list of step sizes. The fitted slope of the
/// local error is ~2; the global order is one less.
inline ProbeResult consistency_probe(const DamageProcess& p, const ProbeState& state,
                                     const std::vector<double>& dts) {
    auto rate = [&](double t, double d) {
        return std::pow(1.0 - d, -state.alpha) * eval_g(p, t, state.grad, d);
    };
    ProbeResult out;
    std::vector<double> res, err;
    for (double dt : dts) {
        const double single = state.d0 + dt * rate(state.t0, state.d0);
        const int sub = 1024;
        double d = state.d0;
        for (int k = 0; k < sub; ++k) d += (dt / sub) * rate(state.t0 + k * dt / sub, d);
        const double e = std::abs(single - d);
        out.errors.push_back({dt, e});
        if (e > 1e-14) {
            res.push_back(dt);
            err.push_back(e);
        }
    }
    if (res.size() >= 2)
        out.slope = detail::fit_rate(res, err);
    else
        out.exact = true;
    return out;
}

/// Study CSV: one row per level plus a fitted-rate footer.
inline void write_convergence_csv(const std::string& path, const ConvergenceReport& rep) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "level,h_or_dt,err_u_h1,err_d_linf\n";
    char buf[160];
    for (size_t k = 0; k < rep.levels.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, rep.levels[k].resolution,
                      rep.levels[k].err_u_h1, rep.levels[k].err_d_linf);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "# rate_u=%.6g%s rate_d=%.6g%s\n", rep.rate_u,
                  rep.exact_u ? " (exact)" : "", rep.rate_d, rep.exact_d ? " (exact)" : "");
    out << buf;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace kachanov
