#pragma once

#include <cmath>
#include <numbers>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kachanov/damage.hpp"
#include "kachanov/fem.hpp"
#include "kachanov/gmsh_io.hpp"
#include "kachanov/linalg.hpp"
#include "kachanov/mesh.hpp"

namespace kachanov {

// ---------------------------------------------------------------------------
// Scenario description

/// Closed-form boundary data. The tau variants are tractions, the u variants
/// prescribed displacements; LinearInSpace is a time-independent linear field
/// used by exactness checks.
enum class BoundaryDataKind { Tau0, Tau1, Tau2, U0, U1, U2, LinearInSpace };

struct BoundaryData {
    BoundaryDataKind kind = BoundaryDataKind::Tau0;
    bool negate = false;

    Vec2 eval(double t, const Vec2& x) const {
        Vec2 v{0.0, 0.0};
        switch (kind) {
            case BoundaryDataKind::Tau0:
            case BoundaryDataKind::U0: break;
            case BoundaryDataKind::Tau1:
            case BoundaryDataKind::U1: v = {0.0, 0.5 * t}; break;
            case BoundaryDataKind::Tau2: v = {0.0, 5.0 * std::sin(std::numbers::pi * t / 5.0)}; break;
            case BoundaryDataKind::U2: v = {0.0, 0.5 * std::sin(std::numbers::pi * t / 5.0)}; break;
            case BoundaryDataKind::LinearInSpace:
                v = {0.02 * x.x + 0.03 * x.y, 0.05 * x.x - 0.01 * x.y};
                break;
        }
        return negate ? Vec2{-v.x, -v.y} : v;
    }
};

inline BoundaryData operator-(BoundaryData d) {
    d.negate = !d.negate;
    return d;
}

struct BcSpec {
    enum class Type { Dirichlet, Neumann, Robin };
    Type type = Type::Neumann;
    BoundaryData u;          ///< Dirichlet / Robin displacement data
    BoundaryData tau;        ///< Neumann / Robin traction data
    double beta = 0.0;       ///< Robin modulus

    static BcSpec dirichlet(BoundaryData u) { return {Type::Dirichlet, u, {}, 0.0}; }
    static BcSpec neumann(BoundaryData tau) { return {Type::Neumann, {}, tau, 0.0}; }
    static BcSpec robin(double beta, BoundaryData u, BoundaryData tau) {
        return {Type::Robin, u, tau, beta};
    }
};

struct MeshSource {
    int builtin_n = 0;     ///< > 0: unit square with n cells per side
    std::string msh_path;  ///< otherwise: MSH 2.2 file

    static MeshSource builtin(int n) { return {n, {}}; }
    static MeshSource file(std::string path) { return {0, std::move(path)}; }
};

struct SolverSettings {
    double tol = 1e-10;
    int max_iter_factor = 10;  ///< max_iter = factor * dimension
};

struct OutputOptions {
    std::string dir;                  ///< empty: no files written
    double snapshot_interval = 0.1;   ///< <= 0: no VTK snapshots
};

/// A complete run description: domain, boundary conditions per tag, damage
/// model, material constants, and time grid.
struct Scenario {
    std::string name;
    MeshSource mesh = MeshSource::builtin(16);
    std::map<BoundaryTag, BcSpec> bc;
    GKind g = GKind::G0;
    double lambda = 121.15;
    double mu = 80.77;
    double alpha = 1.0;
    double horizon = 10.0;   ///< T
    int steps = 100;         ///< N_T
    double omega_cap = 0.999;
    double load_scale = 1.0; ///< multiplies all boundary data
    StressMeasure measure = StressMeasure::Literal2d;
    SolverSettings solver;
    OutputOptions output;
    TagAliases aliases;

    ElasticConstants constants() const { return {lambda, mu}; }
};

inline void validate_scenario(const Scenario& s) {
    if (!(s.horizon > 0.0)) throw ConfigError("scenario horizon must be positive");
    if (s.steps < 1) throw ConfigError("scenario needs at least one step");
    if (!(s.lambda > 0.0) || !(s.mu > 0.0)) throw ConfigError("Lame constants must be positive");
    if (s.alpha < 1.0) throw ConfigError("alpha must be >= 1");
    if (!(s.omega_cap > 0.0) || s.omega_cap >= 1.0)
        throw ConfigError("omega_cap must lie in (0, 1)");
    if (s.mesh.builtin_n <= 0 && s.mesh.msh_path.empty())
        throw ConfigError("scenario has no mesh source");
    for (BoundaryTag tag : {BoundaryTag::Gamma0, BoundaryTag::Gamma1, BoundaryTag::Gamma2}) {
        auto it = s.bc.find(tag);
        if (it == s.bc.end())
            throw ConfigError(std::string("no boundary condition for ") + to_string(tag));
        if (it->second.type == BcSpec::Type::Robin && !(it->second.beta > 0.0))
            throw ConfigError("Robin modulus must be positive");
    }
}

// ---------------------------------------------------------------------------
// Run records and result files

struct StepRecord {
    int step = 0;
    double t = 0.0;
    double h1_u = 0.0;
    double linf_d = 0.0;
    int cg_iters = 0;
    bool degenerate = false;
};

struct RunRecord {
    enum class Status { Completed, HaltedSubstantialDamage };
    std::vector<StepRecord> steps;  ///< one row per time step (initial state excluded)
    Status status = Status::Completed;
    double t_halt = 0.0;  ///< set when halted
};

/// Legacy-VTK ASCII snapshot (unstructured grid, point data: displacement
/// vectors with z = 0 and the damage scalar). 17 significant digits
/// throughout, so files are byte-reproducible.
inline void write_vtk(const std::string& path, const Mesh& mesh, const DisplacementField& u,
                      const DamageField& d) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    char buf[128];
    out << "# vtk DataFile Version 3.0\n";
    out << "damage simulation snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_vertices() << " double\n";
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", v.x, v.y);
        out << buf;
    }
    out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
    for (const auto& tri : mesh.triangles)
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    out << "CELL_TYPES " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
    out << "POINT_DATA " << mesh.num_vertices() << "\n";
    out << "VECTORS displacement double\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g 0\n", u.values[2 * i], u.values[2 * i + 1]);
        out << buf;
    }
    out << "SCALARS damage double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g\n", d.values[i]);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path);
}

/// Norm time series: header plus one row per step, fixed formatting.
inline void write_norms_csv(const std::string& path, const RunRecord& record) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "t,h1_u,linf_d,cg_iters,degenerate\n";
    char buf[160];
    for (const auto& r : record.steps) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d\n", r.t, r.h1_u, r.linf_d,
                      r.cg_iters, r.degenerate ? 1 : 0);
        out << buf;
    }
    if (!out) throw IoError("write failed for " + path);
}

// ---------------------------------------------------------------------------
// The coupled time loop

/// Hook for callers that need the discrete trajectory (convergence studies,
/// acceptance checks). Called once for the initial state (step 0) and once
/// after every completed step.
using RunObserver =
    std::function<void(int step, double t, const DisplacementField&, const DamageField&)>;

inline Mesh load_mesh(const MeshSource& src, const TagAliases& aliases = {}) {
    if (src.builtin_n > 0) return generate_unit_square(src.builtin_n);
    std::ifstream in(src.msh_path);
    if (!in) throw IoError("cannot open mesh file " + src.msh_path);
    return read_gmsh(in, aliases);
}

namespace detail {

struct MomentumSolver {
    const Mesh& mesh;
    const Scenario& s;
    std::optional<DeflationSpace> deflation;
    std::set<BoundaryTag> neumann_tags, robin_tags, dirichlet_tags;

    MomentumSolver(const Mesh& m, const Scenario& scen) : mesh(m), s(scen) {
        for (const auto& [tag, bc] : s.bc) {
            switch (bc.type) {
                case BcSpec::Type::Dirichlet: dirichlet_tags.insert(tag); break;
                case BcSpec::Type::Neumann: neumann_tags.insert(tag); break;
                case BcSpec::Type::Robin: robin_tags.insert(tag); break;
            }
        }
        if (dirichlet_tags.empty() && robin_tags.empty()) deflation = rigid_body_modes(mesh);
    }

    TimeVectorFn scaled(const BoundaryData& data) const {
        const double scale = s.load_scale;
        return [data, scale](double t, Vec2 x) { return scale * data.eval(t, x); };
    }

    /// Assembles and solves the momentum equation at time t for the given
    /// damage state. Warm-started from the previous displacement.
    int solve(double t, const DamageField& d, DisplacementField& u) const {
        SparseSym A = assemble_elasticity(mesh, s.lambda, s.mu, d.values);
        std::map<BoundaryTag, TimeVectorFn> tractions;
        for (BoundaryTag tag : neumann_tags) tractions[tag] = scaled(s.bc.at(tag).tau);
        std::vector<double> b = assemble_load(mesh, nullptr, tractions, t);
        for (BoundaryTag tag : robin_tags) {
            const BcSpec& bc = s.bc.at(tag);
            add_robin(A, b, bc.beta, scaled(bc.u), scaled(bc.tau), {tag}, t, mesh);
        }
        std::map<int, double> constraints;
        for (const auto& be : mesh.boundary_edges) {
            if (!dirichlet_tags.count(be.tag)) continue;
            for (int v : be.v) {
                const Vec2 val = s.load_scale * s.bc.at(be.tag).u.eval(t, mesh.vertices[v]);
                constraints[2 * v] = val.x;
                constraints[2 * v + 1] = val.y;
            }
        }
        apply_dirichlet(A, b, constraints);
        CgResult r = cg_solve(A, std::move(b), s.solver.tol, s.solver.max_iter_factor * A.n,
                              deflation ? &*deflation : nullptr, &u.values);
        u.values = std::move(r.x);
        return r.iterations;
    }
};

}  // namespace detail

/// Runs the coupled quasi-static loop: per step, advance damage with the
/// explicit Euler rule using the previous step's projected gradient, then
/// reassemble and solve the momentum equation at the new time, then project
/// the displacement gradient for the next step. The initial solve at t = 0
/// (all catalog loads vanish there) provides the first gradient. Halts with
/// HaltedSubstantialDamage as soon as a node reaches the damage cap.
inline RunRecord run(const Scenario& s, const Mesh* mesh_override = nullptr,
                     const RunObserver& observer = {}) {
    validate_scenario(s);
    Mesh owned;
    const Mesh* mesh = mesh_override;
    if (!mesh) {
        owned = load_mesh(s.mesh, s.aliases);
        mesh = &owned;
    }
    const bool writing = !s.output.dir.empty();
    if (writing) std::filesystem::create_directories(s.output.dir);

    detail::MomentumSolver solver(*mesh, s);
    const SparseSym mass = assemble_mass(*mesh);
    DamageField d = DamageField::zero(*mesh, s.omega_cap);
    DisplacementField u = DisplacementField::zero(*mesh);
    DamageProcess process{s.g, s.constants(), s.measure};

    const double dt = s.horizon / s.steps;
    int iters = solver.solve(0.0, d, u);
    GradientField w = project_gradient(u, 1e-12, &mass);
    if (observer) observer(0, 0.0, u, d);

    auto snapshot_path = [&](int step) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "_%06d.vtk", step);
        return s.output.dir + "/" + (s.name.empty() ? "run" : s.name) + buf;
    };
    auto snapshot_due = [&](double t) {
        if (s.output.snapshot_interval <= 0.0) return false;
        const double k = t / s.output.snapshot_interval;
        return std::abs(k - std::llround(k)) < 1e-9;
    };
    if (writing && snapshot_due(0.0)) write_vtk(snapshot_path(0), *mesh, u, d);

    RunRecord record;
    for (int n = 1; n <= s.steps; ++n) {
        const double t_prev = (n - 1) * dt;
        const double t = n * dt;
        const StepReport report = euler_step(d, w, process, s.alpha, t_prev, dt);
        iters = solver.solve(t, d, u);
        w = project_gradient(u, 1e-12, &mass);
        record.steps.push_back({n, t, h1_norm(u), linf_norm(d), iters, report.degenerate});
        if (observer) observer(n, t, u, d);
        const bool last = report.degenerate || n == s.steps;
        if (writing && (snapshot_due(t) || last)) write_vtk(snapshot_path(n), *mesh, u, d);
        if (report.degenerate) {
            record.status = RunRecord::Status::HaltedSubstantialDamage;
            record.t_halt = t;
            break;
        }
    }
    if (writing) write_norms_csv(s.output.dir + "/norms.csv", record);
    return record;
}

// ---------------------------------------------------------------------------
// Scenario catalog

/// The eleven named test scenarios. TC00/TC01/TC02 load the square by
/// opposite tractions on top and bottom (pure Neumann); TC03 prescribes
/// displacements or Robin conditions there. S00 rows of TC01/TC02 are the
/// damage-free references.
inline std::vector<Scenario> catalog() {
    using BD = BoundaryDataKind;
    auto neumann_pull = [](BoundaryData tau) {
        std::map<BoundaryTag, BcSpec> bc;
        bc[BoundaryTag::Gamma0] = BcSpec::neumann(-tau);
        bc[BoundaryTag::Gamma1] = BcSpec::neumann({BD::Tau0});
        bc[BoundaryTag::Gamma2] = BcSpec::neumann(tau);
        return bc;
    };
    auto dirichlet_pull = [] {
        std::map<BoundaryTag, BcSpec> bc;
        bc[BoundaryTag::Gamma0] = BcSpec::dirichlet({BD::U0});
        bc[BoundaryTag::Gamma1] = BcSpec::neumann({BD::Tau0});
        bc[BoundaryTag::Gamma2] = BcSpec::dirichlet({BD::U2});
        return bc;
    };

    std::vector<Scenario> list;
    auto add = [&](const std::string& name, GKind g, std::map<BoundaryTag, BcSpec> bc,
                   MeshSource mesh = MeshSource::builtin(16)) {
        Scenario s;
        s.name = name;
        s.g = g;
        s.bc = std::move(bc);
        s.mesh = std::move(mesh);
        list.push_back(std::move(s));
    };

    add("TC00S00", GKind::G1, neumann_pull({BD::Tau2}));
    add("TC00S01", GKind::G1, neumann_pull({BD::Tau2}));
    add("TC01S00", GKind::G0, neumann_pull({BD::Tau1}));
    add("TC01S01", GKind::G1, neumann_pull({BD::Tau1}));
    add("TC02S00", GKind::G0, neumann_pull({BD::Tau2}));
    add("TC02S01", GKind::G1, neumann_pull({BD::Tau2}));
    add("TC03S00", GKind::G2, dirichlet_pull());
    add("TC03S01", GKind::G2, dirichlet_pull());
    {
        std::map<BoundaryTag, BcSpec> bc;
        bc[BoundaryTag::Gamma0] = BcSpec::robin(100.0, {BD::U0}, {BD::Tau0});
        bc[BoundaryTag::Gamma1] = BcSpec::neumann({BD::Tau0});
        bc[BoundaryTag::Gamma2] = BcSpec::robin(100.0, {BD::U2}, {BD::Tau0});
        add("TC03S02", GKind::G2, std::move(bc));
    }
    add("TC03S03", GKind::G2, dirichlet_pull(), MeshSource::file("meshes/omega1_standin.msh"));
    add("TC03S04", GKind::G2, dirichlet_pull(), MeshSource::file("meshes/omega2_standin.msh"));
    return list;
}

inline std::optional<Scenario> find_scenario(const std::string& name) {
    for (auto& s : catalog())
        if (s.name == name) return s;
    return std::nullopt;
}

}  // namespace kachanov
