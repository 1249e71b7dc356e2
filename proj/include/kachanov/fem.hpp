#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "kachanov/linalg.hpp"
#include "kachanov/material.hpp"
#include "kachanov/mesh.hpp"

namespace kachanov {

// P1 Lagrange spaces on a triangulation. Scalar dofs are vertex indices;
// vector dofs are interleaved (node 0 x, node 0 y, node 1 x, ...).

struct ScalarSpace {
    const Mesh* mesh = nullptr;
    int ndof() const { return mesh->num_vertices(); }
};

struct VectorSpace {
    const Mesh* mesh = nullptr;
    std::vector<char> constrained;  ///< per dof, set for Dirichlet-carrying tags

    explicit VectorSpace(const Mesh& m, const std::set<BoundaryTag>& dirichlet_tags = {})
        : mesh(&m), constrained(size_t(2) * m.num_vertices(), 0) {
        for (const auto& be : m.boundary_edges) {
            if (!dirichlet_tags.count(be.tag)) continue;
            for (int v : be.v) {
                constrained[2 * v] = 1;
                constrained[2 * v + 1] = 1;
            }
        }
    }
    int ndof() const { return 2 * mesh->num_vertices(); }
};

/// Nodal vector-valued P1 function (displacements), interleaved layout.
struct DisplacementField {
    const Mesh* mesh = nullptr;
    std::vector<double> values;

    static DisplacementField zero(const Mesh& m) {
        return {&m, std::vector<double>(size_t(2) * m.num_vertices(), 0.0)};
    }
};

/// Nodal displacement gradient (one 2x2 tensor per vertex).
struct Grad2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

/// Nodal values of the four displacement-gradient components, in the order
/// du_x/dx, du_x/dy, du_y/dx, du_y/dy.
struct GradientField {
    const Mesh* mesh = nullptr;
    std::array<std::vector<double>, 4> comp;

    Grad2 at(int node) const {
        return {comp[0][node], comp[1][node], comp[2][node], comp[3][node]};
    }
    static GradientField zero(const Mesh& m) {
        GradientField g;
        g.mesh = &m;
        for (auto& c : g.comp) c.assign(m.num_vertices(), 0.0);
        return g;
    }
};

using ScalarFn = std::function<double(Vec2)>;
using TimeVectorFn = std::function<Vec2(double, Vec2)>;  // (t, x)

namespace detail {

/// Geometry of one P1 triangle: area and the constant basis gradients.
struct P1Element {
    double area;
    std::array<Vec2, 3> grad;
};

inline P1Element p1_element(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if (!(det > 0.0))
        throw DegenerateTriangle("triangle with signed area " + std::to_string(0.5 * det));
    return {0.5 * det,
            {Vec2{(b.y - c.y) / det, (c.x - b.x) / det},
             Vec2{(c.y - a.y) / det, (a.x - c.x) / det},
             Vec2{(a.y - b.y) / det, (b.x - a.x) / det}}};
}

/// Strain of the nodal basis function (node local index i, component c);
/// constant over the element.
inline Strain2 basis_strain(const P1Element& e, int i, int c) {
    const Vec2 g = e.grad[i];
    if (c == 0) return {g.x, 0.0, 0.5 * g.y};
    return {0.0, g.y, 0.5 * g.x};
}

inline void add_entry(SparseSym& A, int i, int j, double v) {
    double* p = A.find(i, j);
    if (!p) throw IndexOutOfRange("matrix pattern is missing entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
    *p += v;
}

}  // namespace detail

/// Element stiffness of the damaged plane-strain operator,
///   integral (1 - d_h) (lambda tr(eps_u) tr(eps_v) + 2 mu eps_u : eps_v),
/// on one triangle. The linear factor (1 - d_h) against the constant strain
/// pair integrates exactly to area * (1 - mean(d)). Dof order interleaved:
/// (n0x, n0y, n1x, n1y, n2x, n2y); symmetric and positive semi-definite.
inline std::array<double, 36> element_stiffness(const Vec2& a, const Vec2& b, const Vec2& c,
                                                double lambda, double mu,
                                                const std::array<double, 3>& d_nodes) {
    const auto e = detail::p1_element(a, b, c);
    const double w = e.area * (1.0 - (d_nodes[0] + d_nodes[1] + d_nodes[2]) / 3.0);
    std::array<Strain2, 6> eps;
    for (int i = 0; i < 3; ++i)
        for (int ci = 0; ci < 2; ++ci) eps[2 * i + ci] = detail::basis_strain(e, i, ci);
    std::array<double, 36> K{};
    for (int p = 0; p < 6; ++p) {
        for (int q = p; q < 6; ++q) {
            const double trp = eps[p].xx + eps[p].yy, trq = eps[q].xx + eps[q].yy;
            const double contr = eps[p].xx * eps[q].xx + eps[p].yy * eps[q].yy +
                                 2.0 * eps[p].xy * eps[q].xy;
            const double v = w * (lambda * trp * trq + 2.0 * mu * contr);
            K[6 * p + q] = v;
            K[6 * q + p] = v;
        }
    }
    return K;
}

/// Assembles the damaged elasticity operator over the whole mesh (no boundary
/// conditions applied). lambda and mu are sampled at element centroids.
inline SparseSym assemble_elasticity(const Mesh& mesh, const ScalarFn& lambda, const ScalarFn& mu,
                                     std::span<const double> nodal_damage) {
    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 36);
    for (const auto& tri : mesh.triangles) {
        const Vec2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
        const Vec2 centroid = (1.0 / 3.0) * (a + b + c);
        const auto K = element_stiffness(a, b, c, lambda(centroid), mu(centroid),
                                         {nodal_damage[tri[0]], nodal_damage[tri[1]],
                                          nodal_damage[tri[2]]});
        int dof[6];
        for (int i = 0; i < 3; ++i) {
            dof[2 * i] = 2 * tri[i];
            dof[2 * i + 1] = 2 * tri[i] + 1;
        }
        for (int p = 0; p < 6; ++p)
            for (int q = 0; q < 6; ++q) trip.push_back({dof[p], dof[q], K[6 * p + q]});
    }
    return assemble_from_triplets(2 * mesh.num_vertices(), std::move(trip));
}

inline SparseSym assemble_elasticity(const Mesh& mesh, double lambda, double mu,
                                     std::span<const double> nodal_damage) {
    return assemble_elasticity(
        mesh, [lambda](Vec2) { return lambda; }, [mu](Vec2) { return mu; }, nodal_damage);
}

/// Load vector: volume term by the 3-point midpoint rule, boundary tractions
/// by 2-point Gauss on the tagged edges (both exact for the P1 integrands).
inline std::vector<double> assemble_load(const Mesh& mesh, const TimeVectorFn& f,
                                         const std::map<BoundaryTag, TimeVectorFn>& tractions,
                                         double t) {
    std::vector<double> b(size_t(2) * mesh.num_vertices(), 0.0);
    if (f) {
        for (const auto& tri : mesh.triangles) {
            const Vec2 p0 = mesh.vertices[tri[0]], p1 = mesh.vertices[tri[1]],
                       p2 = mesh.vertices[tri[2]];
            const double area = detail::p1_element(p0, p1, p2).area;
            const Vec2 mid[3] = {0.5 * (p0 + p1), 0.5 * (p1 + p2), 0.5 * (p2 + p0)};
            const Vec2 fv[3] = {f(t, mid[0]), f(t, mid[1]), f(t, mid[2])};
            // basis value at midpoint k is 1/2 unless the midpoint is opposite node i
            for (int i = 0; i < 3; ++i) {
                Vec2 acc{0.0, 0.0};
                for (int k = 0; k < 3; ++k)
                    if (k != (i + 1) % 3) acc = acc + 0.5 * fv[k];
                b[2 * tri[i]] += area / 3.0 * acc.x;
                b[2 * tri[i] + 1] += area / 3.0 * acc.y;
            }
        }
    }
    constexpr double gauss = 0.28867513459481287;  // 1/(2 sqrt(3))
    for (const auto& be : mesh.boundary_edges) {
        auto it = tractions.find(be.tag);
        if (it == tractions.end() || !it->second) continue;
        const Vec2 a = mesh.vertices[be.v[0]], c = mesh.vertices[be.v[1]];
        const double len = norm(c - a);
        for (double s : {0.5 - gauss, 0.5 + gauss}) {
            const Vec2 x = a + s * (c - a);
            const Vec2 tau = it->second(t, x);
            b[2 * be.v[0]] += 0.5 * len * (1.0 - s) * tau.x;
            b[2 * be.v[0] + 1] += 0.5 * len * (1.0 - s) * tau.y;
            b[2 * be.v[1]] += 0.5 * len * s * tau.x;
            b[2 * be.v[1] + 1] += 0.5 * len * s * tau.y;
        }
    }
    return b;
}

/// Symmetric elimination of Dirichlet constraints: constrained rows and
/// columns are zeroed, the diagonal set to 1, and the right-hand side
/// adjusted so unconstrained equations see the prescribed values.
inline void apply_dirichlet(SparseSym& A, std::vector<double>& b,
                            const std::map<int, double>& constraints) {
    if (constraints.empty()) return;
    std::vector<char> fixed(A.n, 0);
    for (const auto& [dof, val] : constraints) {
        if (dof < 0 || dof >= A.n) throw IndexOutOfRange("constraint dof " + std::to_string(dof));
        fixed[dof] = 1;
    }
    for (int i = 0; i < A.n; ++i) {
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const int j = A.col[k];
            if (fixed[i]) {
                A.val[k] = (i == j) ? 1.0 : 0.0;
            } else if (fixed[j]) {
                b[i] -= A.val[k] * constraints.at(j);
                A.val[k] = 0.0;
            }
        }
    }
    for (const auto& [dof, val] : constraints) b[dof] = val;
}

/// Robin boundary condition sigma(u) nu + beta_r (u - ubar) = tau on the
/// given tags: adds beta_r times the exact edge mass len/6 [2 1; 1 2] per
/// component to A, and beta_r int(ubar . phi) + int(tau . phi) to b.
inline void add_robin(SparseSym& A, std::vector<double>& b, double beta_r,
                      const TimeVectorFn& ubar, const TimeVectorFn& tau,
                      const std::set<BoundaryTag>& tags, double t, const Mesh& mesh) {
    constexpr double gauss = 0.28867513459481287;
    for (const auto& be : mesh.boundary_edges) {
        if (!tags.count(be.tag)) continue;
        const Vec2 a = mesh.vertices[be.v[0]], c = mesh.vertices[be.v[1]];
        const double len = norm(c - a);
        for (int comp = 0; comp < 2; ++comp) {
            const int da = 2 * be.v[0] + comp, dc = 2 * be.v[1] + comp;
            detail::add_entry(A, da, da, beta_r * len / 3.0);
            detail::add_entry(A, dc, dc, beta_r * len / 3.0);
            detail::add_entry(A, da, dc, beta_r * len / 6.0);
            detail::add_entry(A, dc, da, beta_r * len / 6.0);
        }
        for (double s : {0.5 - gauss, 0.5 + gauss}) {
            const Vec2 x = a + s * (c - a);
            Vec2 data{0.0, 0.0};
            if (ubar) data = data + beta_r * ubar(t, x);
            if (tau) data = data + tau(t, x);
            b[2 * be.v[0]] += 0.5 * len * (1.0 - s) * data.x;
            b[2 * be.v[0] + 1] += 0.5 * len * (1.0 - s) * data.y;
            b[2 * be.v[1]] += 0.5 * len * s * data.x;
            b[2 * be.v[1] + 1] += 0.5 * len * s * data.y;
        }
    }
}

/// Exact P1 mass matrix (area/12 [2 1 1; 1 2 1; 1 1 2] per element).
inline SparseSym assemble_mass(const Mesh& mesh) {
    std::vector<Triplet> trip;
    trip.reserve(mesh.triangles.size() * 9);
    for (const auto& tri : mesh.triangles) {
        const double area = detail::p1_element(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                               mesh.vertices[tri[2]])
                                .area;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trip.push_back({tri[i], tri[j], area / 12.0 * (i == j ? 2.0 : 1.0)});
    }
    return assemble_from_triplets(mesh.num_vertices(), std::move(trip));
}

/// L2 projection of the piecewise-constant displacement gradient onto the
/// nodal P1 space: solves M w = g componentwise with the exact mass matrix.
/// Reuses a caller-provided mass matrix when one is supplied.
inline GradientField project_gradient(const DisplacementField& u, double tol = 1e-12,
                                      const SparseSym* mass = nullptr) {
    const Mesh& mesh = *u.mesh;
    SparseSym local;
    if (!mass) {
        local = assemble_mass(mesh);
        mass = &local;
    }
    std::array<std::vector<double>, 4> rhs;
    for (auto& r : rhs) r.assign(mesh.num_vertices(), 0.0);
    for (const auto& tri : mesh.triangles) {
        const auto e = detail::p1_element(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                          mesh.vertices[tri[2]]);
        double g[4] = {0.0, 0.0, 0.0, 0.0};  // du_x/dx, du_x/dy, du_y/dx, du_y/dy
        for (int i = 0; i < 3; ++i) {
            g[0] += u.values[2 * tri[i]] * e.grad[i].x;
            g[1] += u.values[2 * tri[i]] * e.grad[i].y;
            g[2] += u.values[2 * tri[i] + 1] * e.grad[i].x;
            g[3] += u.values[2 * tri[i] + 1] * e.grad[i].y;
        }
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i < 3; ++i) rhs[c][tri[i]] += e.area / 3.0 * g[c];
    }
    GradientField w;
    w.mesh = &mesh;
    for (int c = 0; c < 4; ++c)
        w.comp[c] = cg_solve(*mass, std::move(rhs[c]), tol, 10 * mass->n).x;
    return w;
}

/// H1 norm sqrt(int |u|^2 + int |grad u|^2) with exact P1 quadrature.
inline double h1_norm(const DisplacementField& u) {
    const Mesh& mesh = *u.mesh;
    double acc = 0.0;
    for (const auto& tri : mesh.triangles) {
        const auto e = detail::p1_element(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                          mesh.vertices[tri[2]]);
        for (int c = 0; c < 2; ++c) {
            const double v0 = u.values[2 * tri[0] + c], v1 = u.values[2 * tri[1] + c],
                         v2 = u.values[2 * tri[2] + c];
            const double sum = v0 + v1 + v2;
            acc += e.area / 12.0 * (sum * sum + v0 * v0 + v1 * v1 + v2 * v2);
            Vec2 g{0.0, 0.0};
            g = g + v0 * e.grad[0] + v1 * e.grad[1] + v2 * e.grad[2];
            acc += e.area * dot(g, g);
        }
    }
    return std::sqrt(acc);
}

/// Max nodal absolute value (the exact L-infinity norm of a P1 function).
inline double linf_norm(std::span<const double> nodal) {
    double m = 0.0;
    for (double v : nodal) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace kachanov
