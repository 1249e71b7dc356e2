#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kachanov/errors.hpp"

namespace kachanov {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

/// Boundary parts: Gamma0 carries the bottom/fixed data, Gamma1 the
/// tension-free sides, Gamma2 the loaded top.
enum class BoundaryTag { Gamma0, Gamma1, Gamma2 };

inline const char* to_string(BoundaryTag t) {
    switch (t) {
        case BoundaryTag::Gamma0: return "Gamma0";
        case BoundaryTag::Gamma1: return "Gamma1";
        case BoundaryTag::Gamma2: return "Gamma2";
    }
    return "?";
}

struct BoundaryEdge {
    std::array<int, 2> v;
    BoundaryTag tag;
};

/// Triangulated 2D domain with tagged boundary edges. Immutable after
/// construction; safe to share read-only across threads.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
    std::vector<BoundaryEdge> boundary_edges;
    double h = 0.0;  ///< longest edge length

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

/// Twice the signed area of triangle t; positive for counterclockwise.
inline double signed_area2(const Mesh& m, int t) {
    const auto& tri = m.triangles[t];
    const Vec2 a = m.vertices[tri[0]], b = m.vertices[tri[1]], c = m.vertices[tri[2]];
    return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

inline double triangle_area(const Mesh& m, int t) { return 0.5 * signed_area2(m, t); }

inline double max_edge_length(const Mesh& m) {
    double h = 0.0;
    for (const auto& tri : m.triangles)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, norm(m.vertices[tri[e]] - m.vertices[tri[(e + 1) % 3]]));
    return h;
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    enum class Kind {
        NegativeArea,    ///< triangle has non-positive signed area
        IndexOutOfRange, ///< triangle or tagged edge references a missing vertex
        MissingTag,      ///< an edge on the triangulation boundary carries no tag
        NotOnBoundary,   ///< a tagged edge is interior or dangling
        DuplicateTag,    ///< the same edge is tagged more than once
        OverusedEdge,    ///< an edge is shared by three or more triangles
        WrongH           ///< stored h does not equal the longest edge
    };
    Kind kind;
    long index;  ///< offending triangle or boundary-edge index (-1 for mesh-level)
    std::string detail;
};

inline const char* to_string(Violation::Kind k) {
    using K = Violation::Kind;
    switch (k) {
        case K::NegativeArea: return "NegativeArea";
        case K::IndexOutOfRange: return "IndexOutOfRange";
        case K::MissingTag: return "MissingTag";
        case K::NotOnBoundary: return "NotOnBoundary";
        case K::DuplicateTag: return "DuplicateTag";
        case K::OverusedEdge: return "OverusedEdge";
        case K::WrongH: return "WrongH";
    }
    return "?";
}

/// Raised when a loaded mesh violates the Mesh invariants; carries the full
/// violation list so callers can report them.
struct InvalidTopology : Error {
    std::vector<Violation> violations;
    explicit InvalidTopology(std::vector<Violation> v)
        : Error("mesh violates " + std::to_string(v.size()) + " invariant(s)"),
          violations(std::move(v)) {}
};

/// Checks every Mesh invariant. Returns one entry per violation; an empty
/// list means the mesh is valid.
inline std::vector<Violation> validate(const Mesh& m) {
    std::vector<Violation> out;
    const int nv = m.num_vertices();

    auto in_range = [nv](int v) { return v >= 0 && v < nv; };

    std::vector<char> tri_ok(m.triangles.size(), 1);
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        if (!in_range(tri[0]) || !in_range(tri[1]) || !in_range(tri[2])) {
            out.push_back({Violation::Kind::IndexOutOfRange, long(t), "triangle"});
            tri_ok[t] = 0;
        }
    }
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        if (tri_ok[t] && !(signed_area2(m, int(t)) > 0.0))
            out.push_back({Violation::Kind::NegativeArea, long(t), ""});
    }

    // Edge usage counts over the triangulation.
    std::map<std::pair<int, int>, int> use;
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        if (!tri_ok[t]) continue;
        const auto& tri = m.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::minmax(a, b);
            if (++use[{key.first, key.second}] == 3)
                out.push_back({Violation::Kind::OverusedEdge, long(t),
                               "edge " + std::to_string(a) + "-" + std::to_string(b)});
        }
    }

    std::map<std::pair<int, int>, int> tagged;  // edge -> first tagged index
    for (size_t e = 0; e < m.boundary_edges.size(); ++e) {
        const auto& be = m.boundary_edges[e];
        if (!in_range(be.v[0]) || !in_range(be.v[1])) {
            out.push_back({Violation::Kind::IndexOutOfRange, long(e), "boundary edge"});
            continue;
        }
        auto key = std::minmax(be.v[0], be.v[1]);
        auto [it, inserted] = tagged.insert({{key.first, key.second}, int(e)});
        if (!inserted) {
            out.push_back({Violation::Kind::DuplicateTag, long(e), ""});
            continue;
        }
        auto u = use.find({key.first, key.second});
        int count = (u == use.end()) ? 0 : u->second;
        if (count != 1)
            out.push_back({Violation::Kind::NotOnBoundary, long(e),
                           count == 0 ? "dangling" : "interior"});
    }

    // Every once-used triangulation edge must be tagged.
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        if (!tri_ok[t]) continue;
        const auto& tri = m.triangles[t];
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::minmax(a, b);
            if (use[{key.first, key.second}] == 1 && !tagged.count({key.first, key.second}))
                out.push_back({Violation::Kind::MissingTag, long(t),
                               "edge " + std::to_string(a) + "-" + std::to_string(b)});
        }
    }

    const double hmax = max_edge_length(m);
    if (std::abs(m.h - hmax) > 1e-12 * std::max(1.0, hmax))
        out.push_back({Violation::Kind::WrongH, -1,
                       "stored " + std::to_string(m.h) + ", actual " + std::to_string(hmax)});
    return out;
}

// ---------------------------------------------------------------------------
// Builders

/// Uniform triangulation of the unit square with n cells per side, each cell
/// split along the lower-left to upper-right diagonal. Bottom edges are
/// Gamma0, top Gamma2, left/right Gamma1.
inline Mesh generate_unit_square(int n) {
    Mesh m;
    const int k = n + 1;
    m.vertices.reserve(size_t(k) * k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
            m.vertices.push_back({double(i) / n, double(j) / n});
    auto vid = [k](int i, int j) { return j * k + i; };
    m.triangles.reserve(size_t(2) * n * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            m.triangles.push_back({a, b, c});
            m.triangles.push_back({a, c, d});
        }
    }
    for (int i = 0; i < n; ++i) {
        m.boundary_edges.push_back({{vid(i, 0), vid(i + 1, 0)}, BoundaryTag::Gamma0});
        m.boundary_edges.push_back({{vid(i, n), vid(i + 1, n)}, BoundaryTag::Gamma2});
        m.boundary_edges.push_back({{vid(0, i), vid(0, i + 1)}, BoundaryTag::Gamma1});
        m.boundary_edges.push_back({{vid(n, i), vid(n, i + 1)}, BoundaryTag::Gamma1});
    }
    m.h = std::sqrt(2.0) / n;
    return m;
}

/// Records how a refined mesh was produced: parent vertices keep their index,
/// every new vertex is the midpoint of a parent edge. Enables exact P1
/// prolongation between nested meshes.
struct RefineMap {
    int parent_vertex_count = 0;
    std::vector<std::array<int, 2>> midpoint_parents;  ///< new vertex k = parent_count + k
};

/// Red refinement: each triangle split into four by its edge midpoints.
/// Parent vertices keep index and coordinates; boundary tags are inherited.
inline Mesh refine_uniform(const Mesh& m, RefineMap* map = nullptr) {
    Mesh r;
    r.vertices = m.vertices;
    if (map) {
        map->parent_vertex_count = m.num_vertices();
        map->midpoint_parents.clear();
    }
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find({key.first, key.second});
        if (it != midpoint.end()) return it->second;
        const int idx = r.num_vertices();
        r.vertices.push_back(0.5 * (m.vertices[a] + m.vertices[b]));
        midpoint[{key.first, key.second}] = idx;
        if (map) map->midpoint_parents.push_back({a, b});
        return idx;
    };
    r.triangles.reserve(m.triangles.size() * 4);
    for (const auto& tri : m.triangles) {
        const int v0 = tri[0], v1 = tri[1], v2 = tri[2];
        const int m01 = mid(v0, v1), m12 = mid(v1, v2), m20 = mid(v2, v0);
        r.triangles.push_back({v0, m01, m20});
        r.triangles.push_back({v1, m12, m01});
        r.triangles.push_back({v2, m20, m12});
        r.triangles.push_back({m01, m12, m20});
    }
    for (const auto& be : m.boundary_edges) {
        const int mm = mid(be.v[0], be.v[1]);
        r.boundary_edges.push_back({{be.v[0], mm}, be.tag});
        r.boundary_edges.push_back({{mm, be.v[1]}, be.tag});
    }
    r.h = max_edge_length(r);
    return r;
}

/// Exact P1 prolongation of nodal scalar values from a parent mesh to its
/// refinement: parent nodes copy, midpoints average their edge endpoints.
inline std::vector<double> prolong_scalar(const RefineMap& map, const std::vector<double>& parent) {
    std::vector<double> child(parent.begin(), parent.begin() + map.parent_vertex_count);
    child.reserve(map.parent_vertex_count + map.midpoint_parents.size());
    for (const auto& mp : map.midpoint_parents)
        child.push_back(0.5 * (parent[mp[0]] + parent[mp[1]]));
    return child;
}

/// Same for interleaved 2-component nodal vectors.
inline std::vector<double> prolong_vector2(const RefineMap& map, const std::vector<double>& parent) {
    std::vector<double> child(parent.begin(), parent.begin() + 2 * map.parent_vertex_count);
    for (const auto& mp : map.midpoint_parents) {
        child.push_back(0.5 * (parent[2 * mp[0]] + parent[2 * mp[1]]));
        child.push_back(0.5 * (parent[2 * mp[0] + 1] + parent[2 * mp[1] + 1]));
    }
    return child;
}

}  // namespace kachanov
