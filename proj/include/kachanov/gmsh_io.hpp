#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kachanov/mesh.hpp"

namespace kachanov {

/// Physical-tag aliases used by MSH files for the three boundary parts.
struct TagAliases {
    int gamma0 = 10;
    int gamma1 = 11;
    int gamma2 = 12;

    bool injective() const { return gamma0 != gamma1 && gamma0 != gamma2 && gamma1 != gamma2; }

    bool lookup(int phys, BoundaryTag& out) const {
        if (phys == gamma0) out = BoundaryTag::Gamma0;
        else if (phys == gamma1) out = BoundaryTag::Gamma1;
        else if (phys == gamma2) out = BoundaryTag::Gamma2;
        else return false;
        return true;
    }

    int alias(BoundaryTag t) const {
        switch (t) {
            case BoundaryTag::Gamma0: return gamma0;
            case BoundaryTag::Gamma1: return gamma1;
            case BoundaryTag::Gamma2: return gamma2;
        }
        return -1;
    }
};

namespace detail {

inline std::string next_token(std::istream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) throw MalformedFile(std::string("unexpected end of file, expected ") + what);
    return tok;
}

inline long next_long(std::istream& in, const char* what) {
    const std::string tok = next_token(in, what);
    try {
        size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MalformedFile(std::string("expected integer for ") + what + ", got '" + tok + "'");
    }
}

inline double next_double(std::istream& in, const char* what) {
    const std::string tok = next_token(in, what);
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MalformedFile(std::string("expected number for ") + what + ", got '" + tok + "'");
    }
}

inline void expect(std::istream& in, const char* literal) {
    const std::string tok = next_token(in, literal);
    if (tok != literal) throw MalformedFile(std::string("expected '") + literal + "', got '" + tok + "'");
}

}  // namespace detail

/// Reads the MSH 2.2 ASCII subset: $MeshFormat "2.2 0 8", $Nodes with
/// sequential 1-based ids and zero z, $Elements with 2-node lines (boundary,
/// physical tag mapped through the aliases) and 3-node triangles.
/// $PhysicalNames sections are skipped. The loaded mesh is validated; any
/// invariant violation raises InvalidTopology carrying the full list.
inline Mesh read_gmsh(std::istream& in, const TagAliases& aliases = {}) {
    using namespace detail;
    if (!aliases.injective()) throw ConfigError("tag aliases must be distinct");

    Mesh m;
    expect(in, "$MeshFormat");
    const std::string version = next_token(in, "version");
    const long file_type = next_long(in, "file type");
    const long data_size = next_long(in, "data size");
    if (version != "2.2" || file_type != 0 || data_size != 8)
        throw MalformedFile("unsupported $MeshFormat '" + version + " " +
                            std::to_string(file_type) + " " + std::to_string(data_size) +
                            "', only '2.2 0 8' is accepted");
    expect(in, "$EndMeshFormat");

    bool seen_nodes = false, seen_elements = false;
    std::string section;
    while (in >> section) {
        if (section == "$PhysicalNames") {
            std::string tok;
            while (in >> tok && tok != "$EndPhysicalNames") {}
            if (tok != "$EndPhysicalNames") throw MalformedFile("unterminated $PhysicalNames");
        } else if (section == "$Nodes") {
            if (seen_nodes) throw MalformedFile("repeated $Nodes section");
            seen_nodes = true;
            const long count = next_long(in, "node count");
            if (count < 0) throw MalformedFile("negative node count");
            m.vertices.reserve(size_t(count));
            for (long i = 0; i < count; ++i) {
                const long id = next_long(in, "node id");
                if (id != i + 1)
                    throw MalformedFile("node ids must be sequential from 1, got " +
                                        std::to_string(id));
                const double x = next_double(in, "x");
                const double y = next_double(in, "y");
                const double z = next_double(in, "z");
                if (z != 0.0) throw NonPlanar("node " + std::to_string(id) + " has z = " +
                                              std::to_string(z));
                m.vertices.push_back({x, y});
            }
            expect(in, "$EndNodes");
        } else if (section == "$Elements") {
            if (!seen_nodes) throw MalformedFile("$Elements before $Nodes");
            if (seen_elements) throw MalformedFile("repeated $Elements section");
            seen_elements = true;
            const long count = next_long(in, "element count");
            const long nv = m.num_vertices();
            auto node_ref = [&](const char* what) {
                const long id = next_long(in, what);
                if (id < 1 || id > nv)
                    throw MalformedFile("element references node " + std::to_string(id) +
                                        " of " + std::to_string(nv));
                return int(id - 1);
            };
            for (long e = 0; e < count; ++e) {
                next_long(in, "element id");
                const long type = next_long(in, "element type");
                const long ntags = next_long(in, "tag count");
                if (ntags < 0) throw MalformedFile("negative tag count");
                long phys = 0;
                for (long k = 0; k < ntags; ++k) {
                    const long tag = next_long(in, "tag");
                    if (k == 0) phys = tag;
                }
                if (type == 1) {
                    if (ntags < 1) throw MalformedFile("line element without physical tag");
                    BoundaryTag tag;
                    if (!aliases.lookup(int(phys), tag))
                        throw UnknownTag("no boundary alias for physical tag " +
                                         std::to_string(phys));
                    const int a = node_ref("line node"), b = node_ref("line node");
                    m.boundary_edges.push_back({{a, b}, tag});
                } else if (type == 2) {
                    const int a = node_ref("triangle node");
                    const int b = node_ref("triangle node");
                    const int c = node_ref("triangle node");
                    m.triangles.push_back({a, b, c});
                } else {
                    throw MalformedFile("unsupported element type " + std::to_string(type));
                }
            }
            expect(in, "$EndElements");
        } else {
            throw MalformedFile("unknown section '" + section + "'");
        }
    }
    if (!seen_nodes || !seen_elements) throw MalformedFile("missing $Nodes or $Elements");

    m.h = max_edge_length(m);
    auto violations = validate(m);
    if (!violations.empty()) throw InvalidTopology(std::move(violations));
    return m;
}

/// Writes the same MSH 2.2 subset read_gmsh accepts. Coordinates carry 17
/// significant digits, so a write/read round trip reproduces them exactly.
inline void write_gmsh(std::ostream& out, const Mesh& m, const TagAliases& aliases = {}) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$Nodes\n" << m.num_vertices() << "\n";
    char buf[80];
    for (int i = 0; i < m.num_vertices(); ++i) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g 0\n", i + 1, m.vertices[i].x,
                      m.vertices[i].y);
        out << buf;
    }
    out << "$EndNodes\n";
    out << "$Elements\n" << (m.boundary_edges.size() + m.triangles.size()) << "\n";
    long id = 1;
    for (const auto& be : m.boundary_edges) {
        const int phys = aliases.alias(be.tag);
        out << id++ << " 1 2 " << phys << " " << phys << " " << be.v[0] + 1 << " "
            << be.v[1] + 1 << "\n";
    }
    for (const auto& tri : m.triangles)
        out << id++ << " 2 2 0 0 " << tri[0] + 1 << " " << tri[1] + 1 << " " << tri[2] + 1
            << "\n";
    out << "$EndElements\n";
}

}  // namespace kachanov
