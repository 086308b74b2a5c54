#include "irkprec/mesh.hpp"

#include <cstdio>
#include <fstream>

namespace irkprec {

std::string wall_name(Wall w) {
    switch (w) {
    case Wall::North: return "north";
    case Wall::South: return "south";
    case Wall::East: return "east";
    default: return "west";
    }
}

Mesh2D build_structured_mesh(Domain domain, int n) {
    require(n >= 2, "build_structured_mesh: n >= 2");
    Mesh2D mesh;
    mesh.domain = domain;
    mesh.n = n;

    const double h = mesh.h();
    const double x0 = mesh.xmin();
    mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
    mesh.vertex_ij.reserve(mesh.vertices.capacity());
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            mesh.vertices.push_back({x0 + i * h, x0 + j * h});
            mesh.vertex_ij.push_back({i, j});
        }

    auto vid = [n](int i, int j) { return j * (n + 1) + i; };

    mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j), v10 = vid(i + 1, j);
            const int v11 = vid(i + 1, j + 1), v01 = vid(i, j + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }

    for (int i = 0; i < n; ++i) {
        mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), Wall::South});
        mesh.boundary_edges.push_back({vid(i, n), vid(i + 1, n), Wall::North});
        mesh.boundary_edges.push_back({vid(0, i), vid(0, i + 1), Wall::West});
        mesh.boundary_edges.push_back({vid(n, i), vid(n, i + 1), Wall::East});
    }
    return mesh;
}

double triangle_area(const Mesh2D& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

void write_mesh_text(const Mesh2D& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "nodes " << mesh.vertices.size() << '\n';
    char buf[96];
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", v,
                      mesh.vertices[v][0], mesh.vertices[v][1]);
        out << buf;
    }
    out << "elements " << mesh.triangles.size() << '\n';
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        out << t << ' ' << mesh.triangles[t][0] << ' ' << mesh.triangles[t][1]
            << ' ' << mesh.triangles[t][2] << '\n';
}

} // namespace irkprec
