#ifndef IRKPREC_MESH_HPP
#define IRKPREC_MESH_HPP

#include <array>
#include <string>
#include <vector>

#include "irkprec/common.hpp"

namespace irkprec {

enum class Wall { North, South, East, West };
enum class Domain { UnitSquare, BiUnitSquare };

std::string wall_name(Wall w);

struct BoundaryEdge {
    int v0, v1;
    Wall wall;
};

/// Structured triangulation of [0,1]^2 or [-1,1]^2: an n x n quad grid,
/// each quad split along the same (lower-left to upper-right) diagonal.
struct Mesh2D {
    Domain domain = Domain::UnitSquare;
    int n = 0; // elements per side
    std::vector<std::array<double, 2>> vertices;
    std::vector<std::array<int, 2>> vertex_ij; // lattice coordinates
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<BoundaryEdge> boundary_edges;

    double side_length() const {
        return domain == Domain::UnitSquare ? 1.0 : 2.0;
    }
    double h() const { return side_length() / n; }
    double xmin() const { return domain == Domain::UnitSquare ? 0.0 : -1.0; }
};

Mesh2D build_structured_mesh(Domain domain, int n);

double triangle_area(const Mesh2D& mesh, int t);

/// Plain-text export: a node list followed by an element list.
void write_mesh_text(const Mesh2D& mesh, const std::string& path);

} // namespace irkprec

#endif
