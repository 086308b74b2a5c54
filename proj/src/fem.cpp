#include "irkprec/fem.hpp"

#include <algorithm>
#include <cmath>

#include "irkprec/orthopoly.hpp"

namespace irkprec {

namespace {

// Triangle quadrature: 5x5 Gauss-Legendre collapsed onto the reference
// triangle (Duffy transform). Exact for total degree <= 8, which covers
// the P2 mass matrix and every SUPG term with the cubic cavity wind.
struct TriQuadrature {
    std::vector<double> xi, eta, w;
};

const TriQuadrature& tri_quadrature() {
    static const TriQuadrature q = [] {
        const Quadrature1D g = gauss_legendre_01(5);
        TriQuadrature tq;
        for (std::size_t i = 0; i < g.points.size(); ++i)
            for (std::size_t j = 0; j < g.points.size(); ++j) {
                const double u = g.points[i], v = g.points[j];
                tq.xi.push_back(u);
                tq.eta.push_back(v * (1.0 - u));
                tq.w.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
            }
        return tq;
    }();
    return q;
}

struct BasisTable {
    int ndof;
    // values[q][a], ref_grad[q][a][2]
    std::vector<std::array<double, 6>> values;
    std::vector<std::array<std::array<double, 2>, 6>> ref_grad;
};

BasisTable tabulate_basis(int p) {
    const TriQuadrature& q = tri_quadrature();
    BasisTable t;
    t.ndof = p == 1 ? 3 : 6;
    t.values.resize(q.w.size());
    t.ref_grad.resize(q.w.size());
    for (std::size_t k = 0; k < q.w.size(); ++k) {
        const double xi = q.xi[k], eta = q.eta[k];
        const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
        const double g[3][2] = {{-1.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
        auto& N = t.values[k];
        auto& dN = t.ref_grad[k];
        if (p == 1) {
            N[0] = l0;
            N[1] = l1;
            N[2] = l2;
            for (int a = 0; a < 3; ++a) {
                dN[a][0] = g[a][0];
                dN[a][1] = g[a][1];
            }
        } else {
            const double l[3] = {l0, l1, l2};
            for (int a = 0; a < 3; ++a) {
                N[a] = l[a] * (2.0 * l[a] - 1.0);
                dN[a][0] = (4.0 * l[a] - 1.0) * g[a][0];
                dN[a][1] = (4.0 * l[a] - 1.0) * g[a][1];
            }
            const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
            for (int m = 0; m < 3; ++m) {
                const int a = e[m][0], b = e[m][1];
                N[3 + m] = 4.0 * l[a] * l[b];
                dN[3 + m][0] = 4.0 * (l[a] * g[b][0] + l[b] * g[a][0]);
                dN[3 + m][1] = 4.0 * (l[a] * g[b][1] + l[b] * g[a][1]);
            }
        }
    }
    return t;
}

const BasisTable& basis_table(int p) {
    static const BasisTable p1 = tabulate_basis(1);
    static const BasisTable p2 = tabulate_basis(2);
    return p == 1 ? p1 : p2;
}

struct ElementGeometry {
    double x0, y0;
    double J[2][2];
    double det;
    double Jinv[2][2];
};

ElementGeometry element_geometry(const Mesh2D& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const auto& a = mesh.vertices[tri[0]];
    const auto& b = mesh.vertices[tri[1]];
    const auto& c = mesh.vertices[tri[2]];
    ElementGeometry g;
    g.x0 = a[0];
    g.y0 = a[1];
    g.J[0][0] = b[0] - a[0];
    g.J[0][1] = c[0] - a[0];
    g.J[1][0] = b[1] - a[1];
    g.J[1][1] = c[1] - a[1];
    g.det = g.J[0][0] * g.J[1][1] - g.J[0][1] * g.J[1][0];
    if (!(g.det > 1e-300))
        throw std::invalid_argument("assembly: degenerate triangle " +
                                    std::to_string(t));
    const double inv = 1.0 / g.det;
    g.Jinv[0][0] = g.J[1][1] * inv;
    g.Jinv[0][1] = -g.J[0][1] * inv;
    g.Jinv[1][0] = -g.J[1][0] * inv;
    g.Jinv[1][1] = g.J[0][0] * inv;
    return g;
}

} // namespace

void FemSpace::element_dofs(int t, int out[6]) const {
    const int nps = nodes_per_side;
    const auto& tri = mesh.triangles[t];
    int lat[3][2];
    for (int v = 0; v < 3; ++v) {
        lat[v][0] = p * mesh.vertex_ij[tri[v]][0];
        lat[v][1] = p * mesh.vertex_ij[tri[v]][1];
        out[v] = lat[v][1] * nps + lat[v][0];
    }
    if (p == 2) {
        const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (int m = 0; m < 3; ++m) {
            const int i = (lat[e[m][0]][0] + lat[e[m][1]][0]) / 2;
            const int j = (lat[e[m][0]][1] + lat[e[m][1]][1]) / 2;
            out[3 + m] = j * nps + i;
        }
    }
}

FemSpace make_space(const Mesh2D& mesh, int p) {
    require(p == 1 || p == 2, "make_space: p must be 1 or 2");
    FemSpace sp;
    sp.mesh = mesh;
    sp.p = p;
    sp.nodes_per_side = p * mesh.n + 1;
    const int nps = sp.nodes_per_side;
    const double hd = mesh.h() / p;
    const double x0 = mesh.xmin();

    sp.dof_coords.reserve(static_cast<std::size_t>(nps) * nps);
    sp.full_to_free.assign(static_cast<std::size_t>(nps) * nps, -1);
    for (int j = 0; j < nps; ++j)
        for (int i = 0; i < nps; ++i) {
            sp.dof_coords.push_back({x0 + i * hd, x0 + j * hd});
            const bool boundary = i == 0 || i == nps - 1 || j == 0 || j == nps - 1;
            const int id = j * nps + i;
            if (boundary) {
                sp.dirichlet_dofs.push_back(id);
            } else {
                sp.full_to_free[id] = static_cast<int>(sp.free_dofs.size());
                sp.free_dofs.push_back(id);
            }
        }
    return sp;
}

std::array<double, 2> double_glazing_wind(double x, double y) {
    return {2.0 * y * (1.0 - x * x), -2.0 * x * (1.0 - y * y)};
}

WindField make_double_glazing_wind() {
    return WindField{[](double x, double y) { return double_glazing_wind(x, y); }};
}

CsrMatrix assemble_mass(const FemSpace& space) {
    const TriQuadrature& q = tri_quadrature();
    const BasisTable& bt = basis_table(space.p);
    const int nd = bt.ndof;
    const int n_dofs = space.n_dofs();

    TripletBuilder trip(n_dofs, n_dofs);
    trip.reserve(space.mesh.triangles.size() * nd * nd);
    int dofs[6];
    double me[6][6];
    for (std::size_t t = 0; t < space.mesh.triangles.size(); ++t) {
        const ElementGeometry g = element_geometry(space.mesh, static_cast<int>(t));
        space.element_dofs(static_cast<int>(t), dofs);
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) me[a][b] = 0.0;
        for (std::size_t k = 0; k < q.w.size(); ++k) {
            const double scale = q.w[k] * g.det;
            const auto& N = bt.values[k];
            for (int a = 0; a < nd; ++a)
                for (int b = 0; b < nd; ++b)
                    me[a][b] += scale * (N[b] * N[a]);
        }
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) trip.add(dofs[a], dofs[b], me[a][b]);
    }
    return trip.compress();
}

CsrMatrix assemble_diffusion(const FemSpace& space, double eps) {
    require(eps > 0.0, "assemble_diffusion: eps must be positive");
    const TriQuadrature& q = tri_quadrature();
    const BasisTable& bt = basis_table(space.p);
    const int nd = bt.ndof;
    const int n_dofs = space.n_dofs();

    TripletBuilder trip(n_dofs, n_dofs);
    trip.reserve(space.mesh.triangles.size() * nd * nd);
    int dofs[6];
    double fe[6][6];
    double gx[6], gy[6];
    for (std::size_t t = 0; t < space.mesh.triangles.size(); ++t) {
        const ElementGeometry g = element_geometry(space.mesh, static_cast<int>(t));
        space.element_dofs(static_cast<int>(t), dofs);
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) fe[a][b] = 0.0;
        for (std::size_t k = 0; k < q.w.size(); ++k) {
            const double scale = q.w[k] * g.det;
            const auto& dN = bt.ref_grad[k];
            for (int a = 0; a < nd; ++a) {
                gx[a] = g.Jinv[0][0] * dN[a][0] + g.Jinv[1][0] * dN[a][1];
                gy[a] = g.Jinv[0][1] * dN[a][0] + g.Jinv[1][1] * dN[a][1];
            }
            for (int a = 0; a < nd; ++a)
                for (int b = 0; b < nd; ++b)
                    fe[a][b] += scale * (eps * (gx[b] * gx[a] + gy[b] * gy[a]));
        }
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) trip.add(dofs[a], dofs[b], fe[a][b]);
    }
    return trip.compress();
}

SupgMatrices assemble_advection_supg(const FemSpace& space,
                                     const WindField& wind, double eps) {
    require(space.p == 1, "assemble_advection_supg: linear elements only");
    require(eps > 0.0, "assemble_advection_supg: eps must be positive");
    const TriQuadrature& q = tri_quadrature();
    const BasisTable& bt = basis_table(1);
    const int nd = 3;
    const int n_dofs = space.n_dofs();

    TripletBuilder trip_f(n_dofs, n_dofs), trip_m(n_dofs, n_dofs);
    trip_f.reserve(space.mesh.triangles.size() * nd * nd);
    trip_m.reserve(space.mesh.triangles.size() * nd * nd);
    int dofs[6];
    double fe[3][3], me[3][3];
    double gx[3], gy[3], conv[3];
    for (std::size_t t = 0; t < space.mesh.triangles.size(); ++t) {
        const ElementGeometry g = element_geometry(space.mesh, static_cast<int>(t));
        space.element_dofs(static_cast<int>(t), dofs);

        const auto& tri = space.mesh.triangles[t];
        const auto& v0 = space.mesh.vertices[tri[0]];
        const auto& v1 = space.mesh.vertices[tri[1]];
        const auto& v2 = space.mesh.vertices[tri[2]];
        auto edge = [](const std::array<double, 2>& a,
                       const std::array<double, 2>& b) {
            return std::hypot(b[0] - a[0], b[1] - a[1]);
        };
        const double h_e =
            std::max({edge(v0, v1), edge(v1, v2), edge(v2, v0)});
        const double cx = (v0[0] + v1[0] + v2[0]) / 3.0;
        const double cy = (v0[1] + v1[1] + v2[1]) / 3.0;
        const auto wc = wind.eval(cx, cy);
        const double wmag = std::hypot(wc[0], wc[1]);
        double delta = 0.0;
        if (wmag > 0.0) {
            const double peclet = wmag * h_e / (2.0 * eps);
            delta = h_e / (2.0 * wmag) * std::max(0.0, 1.0 - 1.0 / peclet);
        }

        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) fe[a][b] = me[a][b] = 0.0;
        for (std::size_t k = 0; k < q.w.size(); ++k) {
            const double scale = q.w[k] * g.det;
            const auto& N = bt.values[k];
            const auto& dN = bt.ref_grad[k];
            const double x = g.x0 + g.J[0][0] * q.xi[k] + g.J[0][1] * q.eta[k];
            const double y = g.y0 + g.J[1][0] * q.xi[k] + g.J[1][1] * q.eta[k];
            const auto w = wind.eval(x, y);
            for (int a = 0; a < nd; ++a) {
                gx[a] = g.Jinv[0][0] * dN[a][0] + g.Jinv[1][0] * dN[a][1];
                gy[a] = g.Jinv[0][1] * dN[a][0] + g.Jinv[1][1] * dN[a][1];
                conv[a] = w[0] * gx[a] + w[1] * gy[a];
            }
            for (int a = 0; a < nd; ++a)
                for (int b = 0; b < nd; ++b) {
                    fe[a][b] += scale * (eps * (gx[b] * gx[a] + gy[b] * gy[a]) +
                                         conv[b] * N[a] +
                                         delta * (conv[b] * conv[a]));
                    me[a][b] += scale * (N[b] * N[a] + delta * (N[b] * conv[a]));
                }
        }
        for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) {
                trip_f.add(dofs[a], dofs[b], fe[a][b]);
                trip_m.add(dofs[a], dofs[b], me[a][b]);
            }
    }
    return {trip_f.compress(), trip_m.compress()};
}

double WallValues::at(Wall w) const {
    switch (w) {
    case Wall::North: return north;
    case Wall::South: return south;
    case Wall::East: return east;
    default: return west;
    }
}

CsrMatrix restrict_to_free(const CsrMatrix& A, const FemSpace& space) {
    const int nf = space.n_free();
    CsrMatrix R;
    R.n_rows = R.n_cols = nf;
    R.row_ptr.assign(nf + 1, 0);
    for (int fi = 0; fi < nf; ++fi) {
        const int i = space.free_dofs[fi];
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const int fj = space.full_to_free[A.col_idx[k]];
            if (fj >= 0) {
                R.col_idx.push_back(fj);
                R.vals.push_back(A.vals[k]);
            }
        }
        R.row_ptr[fi + 1] = static_cast<int>(R.col_idx.size());
    }
    return R;
}

Vec restrict_free(const FemSpace& space, std::span<const double> full) {
    require(static_cast<int>(full.size()) == space.n_dofs(),
            "restrict_free: size mismatch");
    Vec out(space.free_dofs.size());
    for (std::size_t k = 0; k < space.free_dofs.size(); ++k)
        out[k] = full[space.free_dofs[k]];
    return out;
}

Vec lift_product_free(const CsrMatrix& A, const FemSpace& space,
                      std::span<const double> g_full) {
    const Vec prod = spmv(A, g_full);
    return restrict_free(space, prod);
}

EliminatedSystem eliminate_dirichlet(const CsrMatrix& M, const CsrMatrix& F,
                                     const FemSpace& space, WallValues values) {
    bool seen[4] = {false, false, false, false};
    for (const BoundaryEdge& e : space.mesh.boundary_edges)
        seen[static_cast<int>(e.wall)] = true;
    for (int w = 0; w < 4; ++w)
        if (!seen[w])
            throw std::invalid_argument("eliminate_dirichlet: wall " +
                                        wall_name(static_cast<Wall>(w)) +
                                        " absent from mesh");

    EliminatedSystem sys;
    sys.M_ff = restrict_to_free(M, space);
    sys.F_ff = restrict_to_free(F, space);

    // Nodal interpolation of the wall data; the East value wins at corners.
    const int nps = space.nodes_per_side;
    sys.lift.assign(space.n_dofs(), 0.0);
    for (int id : space.dirichlet_dofs) {
        const int i = id % nps, j = id / nps;
        double v = 0.0;
        if (j == 0) v = values.south;
        if (i == 0) v = values.west;
        if (j == nps - 1) v = values.north;
        if (i == nps - 1) v = values.east;
        sys.lift[id] = v;
    }
    sys.f_lift = lift_product_free(F, space, sys.lift);
    sys.m_lift = lift_product_free(M, space, sys.lift);
    return sys;
}

ExactSolution decaying_sine_product() {
    constexpr double pi = 3.14159265358979323846;
    ExactSolution e;
    e.u = [](double x, double y, double t) {
        return std::exp(-t) * std::sin(pi * x) * std::sin(pi * y);
    };
    e.u_t = [](double x, double y, double t) {
        return -std::exp(-t) * std::sin(pi * x) * std::sin(pi * y);
    };
    e.grad = [](double x, double y, double t) -> std::array<double, 2> {
        const double d = std::exp(-t);
        return {d * pi * std::cos(pi * x) * std::sin(pi * y),
                d * pi * std::sin(pi * x) * std::cos(pi * y)};
    };
    e.lap = [](double x, double y, double t) {
        return -2.0 * pi * pi * std::exp(-t) * std::sin(pi * x) *
               std::sin(pi * y);
    };
    return e;
}

ManufacturedProblem manufactured_problem(const FemSpace& space,
                                         const CsrMatrix& M_full,
                                         const ExactSolution& exact,
                                         const WindField* wind, double eps) {
    require(M_full.n_rows == space.n_dofs(),
            "manufactured_problem: mass matrix over all dofs expected");

    auto coords = space.dof_coords;
    auto free = space.free_dofs;
    const WindField wind_copy = wind ? *wind : WindField{};
    const bool advect = wind != nullptr;

    ManufacturedProblem mp;
    mp.stage_forcing = [coords, free, M_full, exact, wind_copy, advect,
                        eps](double t) {
        Vec f(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const double x = coords[i][0], y = coords[i][1];
            double v = exact.u_t(x, y, t) - eps * exact.lap(x, y, t);
            if (advect) {
                const auto g = exact.grad(x, y, t);
                const auto w = wind_copy.eval(x, y);
                v += w[0] * g[0] + w[1] * g[1];
            }
            f[i] = v;
        }
        const Vec mf = spmv(M_full, f);
        Vec out(free.size());
        for (std::size_t k = 0; k < free.size(); ++k) out[k] = mf[free[k]];
        return out;
    };

    mp.initial.resize(free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        const auto& c = coords[free[k]];
        mp.initial[k] = exact.u(c[0], c[1], 0.0);
    }

    mp.rel_error = [coords, free, exact](const Vec& uf, double t) {
        require(uf.size() == free.size(), "rel_error: size mismatch");
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < free.size(); ++k) {
            const auto& c = coords[free[k]];
            const double ue = exact.u(c[0], c[1], t);
            num += (uf[k] - ue) * (uf[k] - ue);
            den += ue * ue;
        }
        return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    };

    mp.rate = [coords, free, exact](double t) {
        Vec out(free.size());
        for (std::size_t k = 0; k < free.size(); ++k) {
            const auto& c = coords[free[k]];
            out[k] = exact.u_t(c[0], c[1], t);
        }
        return out;
    };
    return mp;
}

} // namespace irkprec
