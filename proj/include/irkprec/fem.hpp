#ifndef IRKPREC_FEM_HPP
#define IRKPREC_FEM_HPP

#include <functional>

#include "irkprec/csr.hpp"
#include "irkprec/mesh.hpp"

namespace irkprec {

/// Lagrange finite element space of degree p in {1,2} on a structured
/// triangulation. Nodes live on the lattice with spacing h/p, so an n x n
/// grid carries (p*n+1)^2 of them; boundary nodes are Dirichlet.
struct FemSpace {
    Mesh2D mesh;
    int p = 1;
    int nodes_per_side = 0; // p*n + 1
    std::vector<std::array<double, 2>> dof_coords;
    std::vector<int> dirichlet_dofs; // ascending
    std::vector<int> free_dofs;      // ascending
    std::vector<int> full_to_free;   // -1 on Dirichlet nodes

    int n_dofs() const { return static_cast<int>(dof_coords.size()); }
    int n_free() const { return static_cast<int>(free_dofs.size()); }
    int dofs_per_element() const { return p == 1 ? 3 : 6; }

    /// Global dof ids of one element, vertex dofs first, then (for p=2)
    /// the edge midpoints opposite to vertex 3, 1, 2.
    void element_dofs(int t, int out[6]) const;
};

FemSpace make_space(const Mesh2D& mesh, int p);

struct WindField {
    std::function<std::array<double, 2>(double, double)> eval;
};

/// Recirculating cavity wind (2y(1-x^2), -2x(1-y^2)): divergence free,
/// tangential on all four walls of [-1,1]^2.
std::array<double, 2> double_glazing_wind(double x, double y);
WindField make_double_glazing_wind();

/// Mass matrix over all dofs; symmetric positive definite.
CsrMatrix assemble_mass(const FemSpace& space);

/// eps * stiffness matrix over all dofs; symmetric, and positive
/// semidefinite with the constants in its kernel before elimination.
CsrMatrix assemble_diffusion(const FemSpace& space, double eps);

struct SupgMatrices {
    CsrMatrix F; // eps*diffusion + advection + streamline term
    CsrMatrix M; // mass + streamline perturbation of the time term
};

/// Streamline-upwind Petrov-Galerkin discretization of
/// (w . grad)u - eps lap(u) with linear elements. The test function
/// v + delta*(w . grad v) multiplies every term; per element,
/// delta = h_e/(2|w|) * max(0, 1 - 1/Pe) with Pe = |w| h_e / (2 eps).
SupgMatrices assemble_advection_supg(const FemSpace& space,
                                     const WindField& wind, double eps);

struct WallValues {
    double north = 0.0, south = 0.0, east = 0.0, west = 0.0;
    double at(Wall w) const;
};

struct EliminatedSystem {
    CsrMatrix M_ff; // free rows/columns
    CsrMatrix F_ff;
    Vec lift;   // full-length nodal boundary data g (zero at free dofs)
    Vec f_lift; // (F * g) restricted to free dofs
    Vec m_lift; // (M * g) restricted to free dofs
};

/// Strong Dirichlet elimination with lifting. Boundary values are constant
/// per wall; corner nodes on the East wall take the East value.
EliminatedSystem eliminate_dirichlet(const CsrMatrix& M, const CsrMatrix& F,
                                     const FemSpace& space, WallValues values);

CsrMatrix restrict_to_free(const CsrMatrix& A, const FemSpace& space);
Vec restrict_free(const FemSpace& space, std::span<const double> full);
/// (A * g) restricted to the free dofs.
Vec lift_product_free(const CsrMatrix& A, const FemSpace& space,
                      std::span<const double> g_full);

/// Closed-form space-time solution with the derivatives needed to build
/// forcing terms analytically.
struct ExactSolution {
    std::function<double(double, double, double)> u;   // u(x,y,t)
    std::function<double(double, double, double)> u_t;
    std::function<std::array<double, 2>(double, double, double)> grad;
    std::function<double(double, double, double)> lap;
};

/// u = exp(-t) sin(pi x) sin(pi y); vanishes on the boundary of both the
/// unit square and the biunit square.
ExactSolution decaying_sine_product();

struct ManufacturedProblem {
    /// Mass-weighted nodal forcing at time t, restricted to free dofs.
    std::function<Vec(double)> stage_forcing;
    /// Exact solution at t = 0, restricted to free dofs.
    Vec initial;
    /// Relative discrete l2 error of a free-dof vector against the exact
    /// solution at time t.
    std::function<double(const Vec&, double)> rel_error;
    /// Nodal du/dt at time t over the free dofs: the continuum stage
    /// value, used to manufacture exact solutions of the stage system.
    std::function<Vec(double)> rate;
};

/// Builds the forcing f = u_t + (w . grad)u - eps lap(u) for the given
/// exact solution (pass wind = nullptr and eps = 1 for the heat equation)
/// along with the initial vector and the error functional.
ManufacturedProblem manufactured_problem(const FemSpace& space,
                                         const CsrMatrix& M_full,
                                         const ExactSolution& exact,
                                         const WindField* wind, double eps);

} // namespace irkprec

#endif
