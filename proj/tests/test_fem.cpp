#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "irkprec/eigs.hpp"
#include "irkprec/fem.hpp"
#include "irkprec/kernels.hpp"
#include "irkprec/sparse_lu.hpp"
#include "support/oracles.hpp"

using namespace irkprec;

namespace {

double entry(const CsrMatrix& A, int i, int j) {
    for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
        if (A.col_idx[k] == j) return A.vals[k];
    return 0.0;
}

double max_abs_entry_diff(const CsrMatrix& A, const CsrMatrix& B) {
    double m = 0.0;
    for (int i = 0; i < A.n_rows; ++i) {
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            m = std::max(m, std::fabs(A.vals[k] - entry(B, i, A.col_idx[k])));
        for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k)
            m = std::max(m, std::fabs(B.vals[k] - entry(A, i, B.col_idx[k])));
    }
    return m;
}

} // namespace

TEST_CASE("mesh text export lists nodes then elements") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 2);
    const std::string path = "mesh_export_test.txt";
    write_mesh_text(mesh, path);
    std::ifstream in(path);
    std::string tag;
    std::size_t count;
    in >> tag >> count;
    CHECK(tag == "nodes");
    CHECK(count == mesh.vertices.size());
    for (std::size_t v = 0; v < count; ++v) {
        std::size_t id;
        double x, y;
        in >> id >> x >> y;
        CHECK(x == mesh.vertices[v][0]);
        CHECK(y == mesh.vertices[v][1]);
    }
    in >> tag >> count;
    CHECK(tag == "elements");
    CHECK(count == mesh.triangles.size());
    std::remove(path.c_str());
}

TEST_CASE("structured mesh: counts, areas, boundary loop") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 2);
    CHECK(mesh.vertices.size() == 9);
    CHECK(mesh.triangles.size() == 8);
    CHECK(mesh.boundary_edges.size() == 8);
    const double want = mesh.h() * mesh.h() / 2.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        CHECK(triangle_area(mesh, static_cast<int>(t)) ==
              doctest::Approx(want).epsilon(1e-14));

    // Boundary edges form a closed loop: every boundary vertex twice.
    std::map<int, int> incidence;
    for (const auto& e : mesh.boundary_edges) {
        incidence[e.v0] += 1;
        incidence[e.v1] += 1;
    }
    CHECK(incidence.size() == 8); // all but the center vertex
    for (const auto& [v, cnt] : incidence) CHECK(cnt == 2);

    CHECK_THROWS_AS(build_structured_mesh(Domain::UnitSquare, 1),
                    std::invalid_argument);
}

TEST_CASE("space: node counts and free/dirichlet partition") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 4);
    for (int p : {1, 2}) {
        const FemSpace sp = make_space(mesh, p);
        const int nps = p * 4 + 1;
        CHECK(sp.n_dofs() == nps * nps);
        CHECK(sp.n_free() == (nps - 2) * (nps - 2));
        CHECK(sp.free_dofs.size() + sp.dirichlet_dofs.size() ==
              static_cast<std::size_t>(sp.n_dofs()));
    }
}

TEST_CASE("mass matrix: partition of unity, symmetry, P1 element oracle") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 4);
    for (int p : {1, 2}) {
        const FemSpace sp = make_space(mesh, p);
        const CsrMatrix M = assemble_mass(sp);
        double sum = 0.0;
        for (double v : M.vals) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(max_abs_entry_diff(M, csr_transpose(M)) <= 1e-16);
    }

    // P1 element oracle: exact triangle integrals give area/6 on the
    // diagonal and area/12 off it; accumulate and compare entrywise.
    const FemSpace sp = make_space(mesh, 1);
    const CsrMatrix M = assemble_mass(sp);
    TripletBuilder hand(sp.n_dofs(), sp.n_dofs());
    int dofs[6];
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double area = triangle_area(mesh, static_cast<int>(t));
        sp.element_dofs(static_cast<int>(t), dofs);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                hand.add(dofs[a], dofs[b], a == b ? area / 6.0 : area / 12.0);
    }
    CHECK(max_abs_entry_diff(M, hand.compress()) <= 1e-15);
}

TEST_CASE("diffusion: zero row sums, P1 five-point stencil, SPD on free dofs") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 4);
    const FemSpace sp = make_space(mesh, 1);
    const CsrMatrix F = assemble_diffusion(sp, 1.0);
    for (int i = 0; i < F.n_rows; ++i) {
        double rs = 0.0;
        for (int k = F.row_ptr[i]; k < F.row_ptr[i + 1]; ++k) rs += F.vals[k];
        CHECK(std::fabs(rs) <= 1e-12);
    }

    // Interior vertex (2,2) on the 4x4 grid: 4 on the diagonal, -1 to the
    // four grid neighbors, 0 along the split diagonal.
    const int nps = sp.nodes_per_side;
    const int c = 2 * nps + 2;
    CHECK(entry(F, c, c) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(entry(F, c, c + 1) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(entry(F, c, c - 1) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(entry(F, c, c + nps) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(entry(F, c, c - nps) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK(std::fabs(entry(F, c, c + nps + 1)) <= 1e-13);
    CHECK(std::fabs(entry(F, c, c - nps - 1)) <= 1e-13);

    const Mesh2D mesh8 = build_structured_mesh(Domain::UnitSquare, 8);
    for (int p : {1, 2}) {
        const FemSpace sp8 = make_space(mesh8, p);
        const CsrMatrix Fff =
            restrict_to_free(assemble_diffusion(sp8, 1.0), sp8);
        DenseMatrix D(Fff.n_rows, Fff.n_rows);
        D.values = oracle::dense_from_csr(Fff);
        const auto eigs = dense_eigenvalues(D);
        for (const auto& ev : eigs) CHECK(ev.real() > 0.0);
    }
}

TEST_CASE("double glazing wind: values and divergence") {
    const auto w0 = double_glazing_wind(0.0, 0.0);
    CHECK(w0[0] == 0.0);
    CHECK(w0[1] == 0.0);
    const auto w1 = double_glazing_wind(0.0, 1.0);
    CHECK(w1[0] == doctest::Approx(2.0));
    CHECK(w1[1] == doctest::Approx(0.0));

    // divergence vanishes analytically; sample with central differences
    const double h = 1e-5;
    for (const auto& [x, y] : std::vector<std::pair<double, double>>{
             {0.3, -0.7}, {-0.9, 0.2}, {0.5, 0.5}}) {
        const double div =
            (double_glazing_wind(x + h, y)[0] - double_glazing_wind(x - h, y)[0] +
             double_glazing_wind(x, y + h)[1] - double_glazing_wind(x, y - h)[1]) /
            (2.0 * h);
        CHECK(std::fabs(div) <= 1e-9);
    }

    // zero normal component on the walls
    for (double t : {-1.0, -0.25, 0.5, 1.0}) {
        CHECK(double_glazing_wind(1.0, t)[0] == 0.0);
        CHECK(double_glazing_wind(-1.0, t)[0] == 0.0);
        CHECK(double_glazing_wind(t, 1.0)[1] == 0.0);
        CHECK(double_glazing_wind(t, -1.0)[1] == 0.0);
    }
}

TEST_CASE("supg: zero wind reduces to mass and scaled diffusion") {
    const Mesh2D mesh = build_structured_mesh(Domain::BiUnitSquare, 8);
    const FemSpace sp = make_space(mesh, 1);
    const WindField still{[](double, double) {
        return std::array<double, 2>{0.0, 0.0};
    }};
    const double eps = 1.0;
    const SupgMatrices supg = assemble_advection_supg(sp, still, eps);
    CHECK(max_abs_entry_diff(supg.F, assemble_diffusion(sp, eps)) <= 1e-14);
    CHECK(max_abs_entry_diff(supg.M, assemble_mass(sp)) <= 1e-14);
}

TEST_CASE("supg: diffusion-dominated cells switch the stabilization off") {
    // n=16 on the cavity with eps=10 keeps every element Peclet below 1,
    // so the mass matrix must come out pure Galerkin.
    const Mesh2D mesh = build_structured_mesh(Domain::BiUnitSquare, 16);
    const FemSpace sp = make_space(mesh, 1);
    const SupgMatrices supg =
        assemble_advection_supg(sp, make_double_glazing_wind(), 10.0);
    CHECK(max_abs_entry_diff(supg.M, assemble_mass(sp)) <= 1e-14);
}

TEST_CASE("supg: constant wind advection matches the exact element integrals") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 2);
    const FemSpace sp = make_space(mesh, 1);
    const WindField wind{[](double, double) {
        return std::array<double, 2>{1.0, 0.0};
    }};
    // h_e = sqrt(2)/2, |w| = 1, eps = 1 -> Pe < 1 -> delta = 0 everywhere.
    const SupgMatrices supg = assemble_advection_supg(sp, wind, 1.0);
    const CsrMatrix adv =
        csr_add(1.0, supg.F, -1.0, assemble_diffusion(sp, 1.0));

    // Exact integral: grad(phi_b) constant, integral of phi_a = area/3.
    TripletBuilder hand(sp.n_dofs(), sp.n_dofs());
    int dofs[6];
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto& v0 = mesh.vertices[tri[0]];
        const auto& v1 = mesh.vertices[tri[1]];
        const auto& v2 = mesh.vertices[tri[2]];
        const double area = triangle_area(mesh, static_cast<int>(t));
        const double gx[3] = {(v1[1] - v2[1]) / (2.0 * area),
                              (v2[1] - v0[1]) / (2.0 * area),
                              (v0[1] - v1[1]) / (2.0 * area)};
        sp.element_dofs(static_cast<int>(t), dofs);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                hand.add(dofs[a], dofs[b], gx[b] * area / 3.0);
    }
    CHECK(max_abs_entry_diff(adv, hand.compress()) <= 1e-13);
}

TEST_CASE("dirichlet elimination: homogeneous case and east-wall lift") {
    const Mesh2D mesh = build_structured_mesh(Domain::BiUnitSquare, 2);
    const FemSpace sp = make_space(mesh, 1);
    const CsrMatrix M = assemble_mass(sp);
    const CsrMatrix F = assemble_diffusion(sp, 1.0);

    const EliminatedSystem homog = eliminate_dirichlet(M, F, sp, {});
    for (double v : homog.lift) CHECK(v == 0.0);
    for (double v : homog.f_lift) CHECK(v == 0.0);
    CHECK(homog.M_ff.n_rows == sp.n_free());
    // principal submatrix check
    CHECK(homog.M_ff.vals[0] ==
          entry(M, sp.free_dofs[0], sp.free_dofs[0]));

    WallValues walls;
    walls.east = 1.0;
    const EliminatedSystem hot = eliminate_dirichlet(M, F, sp, walls);
    int ones = 0;
    const int nps = sp.nodes_per_side;
    for (int id : sp.dirichlet_dofs) {
        if (id % nps == nps - 1) {
            CHECK(hot.lift[id] == 1.0);
            ones += 1;
        } else {
            CHECK(hot.lift[id] == 0.0);
        }
    }
    CHECK(ones == 3);
}

TEST_CASE("dirichlet elimination: harmonic extension obeys the max principle") {
    const Mesh2D mesh = build_structured_mesh(Domain::BiUnitSquare, 16);
    const FemSpace sp = make_space(mesh, 1);
    const CsrMatrix M = assemble_mass(sp);
    const CsrMatrix F = assemble_diffusion(sp, 1.0);
    WallValues walls;
    walls.east = 1.0;
    const EliminatedSystem sys = eliminate_dirichlet(M, F, sp, walls);

    Vec rhs = sys.f_lift;
    scal(-1.0, rhs);
    const Vec u = SparseLu(sys.F_ff).solve(rhs);
    for (double v : u) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("patch test: affine functions are in the stiffness kernel on free dofs") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 8);
    const FemSpace sp = make_space(mesh, 1);
    const CsrMatrix F = assemble_diffusion(sp, 1.0);
    Vec u(sp.n_dofs());
    for (int i = 0; i < sp.n_dofs(); ++i)
        u[i] = 0.7 + 1.3 * sp.dof_coords[i][0] - 2.1 * sp.dof_coords[i][1];
    const Vec r = lift_product_free(F, sp, u);
    for (double v : r) CHECK(std::fabs(v) <= 1e-11);
}

TEST_CASE("manufactured problem: zero and steady exact solutions") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 4);
    const FemSpace sp = make_space(mesh, 2);
    const CsrMatrix M = assemble_mass(sp);

    ExactSolution zero;
    zero.u = [](double, double, double) { return 0.0; };
    zero.u_t = zero.u;
    zero.lap = zero.u;
    zero.grad = [](double, double, double) {
        return std::array<double, 2>{0.0, 0.0};
    };
    const ManufacturedProblem mp0 =
        manufactured_problem(sp, M, zero, nullptr, 1.0);
    for (double v : mp0.stage_forcing(0.7)) CHECK(v == 0.0);
    for (double v : mp0.initial) CHECK(v == 0.0);
    CHECK(mp0.rel_error(mp0.initial, 0.3) == 0.0);

    ExactSolution steady; // u = x*y: harmonic, time independent
    steady.u = [](double x, double y, double) { return x * y; };
    steady.u_t = [](double, double, double) { return 0.0; };
    steady.lap = [](double, double, double) { return 0.0; };
    steady.grad = [](double x, double y, double) {
        return std::array<double, 2>{y, x};
    };
    const ManufacturedProblem mps =
        manufactured_problem(sp, M, steady, nullptr, 1.0);
    CHECK(oracle::max_abs_diff(mps.stage_forcing(0.1), mps.stage_forcing(0.9)) ==
          0.0);
}

TEST_CASE("manufactured problem: decaying sine product forcing formula") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 4);
    const FemSpace sp = make_space(mesh, 2);
    const CsrMatrix M = assemble_mass(sp);
    const ManufacturedProblem mp =
        manufactured_problem(sp, M, decaying_sine_product(), nullptr, 1.0);

    const double t = 0.37;
    constexpr double pi = 3.14159265358979323846;
    Vec f(sp.n_dofs());
    for (int i = 0; i < sp.n_dofs(); ++i)
        f[i] = (2.0 * pi * pi - 1.0) * std::exp(-t) *
               std::sin(pi * sp.dof_coords[i][0]) *
               std::sin(pi * sp.dof_coords[i][1]);
    const Vec want = restrict_free(sp, spmv(M, f));
    CHECK(oracle::max_abs_diff(mp.stage_forcing(t), want) <= 1e-14);
}

TEST_CASE("steady Poisson convergence reaches order p+1") {
    for (int p : {1, 2}) {
        std::vector<double> errs;
        for (int n : {8, 16, 32}) {
            const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, n);
            const FemSpace sp = make_space(mesh, p);
            const CsrMatrix M = assemble_mass(sp);
            const CsrMatrix F = assemble_diffusion(sp, 1.0);
            const EliminatedSystem sys = eliminate_dirichlet(M, F, sp, {});

            // -lap u = f with u = sin(pi x) sin(pi y)
            constexpr double pi = 3.14159265358979323846;
            Vec f(sp.n_dofs());
            for (int i = 0; i < sp.n_dofs(); ++i)
                f[i] = 2.0 * pi * pi * std::sin(pi * sp.dof_coords[i][0]) *
                       std::sin(pi * sp.dof_coords[i][1]);
            const Vec rhs = restrict_free(sp, spmv(M, f));
            const Vec u = SparseLu(sys.F_ff).solve(rhs);

            double num = 0.0, den = 0.0;
            for (int k = 0; k < sp.n_free(); ++k) {
                const auto& c = sp.dof_coords[sp.free_dofs[k]];
                const double ue = std::sin(pi * c[0]) * std::sin(pi * c[1]);
                num += (u[k] - ue) * (u[k] - ue);
                den += ue * ue;
            }
            errs.push_back(std::sqrt(num / den));
        }
        const double order1 = std::log2(errs[0] / errs[1]);
        const double order2 = std::log2(errs[1] / errs[2]);
        CHECK(order1 >= p + 0.9);
        CHECK(order2 >= p + 0.9);
    }
}

TEST_CASE("mass and stiffness extremes scale like h^2 and 1") {
    auto norms = [](int n) {
        const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, n);
        const FemSpace sp = make_space(mesh, 2);
        return std::pair{assemble_mass(sp).max_abs(),
                         assemble_diffusion(sp, 1.0).max_abs()};
    };
    const auto [m8, f8] = norms(8);
    const auto [m16, f16] = norms(16);
    CHECK(std::fabs(m8 / m16 - 4.0) <= 0.15 * 4.0);
    CHECK(std::fabs(f8 / f16 - 1.0) <= 0.15);
}
