#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "irkprec/csr.hpp"
#include "irkprec/eigs.hpp"
#include "irkprec/fem.hpp"
#include "irkprec/kernels.hpp"
#include "irkprec/sparse_lu.hpp"
#include "support/oracles.hpp"

using namespace irkprec;

TEST_CASE("triplet builder sums duplicates and sorts columns") {
    TripletBuilder b(2, 3);
    b.add(1, 2, 1.0);
    b.add(0, 1, 2.0);
    b.add(1, 2, 0.5);
    b.add(0, 0, -1.0);
    const CsrMatrix A = b.compress();
    A.validate();
    CHECK(A.nnz() == 3);
    CHECK(A.col_idx[0] == 0);
    CHECK(A.col_idx[1] == 1);
    CHECK(A.vals[2] == 1.5);
}

TEST_CASE("csr validation catches broken structure") {
    CsrMatrix A = CsrMatrix::identity(3);
    A.col_idx[1] = 5;
    CHECK_THROWS_AS(A.validate(), std::invalid_argument);
}

TEST_CASE("transpose, add and matmul against dense oracles") {
    const CsrMatrix A = oracle::random_sparse(15, 0.3, 41u);
    const CsrMatrix B = oracle::random_sparse(15, 0.3, 43u);
    const auto Ad = oracle::dense_from_csr(A);
    const auto Bd = oracle::dense_from_csr(B);
    const int n = 15;

    const auto Td = oracle::dense_from_csr(csr_transpose(A));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(Td[i * n + j] == Ad[j * n + i]);

    const auto Sd = oracle::dense_from_csr(csr_add(2.0, A, -0.5, B));
    for (int i = 0; i < n * n; ++i)
        CHECK(Sd[i] == doctest::Approx(2.0 * Ad[i] - 0.5 * Bd[i]).epsilon(1e-15));

    const auto Pd = oracle::dense_from_csr(csr_matmul(A, B));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double want = 0.0;
            for (int k = 0; k < n; ++k) want += Ad[i * n + k] * Bd[k * n + j];
            CHECK(Pd[i * n + j] == doctest::Approx(want).epsilon(1e-13));
        }
}

TEST_CASE("matrix market round trip preserves doubles") {
    const CsrMatrix A = oracle::random_sparse(12, 0.4, 57u);
    const std::string path = "mm_roundtrip_test.mtx";
    write_matrix_market(A, path);
    const CsrMatrix B = read_matrix_market(path);
    CHECK(B.n_rows == A.n_rows);
    CHECK(B.row_ptr == A.row_ptr);
    CHECK(B.col_idx == A.col_idx);
    CHECK(B.vals == A.vals);
    std::remove(path.c_str());
}

TEST_CASE("sparse lu: diagonal and constructed right-hand sides") {
    {
        TripletBuilder b(2, 2);
        b.add(0, 0, 2.0);
        b.add(1, 1, 4.0);
        const SparseLu f(b.compress());
        const Vec x = f.solve(Vec{1.0, 1.0});
        CHECK(x[0] == doctest::Approx(0.5));
        CHECK(x[1] == doctest::Approx(0.25));
    }
    {
        const CsrMatrix A = oracle::laplacian_1d(5);
        const Vec ones(5, 1.0);
        const Vec rhs = spmv(A, ones);
        const Vec x = SparseLu(A).solve(rhs);
        for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sparse lu: random 50x50 matches the dense elimination oracle") {
    const CsrMatrix A = oracle::random_sparse(50, 0.15, 61u);
    const Vec b = oracle::random_vec(50, 63u);
    const Vec x = SparseLu(A).solve(b);
    const auto want = oracle::solve(oracle::dense_from_csr(A), b, 50);
    for (int i = 0; i < 50; ++i)
        CHECK(x[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("sparse lu: residual on a FEM stiffness matrix, determinism") {
    const Mesh2D mesh = build_structured_mesh(Domain::UnitSquare, 16);
    const FemSpace space = make_space(mesh, 1);
    const CsrMatrix F = restrict_to_free(assemble_diffusion(space, 1.0), space);
    const SparseLu f(F);
    const Vec b = oracle::random_vec(F.n_rows, 71u);
    const Vec x1 = f.solve(b);
    const Vec x2 = f.solve(b);
    CHECK(x1 == x2); // bit-for-bit repeatable

    Vec r = spmv(F, x1);
    axpy(-1.0, b, r);
    CHECK(nrm2(r) <= 1e-10 * nrm2(b));

    const Vec zero(F.n_rows, 0.0);
    const Vec xz = f.solve(zero);
    for (double v : xz) CHECK(v == 0.0);
}

TEST_CASE("sparse lu: transposed solves") {
    const CsrMatrix A = oracle::random_sparse(30, 0.2, 73u);
    const Vec b = oracle::random_vec(30, 74u);
    const Vec x = SparseLu(A).solve_transposed(b);
    Vec atx = spmv(csr_transpose(A), x);
    axpy(-1.0, b, atx);
    CHECK(nrm2(atx) <= 1e-10 * nrm2(b));
}

TEST_CASE("sparse lu: singular matrix raises") {
    TripletBuilder b(2, 2);
    b.add(0, 0, 1.0);
    b.add(1, 0, 1.0); // second column empty -> structurally singular
    CHECK_THROWS_AS(SparseLu(b.compress()), SingularError);
}

TEST_CASE("dense eigenvalues: known spectra") {
    DenseMatrix D(3, 3);
    D(0, 0) = 1.0;
    D(1, 1) = 2.0;
    D(2, 2) = 3.0;
    auto eigs = dense_eigenvalues(D);
    std::sort(eigs.begin(), eigs.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    CHECK(eigs[0].real() == doctest::Approx(1.0));
    CHECK(eigs[1].real() == doctest::Approx(2.0));
    CHECK(eigs[2].real() == doctest::Approx(3.0));

    DenseMatrix R(2, 2);
    R(0, 1) = -1.0;
    R(1, 0) = 1.0;
    eigs = dense_eigenvalues(R);
    std::sort(eigs.begin(), eigs.end(),
              [](auto a, auto b) { return a.imag() < b.imag(); });
    CHECK(eigs[0].imag() == doctest::Approx(-1.0));
    CHECK(eigs[1].imag() == doctest::Approx(1.0));
    CHECK(eigs[0].real() == doctest::Approx(0.0).epsilon(1e-12));

    // companion matrix of (x-1)(x-2)(x-4) = x^3 - 7x^2 + 14x - 8
    DenseMatrix C(3, 3);
    C(0, 0) = 7.0;
    C(0, 1) = -14.0;
    C(0, 2) = 8.0;
    C(1, 0) = 1.0;
    C(2, 1) = 1.0;
    eigs = dense_eigenvalues(C);
    std::sort(eigs.begin(), eigs.end(),
              [](auto a, auto b) { return a.real() < b.real(); });
    CHECK(eigs[0].real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(eigs[1].real() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(eigs[2].real() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("condition numbers: identity and diagonal") {
    const DenseMatrix I = DenseMatrix::identity(6);
    CHECK(condition_number_2(dense_operator(I)) == doctest::Approx(1.0));

    DenseMatrix D(2, 2);
    D(0, 0) = 10.0;
    D(1, 1) = 1.0;
    CHECK(condition_number_2(dense_operator(D)) == doctest::Approx(10.0));
}

TEST_CASE("lanczos condition number matches the dense SVD oracle") {
    const CsrMatrix A = oracle::random_sparse(30, 0.4, 83u);
    DenseMatrix Ad(30, 30);
    {
        const auto flat = oracle::dense_from_csr(A);
        Ad.values = flat;
    }
    const double kl = condition_number_lanczos(dense_operator(Ad));
    const auto sv = dense_singular_values(Ad);
    const double want = sv.front() / sv.back();
    CHECK(std::fabs(kl - want) <= 1e-3 * want);
}

TEST_CASE("eigenvalues of A^T A match squared singular values") {
    const CsrMatrix A = oracle::random_sparse(20, 0.4, 97u);
    DenseMatrix Ad(20, 20);
    Ad.values = oracle::dense_from_csr(A);

    DenseMatrix AtA(20, 20);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            double v = 0.0;
            for (int k = 0; k < 20; ++k) v += Ad(k, i) * Ad(k, j);
            AtA(i, j) = v;
        }
    auto eigs = dense_eigenvalues(AtA);
    std::vector<double> ev;
    for (const auto& e : eigs) ev.push_back(e.real());
    std::sort(ev.begin(), ev.end(), std::greater<>());

    auto sv = dense_singular_values(Ad);
    for (int i = 0; i < 20; ++i)
        CHECK(std::fabs(ev[i] - sv[i] * sv[i]) <= 1e-6 * sv.front() * sv.front());
}
