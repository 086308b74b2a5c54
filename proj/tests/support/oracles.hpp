#ifndef IRKPREC_TEST_ORACLES_HPP
#define IRKPREC_TEST_ORACLES_HPP

// Self-contained reference implementations used as test oracles. These
// deliberately avoid the library's solver paths: dense storage, naive
// Gaussian elimination, explicit Kronecker products.

#include <complex>
#include <random>
#include <vector>

#include "irkprec/butcher.hpp"
#include "irkprec/csr.hpp"
#include "irkprec/dense.hpp"

namespace oracle {

using irkprec::CsrMatrix;
using irkprec::DenseMatrix;
using irkprec::Vec;

inline std::vector<double> matvec(const std::vector<double>& A,
                                  const std::vector<double>& x, int n) {
    std::vector<double> y(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) y[i] += A[i * n + j] * x[j];
    return y;
}

/// Partially pivoted Gaussian elimination on a row-major dense copy.
inline std::vector<double> solve(std::vector<double> A, std::vector<double> b,
                                 int n) {
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A[i * n + k]) > std::fabs(A[p * n + k])) p = i;
        for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
        std::swap(b[k], b[p]);
        for (int i = k + 1; i < n; ++i) {
            const double m = A[i * n + k] / A[k * n + k];
            for (int j = k; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= A[i * n + j] * b[j];
        b[i] /= A[i * n + i];
    }
    return b;
}

inline std::vector<std::complex<double>> solve_complex(
    std::vector<std::complex<double>> A, std::vector<std::complex<double>> b,
    int n) {
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A[i * n + k]) > std::abs(A[p * n + k])) p = i;
        for (int j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
        std::swap(b[k], b[p]);
        for (int i = k + 1; i < n; ++i) {
            const std::complex<double> m = A[i * n + k] / A[k * n + k];
            for (int j = k; j < n; ++j) A[i * n + j] -= m * A[k * n + j];
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) b[i] -= A[i * n + j] * b[j];
        b[i] /= A[i * n + i];
    }
    return b;
}

inline std::vector<double> dense_from_csr(const CsrMatrix& A) {
    std::vector<double> D(static_cast<std::size_t>(A.n_rows) * A.n_cols, 0.0);
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            D[static_cast<std::size_t>(i) * A.n_cols + A.col_idx[k]] =
                A.vals[k];
    return D;
}

/// Dense I_s (x) M + ht * A (x) F.
inline std::vector<double> kron_stage_dense(const CsrMatrix& M,
                                            const CsrMatrix& F,
                                            const DenseMatrix& A, double ht) {
    const int s = A.n_rows, n = M.n_rows, N = s * n;
    const auto Md = dense_from_csr(M);
    const auto Fd = dense_from_csr(F);
    std::vector<double> K(static_cast<std::size_t>(N) * N, 0.0);
    for (int bi = 0; bi < s; ++bi)
        for (int bj = 0; bj < s; ++bj)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = ht * A(bi, bj) * Fd[i * n + j];
                    if (bi == bj) v += Md[i * n + j];
                    K[static_cast<std::size_t>(bi * n + i) * N + bj * n + j] =
                        v;
                }
    return K;
}

/// Stability function R(z) = 1 + z b^T (I - z A)^{-1} 1.
inline std::complex<double> stability_function(const irkprec::ButcherTable& t,
                                               std::complex<double> z) {
    const int s = t.s;
    std::vector<std::complex<double>> M(static_cast<std::size_t>(s) * s);
    std::vector<std::complex<double>> rhs(s, 1.0);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            M[i * s + j] = (i == j ? 1.0 : 0.0) - z * t.A(i, j);
    const auto x = solve_complex(std::move(M), std::move(rhs), s);
    std::complex<double> acc = 0.0;
    for (int i = 0; i < s; ++i) acc += t.b[i] * x[i];
    return 1.0 + z * acc;
}

/// Random sparse-but-stored-dense test matrix with a dominant diagonal.
inline CsrMatrix random_sparse(int n, double density, unsigned seed,
                               double diag_boost = 4.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    irkprec::TripletBuilder b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j)
                b.add(i, j, diag_boost + unit(rng));
            else if (coin(rng) < density)
                b.add(i, j, unit(rng));
        }
    return b.compress();
}

inline Vec random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vec v(n);
    for (double& x : v) x = unit(rng);
    return v;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

/// 1D three-point Laplacian as a CSR fixture.
inline CsrMatrix laplacian_1d(int n) {
    irkprec::TripletBuilder b(n, n);
    for (int i = 0; i < n; ++i) {
        b.add(i, i, 2.0);
        if (i > 0) b.add(i, i - 1, -1.0);
        if (i + 1 < n) b.add(i, i + 1, -1.0);
    }
    return b.compress();
}

} // namespace oracle

#endif
