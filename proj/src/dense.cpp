#include "irkprec/dense.hpp"

#include <cmath>

namespace irkprec {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Vec dense_matvec(const DenseMatrix& A, std::span<const double> x) {
    require(static_cast<int>(x.size()) == A.n_cols,
            "dense_matvec: dimension mismatch");
    Vec y(static_cast<std::size_t>(A.n_rows), 0.0);
    for (int i = 0; i < A.n_rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.n_cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix dense_matmul(const DenseMatrix& A, const DenseMatrix& B) {
    require(A.n_cols == B.n_rows, "dense_matmul: shape mismatch");
    DenseMatrix C(A.n_rows, B.n_cols);
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = 0; k < A.n_cols; ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < B.n_cols; ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

double frobenius_norm(const DenseMatrix& A) {
    double s = 0.0;
    for (double v : A.values) s += v * v;
    return std::sqrt(s);
}

Vec dense_solve(DenseMatrix A, Vec b) {
    require(A.n_rows == A.n_cols, "dense_solve: not square");
    require(static_cast<int>(b.size()) == A.n_rows,
            "dense_solve: rhs size mismatch");
    const int n = A.n_rows;
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A(i, k)) > std::fabs(A(p, k))) p = i;
        if (A(p, k) == 0.0)
            throw SingularError("dense_solve: singular at column " +
                                    std::to_string(k),
                                k);
        piv[k] = p;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = A(i, k) / A(k, k);
            A(i, k) = m;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
        b[i] = s / A(i, i);
    }
    return b;
}

std::vector<long double> dense_solve_ld(std::vector<long double> A,
                                        std::vector<long double> b, int n) {
    auto at = [&](int i, int j) -> long double& { return A[i * n + j]; };
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (fabsl(at(i, k)) > fabsl(at(p, k))) p = i;
        if (at(p, k) == 0.0L)
            throw SingularError("dense_solve_ld: singular at column " +
                                    std::to_string(k),
                                k);
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            std::swap(b[k], b[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            const long double m = at(i, k) / at(k, k);
            for (int j = k + 1; j < n; ++j) at(i, j) -= m * at(k, j);
            b[i] -= m * b[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        long double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= at(i, j) * b[j];
        b[i] = s / at(i, i);
    }
    return b;
}

} // namespace irkprec
