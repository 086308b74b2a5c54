#ifndef IRKPREC_DENSE_HPP
#define IRKPREC_DENSE_HPP

#include <span>
#include <vector>

#include "irkprec/common.hpp"

namespace irkprec {

/// Row-major dense matrix.
struct DenseMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<double> values; // n_rows * n_cols

    DenseMatrix() = default;
    DenseMatrix(int r, int c)
        : n_rows(r), n_cols(c),
          values(static_cast<std::size_t>(r) * static_cast<std::size_t>(c),
                 0.0) {}

    double& operator()(int i, int j) {
        return values[static_cast<std::size_t>(i) * n_cols + j];
    }
    double operator()(int i, int j) const {
        return values[static_cast<std::size_t>(i) * n_cols + j];
    }

    static DenseMatrix identity(int n);
};

Vec dense_matvec(const DenseMatrix& A, std::span<const double> x);

DenseMatrix dense_matmul(const DenseMatrix& A, const DenseMatrix& B);

double frobenius_norm(const DenseMatrix& A);

/// Solves A x = b in place via partially pivoted Gaussian elimination.
/// Intended for the small systems of this project (Butcher construction,
/// Hessenberg least squares pieces, test oracles).
Vec dense_solve(DenseMatrix A, Vec b);

/// Long-double variant, used where a few extra digits matter (collocation
/// solves against Vandermonde matrices).
std::vector<long double> dense_solve_ld(std::vector<long double> A,
                                        std::vector<long double> b, int n);

} // namespace irkprec

#endif
