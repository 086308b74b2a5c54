#ifndef IRKPREC_EIGS_HPP
#define IRKPREC_EIGS_HPP

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "irkprec/dense.hpp"

namespace irkprec {

/// A square matrix given only through its action (and its transpose's).
struct LinearOperator {
    int n = 0;
    std::function<void(std::span<const double>, std::span<double>)> apply;
    std::function<void(std::span<const double>, std::span<double>)>
        apply_transpose; // may be empty when unsupported
};

LinearOperator dense_operator(const DenseMatrix& A);

/// All n eigenvalues of a real dense matrix (Hessenberg reduction plus
/// shifted QR underneath). Throws NumericalError on non-convergence.
std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& A);

/// All n singular values, descending.
std::vector<double> dense_singular_values(const DenseMatrix& A);

/// sigma_max / sigma_min via Golub-Kahan-Lanczos bidiagonalization with
/// full reorthogonalization; stops once both extreme singular values have
/// stabilized to three significant digits. Throws NumericalError (with the
/// partial estimates attached) if the iteration cap is reached first.
double condition_number_lanczos(const LinearOperator& op,
                                unsigned long seed = 0x2545F491u);

/// 2-norm condition number of an invertible operator: dense SVD after
/// materialization when n <= 8000, Lanczos bidiagonalization above.
double condition_number_2(const LinearOperator& op,
                          unsigned long seed = 0x2545F491u);

/// Materializes the operator column by column (n applications to unit
/// basis vectors). Columns are independent and assembled by index, so the
/// result is deterministic under parallel execution.
DenseMatrix materialize(const LinearOperator& op);

} // namespace irkprec

#endif
