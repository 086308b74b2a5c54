#ifndef IRKPREC_SPARSE_LU_HPP
#define IRKPREC_SPARSE_LU_HPP

#include <memory>
#include <span>

#include "irkprec/csr.hpp"

namespace irkprec {

/// Pivoted sparse LU factorization of a square nonsingular matrix.
/// Repeated solves with the same factorization are bit-for-bit identical.
class SparseLu {
public:
    explicit SparseLu(const CsrMatrix& A);
    ~SparseLu();
    SparseLu(SparseLu&&) noexcept;
    SparseLu& operator=(SparseLu&&) noexcept;
    SparseLu(const SparseLu&) = delete;
    SparseLu& operator=(const SparseLu&) = delete;

    int size() const { return n_; }

    Vec solve(std::span<const double> b) const;
    void solve(std::span<const double> b, std::span<double> x) const;

    /// Solves A^T x = b with the same factorization.
    Vec solve_transposed(std::span<const double> b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int n_ = 0;
};

Vec lu_solve(const SparseLu& f, std::span<const double> b);

SparseLu sparse_lu_factor(const CsrMatrix& A);

} // namespace irkprec

#endif
