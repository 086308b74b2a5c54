#include "irkprec/sparse_lu.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace irkprec {

struct SparseLu::Impl {
    Eigen::SparseMatrix<double> mat; // keeps the factorization's referand alive
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

SparseLu::SparseLu(const CsrMatrix& A) : impl_(new Impl), n_(A.n_rows) {
    require(A.square(), "sparse_lu: matrix must be square");
    require(A.n_rows > 0, "sparse_lu: empty matrix");

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.vals.size());
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            trips.emplace_back(i, A.col_idx[k], A.vals[k]);
    impl_->mat.resize(A.n_rows, A.n_cols);
    impl_->mat.setFromTriplets(trips.begin(), trips.end());
    impl_->mat.makeCompressed();

    impl_->lu.isSymmetric(false);
    impl_->lu.analyzePattern(impl_->mat);
    impl_->lu.factorize(impl_->mat);
    if (impl_->lu.info() != Eigen::Success)
        throw SingularError("sparse_lu: matrix is structurally or numerically "
                            "singular: " +
                            impl_->lu.lastErrorMessage());
}

SparseLu::~SparseLu() = default;
SparseLu::SparseLu(SparseLu&&) noexcept = default;
SparseLu& SparseLu::operator=(SparseLu&&) noexcept = default;

void SparseLu::solve(std::span<const double> b, std::span<double> x) const {
    require(static_cast<int>(b.size()) == n_, "lu_solve: rhs size mismatch");
    require(static_cast<int>(x.size()) == n_, "lu_solve: out size mismatch");
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), n_);
    Eigen::Map<Eigen::VectorXd> xm(x.data(), n_);
    xm = impl_->lu.solve(bm);
}

Vec SparseLu::solve(std::span<const double> b) const {
    Vec x(static_cast<std::size_t>(n_));
    solve(b, x);
    return x;
}

Vec SparseLu::solve_transposed(std::span<const double> b) const {
    require(static_cast<int>(b.size()) == n_, "lu_solve: rhs size mismatch");
    Vec x(static_cast<std::size_t>(n_));
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), n_);
    Eigen::Map<Eigen::VectorXd> xm(x.data(), n_);
    xm = impl_->lu.transpose().solve(bm);
    return x;
}

Vec lu_solve(const SparseLu& f, std::span<const double> b) {
    return f.solve(b);
}

SparseLu sparse_lu_factor(const CsrMatrix& A) { return SparseLu(A); }

} // namespace irkprec
