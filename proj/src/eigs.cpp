#include "irkprec/eigs.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "irkprec/kernels.hpp"

namespace irkprec {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> as_eigen(const DenseMatrix& A) {
    return {A.values.data(), A.n_rows, A.n_cols};
}

} // namespace

LinearOperator dense_operator(const DenseMatrix& A) {
    require(A.n_rows == A.n_cols, "dense_operator: not square");
    LinearOperator op;
    op.n = A.n_rows;
    op.apply = [&A](std::span<const double> x, std::span<double> y) {
        const Vec r = dense_matvec(A, x);
        copy(r, y);
    };
    op.apply_transpose = [&A](std::span<const double> x, std::span<double> y) {
        for (int j = 0; j < A.n_cols; ++j) {
            double s = 0.0;
            for (int i = 0; i < A.n_rows; ++i) s += A(i, j) * x[i];
            y[j] = s;
        }
    };
    return op;
}

std::vector<std::complex<double>> dense_eigenvalues(const DenseMatrix& A) {
    require(A.n_rows == A.n_cols, "dense_eigenvalues: not square");
    require(A.n_rows <= 10000, "dense_eigenvalues: n exceeds analysis cap");
    Eigen::EigenSolver<Eigen::MatrixXd> es(as_eigen(A), false);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense_eigenvalues: QR iteration did not converge");
    std::vector<std::complex<double>> out(A.n_rows);
    for (int i = 0; i < A.n_rows; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

std::vector<double> dense_singular_values(const DenseMatrix& A) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(as_eigen(A));
    std::vector<double> out(svd.singularValues().size());
    for (int i = 0; i < svd.singularValues().size(); ++i)
        out[i] = svd.singularValues()[i];
    return out;
}

double condition_number_lanczos(const LinearOperator& op, unsigned long seed) {
    require(static_cast<bool>(op.apply), "condition_number: missing apply");
    require(static_cast<bool>(op.apply_transpose),
            "condition_number: Lanczos path needs a transpose apply");
    const int n = op.n;
    const int cap = std::min(n, 4000);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<Vec> V, U;
    Vec v(n), u(n), tmp(n);
    for (double& x : v) x = gauss(rng);
    scal(1.0 / nrm2(v), v);
    V.push_back(v);

    std::vector<double> alpha, beta;

    op.apply(V[0], u);
    double a = nrm2(u);
    if (a == 0.0) throw NumericalError("condition_number: operator annihilated "
                                       "the start vector");
    scal(1.0 / a, u);
    U.push_back(u);
    alpha.push_back(a);

    auto extremes = [&](int k) -> std::pair<double, double> {
        // Singular values of the k x k lower bidiagonal matrix.
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            B(i, i) = alpha[i];
            if (i + 1 < k) B(i + 1, i) = beta[i];
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
        return {svd.singularValues()(0), svd.singularValues()(k - 1)};
    };

    double prev_max = 0.0, prev_min = 0.0;
    bool have_prev = false;
    for (int k = 1; k <= cap; ++k) {
        // v_{k+1} = A^T u_k - alpha_k v_k, reorthogonalized
        op.apply_transpose(U[k - 1], tmp);
        axpy(-alpha[k - 1], V[k - 1], tmp);
        for (const Vec& vi : V) axpy(-dot(vi, tmp), vi, tmp);
        const double b = nrm2(tmp);

        const bool breakdown = (b <= 1e-14 * alpha[0]);
        const bool last = breakdown || k == cap || k == n;
        if (k % 5 == 0 || last) {
            auto [smax, smin] = extremes(k);
            if (smin <= 0.0)
                throw NumericalError(
                    "condition_number: operator looks singular",
                    {smax, smin});
            const bool stable =
                have_prev && std::fabs(smax - prev_max) <= 1e-5 * smax &&
                std::fabs(smin - prev_min) <= 1e-5 * smin;
            if (stable || breakdown || k == n) return smax / smin;
            if (k == cap)
                throw NumericalError(
                    "condition_number: Lanczos bidiagonalization did not "
                    "stabilize",
                    {smax, smin});
            prev_max = smax;
            prev_min = smin;
            have_prev = true;
        }

        scal(1.0 / b, tmp);
        V.push_back(tmp);
        beta.push_back(b);

        // u_{k+1} = A v_{k+1} - beta_k u_k, reorthogonalized
        op.apply(V[k], u);
        axpy(-b, U[k - 1], u);
        for (const Vec& ui : U) axpy(-dot(ui, u), ui, u);
        a = nrm2(u);
        if (a <= 1e-14 * alpha[0]) {
            auto [smax, smin] = extremes(k);
            if (smin <= 0.0)
                throw NumericalError("condition_number: operator looks "
                                     "singular",
                                     {smax, smin});
            return smax / smin;
        }
        scal(1.0 / a, u);
        U.push_back(u);
        alpha.push_back(a);
    }
    throw NumericalError("condition_number: iteration cap reached");
}

DenseMatrix materialize(const LinearOperator& op) {
    const int n = op.n;
    DenseMatrix A(n, n);
#pragma omp parallel
    {
        Vec e(n, 0.0), col(n);
#pragma omp for schedule(static)
        for (int j = 0; j < n; ++j) {
            e[j] = 1.0;
            op.apply(e, col);
            e[j] = 0.0;
            for (int i = 0; i < n; ++i) A(i, j) = col[i];
        }
    }
    return A;
}

double condition_number_2(const LinearOperator& op, unsigned long seed) {
    require(op.n >= 1, "condition_number: empty operator");
    if (op.n <= 8000) {
        const DenseMatrix A = materialize(op);
        const auto sv = dense_singular_values(A);
        if (sv.back() <= 0.0)
            throw NumericalError("condition_number: operator is singular",
                                 {sv.front(), sv.back()});
        return sv.front() / sv.back();
    }
    return condition_number_lanczos(op, seed);
}

} // namespace irkprec
