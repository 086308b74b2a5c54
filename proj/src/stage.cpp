#include "irkprec/stage.hpp"

#include <chrono>
#include <cmath>

#include "irkprec/kernels.hpp"

namespace irkprec {

std::string subsolver_name(SubsolverKind k) {
    return k == SubsolverKind::ExactLU ? "lu" : "amg";
}

StageOperator::StageOperator(std::shared_ptr<const CsrMatrix> M,
                             std::shared_ptr<const CsrMatrix> F, DenseMatrix A,
                             double ht, bool with_transpose)
    : M_(std::move(M)), F_(std::move(F)), A_(std::move(A)), ht_(ht),
      s_(A_.n_rows), n_(M_->n_rows) {
    require(A_.n_rows == A_.n_cols, "stage operator: A must be square");
    require(M_->square() && F_->square(), "stage operator: M, F must be square");
    require(M_->n_rows == F_->n_rows, "stage operator: M, F size mismatch");
    if (with_transpose) {
        Mt_ = std::make_shared<const CsrMatrix>(csr_transpose(*M_));
        Ft_ = std::make_shared<const CsrMatrix>(csr_transpose(*F_));
    }
}

void StageOperator::apply(std::span<const double> v,
                          std::span<double> y) const {
    require(static_cast<int>(v.size()) == size(),
            "stage_apply: dimension mismatch");
    require(static_cast<int>(y.size()) == size(),
            "stage_apply: dimension mismatch");
    // Fv_j once per block column, reused for every block row.
    std::vector<Vec> Fv(s_);
    for (int j = 0; j < s_; ++j)
        Fv[j] = spmv(*F_, v.subspan(static_cast<std::size_t>(j) * n_, n_));
    Vec tmp(n_);
    for (int i = 0; i < s_; ++i) {
        auto yi = y.subspan(static_cast<std::size_t>(i) * n_, n_);
        spmv(*M_, v.subspan(static_cast<std::size_t>(i) * n_, n_), yi);
        for (int j = 0; j < s_; ++j) axpy(ht_ * A_(i, j), Fv[j], yi);
    }
}

Vec StageOperator::apply(std::span<const double> v) const {
    Vec y(static_cast<std::size_t>(size()));
    apply(v, y);
    return y;
}

void StageOperator::apply_transpose(std::span<const double> v,
                                    std::span<double> y) const {
    require(Mt_ != nullptr, "stage operator built without transpose support");
    require(static_cast<int>(v.size()) == size() &&
                static_cast<int>(y.size()) == size(),
            "stage_apply: dimension mismatch");
    std::vector<Vec> Fv(s_);
    for (int j = 0; j < s_; ++j)
        Fv[j] = spmv(*Ft_, v.subspan(static_cast<std::size_t>(j) * n_, n_));
    for (int i = 0; i < s_; ++i) {
        auto yi = y.subspan(static_cast<std::size_t>(i) * n_, n_);
        spmv(*Mt_, v.subspan(static_cast<std::size_t>(i) * n_, n_), yi);
        for (int j = 0; j < s_; ++j) axpy(ht_ * A_(j, i), Fv[j], yi);
    }
}

Vec stage_apply(const StageOperator& op, std::span<const double> v) {
    return op.apply(v);
}

BlockPreconditioner::BlockPreconditioner(std::shared_ptr<const CsrMatrix> M,
                                         std::shared_ptr<const CsrMatrix> F,
                                         PrecondCoeff coeff, double ht,
                                         SubsolverKind kind,
                                         AmgParams amg_params,
                                         bool with_transpose)
    : M_(std::move(M)), F_(std::move(F)), coeff_(std::move(coeff)), ht_(ht),
      kind_(kind), s_(coeff_.Atilde.n_rows), n_(M_->n_rows) {
    require(M_->square() && F_->square() && M_->n_rows == F_->n_rows,
            "block preconditioner: M, F size mismatch");
    const auto t0 = std::chrono::steady_clock::now();

    // One prepared subsolver per distinct diagonal coefficient.
    std::vector<double> distinct;
    solver_of_block_.resize(s_);
    for (int j = 0; j < s_; ++j) {
        const double d = coeff_.Atilde(j, j);
        int idx = -1;
        for (std::size_t k = 0; k < distinct.size(); ++k)
            if (distinct[k] == d) idx = static_cast<int>(k);
        if (idx < 0) {
            idx = static_cast<int>(distinct.size());
            distinct.push_back(d);
        }
        solver_of_block_[j] = idx;
    }
    for (double d : distinct) {
        const CsrMatrix B = csr_add(1.0, *M_, ht_ * d, *F_);
        if (kind_ == SubsolverKind::ExactLU) {
            lus_.emplace_back(B);
        } else {
            amgs_.push_back(amg_setup(B, amg_params));
            amg_stats_.push_back(amg_stats(amgs_.back()));
        }
    }
    if (with_transpose)
        Ft_ = std::make_shared<const CsrMatrix>(csr_transpose(*F_));

    setup_seconds_ =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
}

int BlockPreconditioner::distinct_subsolvers() const {
    return static_cast<int>(kind_ == SubsolverKind::ExactLU ? lus_.size()
                                                            : amgs_.size());
}

void BlockPreconditioner::subsolve(int block, std::span<const double> rhs,
                                   std::span<double> w) const {
    const int idx = solver_of_block_[block];
    if (kind_ == SubsolverKind::ExactLU)
        lus_[idx].solve(rhs, w);
    else
        amg_vcycle(amgs_[idx], rhs, w);
}

void BlockPreconditioner::subsolve_transposed(int block,
                                              std::span<const double> rhs,
                                              std::span<double> w) const {
    require(kind_ == SubsolverKind::ExactLU,
            "transposed preconditioner application needs exact subsolves");
    const Vec x = lus_[solver_of_block_[block]].solve_transposed(rhs);
    copy(x, w);
}

void BlockPreconditioner::apply(std::span<const double> v,
                                std::span<double> w) const {
    require(static_cast<int>(v.size()) == size() &&
                static_cast<int>(w.size()) == size(),
            "precond_apply: dimension mismatch");
    auto vblk = [&](int j) {
        return v.subspan(static_cast<std::size_t>(j) * n_, n_);
    };
    auto wblk = [&](int j) {
        return w.subspan(static_cast<std::size_t>(j) * n_, n_);
    };

    switch (coeff_.structure) {
    case CoeffStructure::Diagonal:
        for (int j = 0; j < s_; ++j) subsolve(j, vblk(j), wblk(j));
        break;
    case CoeffStructure::LowerTriangular: {
        // Forward substitution; F*w_k is formed once per completed block.
        std::vector<Vec> Fw(s_);
        Vec rhs(n_);
        for (int j = 0; j < s_; ++j) {
            copy(vblk(j), rhs);
            for (int k = 0; k < j; ++k)
                if (coeff_.Atilde(j, k) != 0.0)
                    axpy(-ht_ * coeff_.Atilde(j, k), Fw[k], rhs);
            subsolve(j, rhs, wblk(j));
            if (j + 1 < s_) Fw[j] = spmv(*F_, wblk(j));
        }
        break;
    }
    case CoeffStructure::UpperTriangular: {
        std::vector<Vec> Fw(s_);
        Vec rhs(n_);
        for (int j = s_ - 1; j >= 0; --j) {
            copy(vblk(j), rhs);
            for (int k = j + 1; k < s_; ++k)
                if (coeff_.Atilde(j, k) != 0.0)
                    axpy(-ht_ * coeff_.Atilde(j, k), Fw[k], rhs);
            subsolve(j, rhs, wblk(j));
            if (j > 0) Fw[j] = spmv(*F_, wblk(j));
        }
        break;
    }
    }
}

Vec BlockPreconditioner::apply(std::span<const double> v) const {
    Vec w(static_cast<std::size_t>(size()));
    apply(v, w);
    return w;
}

void BlockPreconditioner::apply_transpose(std::span<const double> v,
                                          std::span<double> w) const {
    require(static_cast<int>(v.size()) == size() &&
                static_cast<int>(w.size()) == size(),
            "precond_apply: dimension mismatch");
    require(Ft_ != nullptr || coeff_.structure == CoeffStructure::Diagonal,
            "block preconditioner built without transpose support");
    auto vblk = [&](int j) {
        return v.subspan(static_cast<std::size_t>(j) * n_, n_);
    };
    auto wblk = [&](int j) {
        return w.subspan(static_cast<std::size_t>(j) * n_, n_);
    };

    // P^T = I (x) M^T + ht Atilde^T (x) F^T: the block triangle flips.
    switch (coeff_.structure) {
    case CoeffStructure::Diagonal:
        for (int j = 0; j < s_; ++j)
            subsolve_transposed(j, vblk(j), wblk(j));
        break;
    case CoeffStructure::LowerTriangular: {
        std::vector<Vec> Fw(s_);
        Vec rhs(n_);
        for (int j = s_ - 1; j >= 0; --j) {
            copy(vblk(j), rhs);
            for (int k = j + 1; k < s_; ++k)
                if (coeff_.Atilde(k, j) != 0.0)
                    axpy(-ht_ * coeff_.Atilde(k, j), Fw[k], rhs);
            subsolve_transposed(j, rhs, wblk(j));
            if (j > 0) Fw[j] = spmv(*Ft_, wblk(j));
        }
        break;
    }
    case CoeffStructure::UpperTriangular: {
        std::vector<Vec> Fw(s_);
        Vec rhs(n_);
        for (int j = 0; j < s_; ++j) {
            copy(vblk(j), rhs);
            for (int k = 0; k < j; ++k)
                if (coeff_.Atilde(k, j) != 0.0)
                    axpy(-ht_ * coeff_.Atilde(k, j), Fw[k], rhs);
            subsolve_transposed(j, rhs, wblk(j));
            if (j + 1 < s_) Fw[j] = spmv(*Ft_, wblk(j));
        }
        break;
    }
    }
}

Vec precond_apply(const BlockPreconditioner& P, std::span<const double> v) {
    return P.apply(v);
}

} // namespace irkprec
