#ifndef IRKPREC_STAGE_HPP
#define IRKPREC_STAGE_HPP

#include <memory>

#include "irkprec/amg.hpp"
#include "irkprec/butcher.hpp"
#include "irkprec/csr.hpp"
#include "irkprec/sparse_lu.hpp"

namespace irkprec {

/// Matrix-free Kronecker stage operator I_s (x) M + ht * A (x) F acting on
/// block vectors of s spatial components. One apply costs s products with
/// F (reused across block rows) and s with M.
class StageOperator {
public:
    StageOperator(std::shared_ptr<const CsrMatrix> M,
                  std::shared_ptr<const CsrMatrix> F, DenseMatrix A, double ht,
                  bool with_transpose = false);

    int stages() const { return s_; }
    int block_size() const { return n_; }
    int size() const { return s_ * n_; }
    double timestep() const { return ht_; }
    const DenseMatrix& coeff() const { return A_; }
    const CsrMatrix& M() const { return *M_; }
    const CsrMatrix& F() const { return *F_; }

    void apply(std::span<const double> v, std::span<double> y) const;
    Vec apply(std::span<const double> v) const;

    /// Needs with_transpose = true at construction.
    void apply_transpose(std::span<const double> v, std::span<double> y) const;

private:
    std::shared_ptr<const CsrMatrix> M_, F_;
    std::shared_ptr<const CsrMatrix> Mt_, Ft_;
    DenseMatrix A_;
    double ht_;
    int s_, n_;
};

Vec stage_apply(const StageOperator& op, std::span<const double> v);

enum class SubsolverKind { ExactLU, AmgVcycle };

std::string subsolver_name(SubsolverKind k);

/// Block preconditioner I_s (x) M + ht * Atilde (x) F for diagonal or
/// triangular Atilde, applied by block substitution. Every application
/// performs exactly one subsolve per block; repeated diagonal coefficients
/// share one prepared subsolver.
class BlockPreconditioner {
public:
    BlockPreconditioner(std::shared_ptr<const CsrMatrix> M,
                        std::shared_ptr<const CsrMatrix> F, PrecondCoeff coeff,
                        double ht, SubsolverKind kind,
                        AmgParams amg_params = {}, bool with_transpose = false);

    int stages() const { return s_; }
    int block_size() const { return n_; }
    int size() const { return s_ * n_; }
    const PrecondCoeff& coeff() const { return coeff_; }
    SubsolverKind subsolver() const { return kind_; }
    double setup_seconds() const { return setup_seconds_; }
    int distinct_subsolvers() const;
    /// Per distinct subsolver, empty for ExactLU.
    const std::vector<AmgStats>& hierarchy_stats() const { return amg_stats_; }

    /// w = P^{-1} v (one V-cycle standing in for each block solve when the
    /// subsolver is AmgVcycle).
    void apply(std::span<const double> v, std::span<double> w) const;
    Vec apply(std::span<const double> v) const;

    /// w = P^{-T} v; exact subsolves only.
    void apply_transpose(std::span<const double> v, std::span<double> w) const;

private:
    void subsolve(int block, std::span<const double> rhs,
                  std::span<double> w) const;
    void subsolve_transposed(int block, std::span<const double> rhs,
                             std::span<double> w) const;

    std::shared_ptr<const CsrMatrix> M_, F_, Ft_;
    PrecondCoeff coeff_;
    double ht_;
    SubsolverKind kind_;
    int s_, n_;
    std::vector<int> solver_of_block_;
    std::vector<SparseLu> lus_;
    std::vector<AmgHierarchy> amgs_;
    std::vector<AmgStats> amg_stats_;
    double setup_seconds_ = 0.0;
};

Vec precond_apply(const BlockPreconditioner& P, std::span<const double> v);

} // namespace irkprec

#endif
