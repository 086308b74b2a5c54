#ifndef IRKPREC_BUTCHER_HPP
#define IRKPREC_BUTCHER_HPP

#include <string>

#include "irkprec/common.hpp"
#include "irkprec/dense.hpp"

namespace irkprec {

enum class Scheme { RadauIIA, LobattoIIIC, Custom };

std::string scheme_name(Scheme s);

/// Coefficients of an s-stage implicit Runge-Kutta method: stage matrix A,
/// weights b, abscissae c, classical order q. Both built-in families are
/// stiffly accurate collocation-type methods, so row sums of A equal c and
/// the last row of A equals b.
struct ButcherTable {
    Scheme scheme = Scheme::Custom;
    int s = 0;
    DenseMatrix A;
    Vec b;
    Vec c;
    int q = 0;
};

/// Radau IIA with s stages (1 <= s <= 7), order 2s-1, L-stable.
/// Abscissae are the right-endpoint Radau nodes; A solves the collocation
/// conditions sum_j a_ij c_j^{k-1} = c_i^k / k for k = 1..s.
ButcherTable make_radau_iia(int s);

/// Lobatto IIIC with s stages (2 <= s <= 5), order 2s-2, L-stable.
/// Abscissae are the Lobatto nodes; the first column of A equals b_1 and
/// the remaining columns satisfy the collocation conditions up to k = s-1.
ButcherTable make_lobatto_iiic(int s);

/// Max residual |phi(t) - 1/gamma(t)| over all rooted-tree order
/// conditions of order <= p, evaluated with the standard elementary-weight
/// recursion. A method has order >= p iff this is (numerically) zero.
double order_conditions_residual(const ButcherTable& table, int p);

/// A = L * diag(D) * U with unit triangular L, U, computed by Doolittle
/// elimination without pivoting.
struct LduFactors {
    DenseMatrix L;
    Vec D;
    DenseMatrix U;
};

/// Throws SingularError (naming the stage index) when a leading principal
/// minor vanishes, i.e. when a pivot satisfies |d_k| <= 1e-14 * max|A|.
LduFactors ldu_factorize(const DenseMatrix& A);

enum class CoeffKind {
    Jacobi,           // diagonal part of A
    GaussSeidelLower, // lower triangle of A, diagonal included
    UpperFactor,      // diag(D)*U from the LDU factorization
    LowerFactor,      // L*diag(D) from the LDU factorization
    Custom,           // user supplied
};

enum class CoeffStructure { Diagonal, LowerTriangular, UpperTriangular };

std::string coeff_kind_name(CoeffKind k);

/// Coefficient matrix of a block preconditioner of the stage system. The
/// matrix is exactly diagonal or triangular and its diagonal is nonzero.
struct PrecondCoeff {
    CoeffKind kind = CoeffKind::Custom;
    DenseMatrix Atilde;
    CoeffStructure structure = CoeffStructure::Diagonal;
};

PrecondCoeff precond_coeff(const ButcherTable& table, CoeffKind kind);

/// Wraps a user-supplied coefficient matrix, inferring and validating its
/// structure (must be diagonal or triangular with nonzero diagonal).
PrecondCoeff custom_coeff(DenseMatrix Atilde);

/// Plain-text coefficient file: first line s, then s rows of s
/// whitespace-separated decimals.
DenseMatrix read_coeff_file(const std::string& path);

} // namespace irkprec

#endif
