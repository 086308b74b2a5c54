#include "irkprec/butcher.hpp"

#include <cmath>
#include <fstream>
#include <mutex>

#include "irkprec/orthopoly.hpp"

namespace irkprec {

std::string scheme_name(Scheme s) {
    switch (s) {
    case Scheme::RadauIIA: return "radau_iia";
    case Scheme::LobattoIIIC: return "lobatto_iiic";
    default: return "custom";
    }
}

std::string coeff_kind_name(CoeffKind k) {
    switch (k) {
    case CoeffKind::Jacobi: return "jacobi";
    case CoeffKind::GaussSeidelLower: return "gsl";
    case CoeffKind::UpperFactor: return "du";
    case CoeffKind::LowerFactor: return "ld";
    default: return "custom";
    }
}

ButcherTable make_radau_iia(int s) {
    require(s >= 1 && s <= 7, "make_radau_iia: stage count must be in 1..7");
    const auto c_ld = radau_right_nodes(s);

    ButcherTable t;
    t.scheme = Scheme::RadauIIA;
    t.s = s;
    t.q = 2 * s - 1;
    t.A = DenseMatrix(s, s);
    t.c.resize(s);
    for (int i = 0; i < s; ++i) t.c[i] = static_cast<double>(c_ld[i]);

    // Row i of A solves the Vandermonde system
    //   sum_j a_ij c_j^{k-1} = c_i^k / k,   k = 1..s.
    std::vector<long double> V(static_cast<std::size_t>(s) * s);
    for (int k = 0; k < s; ++k)
        for (int j = 0; j < s; ++j) V[k * s + j] = powl(c_ld[j], k);
    for (int i = 0; i < s; ++i) {
        std::vector<long double> rhs(s);
        for (int k = 0; k < s; ++k)
            rhs[k] = powl(c_ld[i], k + 1) / (k + 1);
        const auto row = dense_solve_ld(V, rhs, s);
        for (int j = 0; j < s; ++j)
            t.A(i, j) = static_cast<double>(row[j]);
    }
    t.b.resize(s);
    for (int j = 0; j < s; ++j) t.b[j] = t.A(s - 1, j);
    return t;
}

ButcherTable make_lobatto_iiic(int s) {
    require(s >= 2 && s <= 5, "make_lobatto_iiic: stage count must be in 2..5");
    const auto c_ld = lobatto_nodes(s);

    ButcherTable t;
    t.scheme = Scheme::LobattoIIIC;
    t.s = s;
    t.q = 2 * s - 2;
    t.A = DenseMatrix(s, s);
    t.c.resize(s);
    for (int i = 0; i < s; ++i) t.c[i] = static_cast<double>(c_ld[i]);

    // Lobatto quadrature weights on [0,1]: b_i = 1 / (s(s-1) P_{s-1}(x_i)^2)
    // with x_i the node mapped back to [-1,1].
    t.b.resize(s);
    std::vector<long double> b_ld(s);
    for (int i = 0; i < s; ++i) {
        const long double x = 2.0L * c_ld[i] - 1.0L;
        const long double p = legendre(s - 1, x).first;
        b_ld[i] = 1.0L / (static_cast<long double>(s) * (s - 1) * p * p);
        t.b[i] = static_cast<double>(b_ld[i]);
    }

    // First column pinned to b_1; columns 2..s from the collocation
    // conditions k = 1..s-1. Note c_1 = 0, so the first column only enters
    // the k = 1 condition.
    const int m = s - 1;
    std::vector<long double> V(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) V[k * m + j] = powl(c_ld[j + 1], k);
    for (int i = 0; i < s; ++i) {
        t.A(i, 0) = static_cast<double>(b_ld[0]);
        std::vector<long double> rhs(m);
        for (int k = 0; k < m; ++k) {
            rhs[k] = powl(c_ld[i], k + 1) / (k + 1);
            if (k == 0) rhs[k] -= b_ld[0];
        }
        const auto row = dense_solve_ld(V, rhs, m);
        for (int j = 0; j < m; ++j)
            t.A(i, j + 1) = static_cast<double>(row[j]);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Rooted-tree order conditions.
//
// Trees are stored once in a growing global table, identified by the sorted
// id list of their root's subtrees. Children always have smaller ids than
// their parent, so per-table elementary weights can be computed in one pass.

namespace {

struct TreeTable {
    std::vector<std::vector<int>> children; // sorted child ids
    std::vector<int> order;
    std::vector<double> inv_gamma;
    std::vector<std::vector<int>> by_order; // ids per order (1-based)
    int max_order = 0;

    void grow(int p) {
        if (p <= max_order) return;
        if (max_order == 0) {
            children.push_back({});
            order.push_back(1);
            inv_gamma.push_back(1.0);
            by_order.assign(2, {});
            by_order[1] = {0};
            max_order = 1;
        }
        for (int n = max_order + 1; n <= p; ++n) {
            by_order.resize(n + 1);
            std::vector<int> cur;
            gen(n - 1, 0, cur, n);
        }
        max_order = p;
    }

    // Enumerates multisets of existing trees with total order `remaining`,
    // ids nondecreasing; each completed multiset is a new tree of order n.
    void gen(int remaining, int min_id, std::vector<int>& cur, int n) {
        for (int id = min_id; id < static_cast<int>(order.size()); ++id) {
            if (order[id] > remaining) continue;
            cur.push_back(id);
            if (order[id] == remaining) {
                double g = n;
                for (int ch : cur) g *= 1.0 / inv_gamma[ch];
                children.push_back(cur);
                order.push_back(n);
                inv_gamma.push_back(1.0 / g);
                by_order[n].push_back(static_cast<int>(order.size()) - 1);
            } else {
                gen(remaining - order[id], id, cur, n);
            }
            cur.pop_back();
        }
    }
};

std::mutex tree_mutex;

} // namespace

double order_conditions_residual(const ButcherTable& table, int p) {
    require(p >= 1, "order_conditions_residual: p >= 1");
    // The tree table grows on demand; hold the lock for the whole
    // evaluation so concurrent growth cannot invalidate it.
    static TreeTable shared_trees;
    std::lock_guard<std::mutex> lock(tree_mutex);
    shared_trees.grow(p);
    const TreeTable& trees = shared_trees;
    const int s = table.s;

    // w(t)_i = prod over children u of (A * w(u))_i ; phi(t) = b . w(t)
    std::vector<Vec> w(trees.order.size());
    double residual = 0.0;
    for (int id = 0; id < static_cast<int>(trees.order.size()); ++id) {
        if (trees.order[id] > p) continue;
        Vec wi(s, 1.0);
        for (int ch : trees.children[id]) {
            const Vec Aw = dense_matvec(table.A, w[ch]);
            for (int i = 0; i < s; ++i) wi[i] *= Aw[i];
        }
        double phi = 0.0;
        for (int i = 0; i < s; ++i) phi += table.b[i] * wi[i];
        residual = std::max(residual, std::fabs(phi - trees.inv_gamma[id]));
        w[id] = std::move(wi);
    }
    return residual;
}

LduFactors ldu_factorize(const DenseMatrix& A) {
    require(A.n_rows == A.n_cols, "ldu_factorize: not square");
    const int s = A.n_rows;
    double amax = 0.0;
    for (double v : A.values) amax = std::max(amax, std::fabs(v));

    LduFactors f;
    f.L = DenseMatrix::identity(s);
    f.U = DenseMatrix::identity(s);
    f.D.assign(s, 0.0);

    for (int k = 0; k < s; ++k) {
        double d = A(k, k);
        for (int m = 0; m < k; ++m) d -= f.L(k, m) * f.D[m] * f.U(m, k);
        if (std::fabs(d) <= 1e-14 * amax)
            throw SingularError(
                "ldu_factorize: zero pivot, leading principal minor " +
                    std::to_string(k + 1) + " is singular",
                k + 1);
        f.D[k] = d;
        for (int j = k + 1; j < s; ++j) {
            double u = A(k, j);
            for (int m = 0; m < k; ++m) u -= f.L(k, m) * f.D[m] * f.U(m, j);
            f.U(k, j) = u / d;
        }
        for (int i = k + 1; i < s; ++i) {
            double l = A(i, k);
            for (int m = 0; m < k; ++m) l -= f.L(i, m) * f.D[m] * f.U(m, k);
            f.L(i, k) = l / d;
        }
    }
    return f;
}

namespace {

CoeffStructure infer_structure(const DenseMatrix& M) {
    const int s = M.n_rows;
    bool strict_lower_zero = true, strict_upper_zero = true;
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
            if (M(i, j) == 0.0) continue;
            if (i > j) strict_lower_zero = false;
            if (i < j) strict_upper_zero = false;
        }
    if (strict_lower_zero && strict_upper_zero) return CoeffStructure::Diagonal;
    if (strict_upper_zero) return CoeffStructure::LowerTriangular;
    if (strict_lower_zero) return CoeffStructure::UpperTriangular;
    throw std::invalid_argument(
        "coefficient matrix is neither diagonal nor triangular");
}

void check_diag_nonzero(const DenseMatrix& M) {
    for (int i = 0; i < M.n_rows; ++i)
        if (M(i, i) == 0.0)
            throw std::invalid_argument(
                "coefficient matrix has a zero diagonal entry");
}

} // namespace

PrecondCoeff precond_coeff(const ButcherTable& table, CoeffKind kind) {
    const int s = table.s;
    PrecondCoeff pc;
    pc.kind = kind;
    pc.Atilde = DenseMatrix(s, s);
    switch (kind) {
    case CoeffKind::Jacobi:
        for (int i = 0; i < s; ++i) pc.Atilde(i, i) = table.A(i, i);
        pc.structure = CoeffStructure::Diagonal;
        break;
    case CoeffKind::GaussSeidelLower:
        for (int i = 0; i < s; ++i)
            for (int j = 0; j <= i; ++j) pc.Atilde(i, j) = table.A(i, j);
        pc.structure = CoeffStructure::LowerTriangular;
        break;
    case CoeffKind::UpperFactor: {
        const LduFactors f = ldu_factorize(table.A);
        for (int i = 0; i < s; ++i)
            for (int j = i; j < s; ++j)
                pc.Atilde(i, j) = f.D[i] * f.U(i, j);
        pc.structure = CoeffStructure::UpperTriangular;
        break;
    }
    case CoeffKind::LowerFactor: {
        const LduFactors f = ldu_factorize(table.A);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j <= i; ++j)
                pc.Atilde(i, j) = f.L(i, j) * f.D[j];
        pc.structure = CoeffStructure::LowerTriangular;
        break;
    }
    case CoeffKind::Custom:
        throw std::invalid_argument(
            "precond_coeff: use custom_coeff for user matrices");
    }
    check_diag_nonzero(pc.Atilde);
    return pc;
}

PrecondCoeff custom_coeff(DenseMatrix Atilde) {
    require(Atilde.n_rows == Atilde.n_cols, "custom_coeff: not square");
    PrecondCoeff pc;
    pc.structure = infer_structure(Atilde);
    check_diag_nonzero(Atilde);
    pc.kind = CoeffKind::Custom;
    pc.Atilde = std::move(Atilde);
    return pc;
}

DenseMatrix read_coeff_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open coefficient file: " + path);
    int s = 0;
    if (!(in >> s) || s < 1)
        throw std::runtime_error("coefficient file: bad stage count");
    DenseMatrix M(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j)
            if (!(in >> M(i, j)))
                throw std::runtime_error(
                    "coefficient file: truncated matrix data");
    return M;
}

} // namespace irkprec
