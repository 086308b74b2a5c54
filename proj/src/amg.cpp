#include "irkprec/amg.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "irkprec/kernels.hpp"

namespace irkprec {

namespace {

// |A| + |A|^T, the symmetrized connection weights used for both the
// strength graph and (halved) the spectral-radius estimate.
CsrMatrix abs_symmetrize(const CsrMatrix& A) {
    CsrMatrix B = A;
    for (double& v : B.vals) v = std::fabs(v);
    return csr_add(1.0, B, 1.0, csr_transpose(B));
}

std::vector<int> aggregate(const CsrMatrix& C, double theta, int* n_agg_out) {
    const int n = C.n_rows;
    // Row-relative strength: j is strongly connected to i when C_ij is
    // within theta of the largest off-diagonal weight in row i. Unlike an
    // absolute test this survives the rescaling of Galerkin coarse
    // operators.
    Vec row_max(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = C.row_ptr[i]; k < C.row_ptr[i + 1]; ++k)
            if (C.col_idx[k] != i) row_max[i] = std::max(row_max[i], C.vals[k]);

    auto strong = [&](int i, int k) {
        const int j = C.col_idx[k];
        if (j == i) return false;
        // Non-strict so stencils whose neighbors all tie count as strong.
        return C.vals[k] >= theta * row_max[i];
    };

    std::vector<int> agg(n, -1);
    int n_agg = 0;

    // Pass 1: seed an aggregate around every node whose strong
    // neighborhood is still fully unassigned.
    for (int i = 0; i < n; ++i) {
        if (agg[i] >= 0) continue;
        bool free_nbhd = true;
        for (int k = C.row_ptr[i]; k < C.row_ptr[i + 1] && free_nbhd; ++k)
            if (strong(i, k) && agg[C.col_idx[k]] >= 0) free_nbhd = false;
        if (!free_nbhd) continue;
        agg[i] = n_agg;
        for (int k = C.row_ptr[i]; k < C.row_ptr[i + 1]; ++k)
            if (strong(i, k)) agg[C.col_idx[k]] = n_agg;
        ++n_agg;
    }

    // Pass 2: attach leftovers to the strongest neighboring aggregate.
    for (int i = 0; i < n; ++i) {
        if (agg[i] >= 0) continue;
        int best = -1;
        double best_w = 0.0;
        for (int k = C.row_ptr[i]; k < C.row_ptr[i + 1]; ++k) {
            const int j = C.col_idx[k];
            if (j == i || agg[j] < 0) continue;
            if (strong(i, k) && C.vals[k] > best_w) {
                best_w = C.vals[k];
                best = agg[j];
            }
        }
        if (best >= 0) agg[i] = best;
    }

    // Pass 3: isolated nodes become singletons.
    for (int i = 0; i < n; ++i)
        if (agg[i] < 0) agg[i] = n_agg++;

    *n_agg_out = n_agg;
    return agg;
}

double spectral_radius_estimate(const CsrMatrix& A, const Vec& inv_diag) {
    // 10 power iterations on D^{-1} * sym(A) from a fixed-seed start.
    const CsrMatrix S = csr_add(0.5, A, 0.5, csr_transpose(A));
    const int n = A.n_rows;
    std::mt19937_64 rng(0x1d872b41u);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Vec x(n), y(n);
    for (double& v : x) v = unit(rng);
    double rho = 1.0;
    for (int it = 0; it < 10; ++it) {
        spmv(S, x, y);
        for (int i = 0; i < n; ++i) y[i] *= inv_diag[i];
        rho = nrm2(y);
        if (rho == 0.0) break;
        scal(1.0 / rho, y);
        std::swap(x, y);
    }
    return std::max(rho, 1e-12);
}

Vec inverse_diagonal(const CsrMatrix& A) {
    Vec d(A.n_rows, 0.0);
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            if (A.col_idx[k] == i) d[i] = A.vals[k];
    for (int i = 0; i < A.n_rows; ++i) {
        if (d[i] == 0.0)
            throw SingularError("amg_setup: zero diagonal at row " +
                                    std::to_string(i),
                                i);
        d[i] = 1.0 / d[i];
    }
    return d;
}

void smooth_sweep(const AmgHierarchy::Level& lev, const AmgParams& p,
                  std::span<const double> r, Vec& z, bool backward) {
    const CsrMatrix& A = lev.A;
    const int n = A.n_rows;
    if (p.smoother == AmgSmoother::DampedJacobi) {
        Vec az(n);
        spmv(A, z, az);
        const double w = p.jacobi_weight;
        for (int i = 0; i < n; ++i)
            z[i] += w * lev.inv_diag[i] * (r[i] - az[i]);
    } else {
        if (!backward) {
            for (int i = 0; i < n; ++i) {
                double s = r[i];
                for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
                    if (A.col_idx[k] != i) s -= A.vals[k] * z[A.col_idx[k]];
                z[i] = s * lev.inv_diag[i];
            }
        } else {
            for (int i = n - 1; i >= 0; --i) {
                double s = r[i];
                for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
                    if (A.col_idx[k] != i) s -= A.vals[k] * z[A.col_idx[k]];
                z[i] = s * lev.inv_diag[i];
            }
        }
    }
}

void vcycle_level(const AmgHierarchy& h, int lev, std::span<const double> r,
                  Vec& z) {
    const auto& level = h.levels[lev];
    const int n = level.A.n_rows;
    z.assign(n, 0.0);
    if (lev == h.n_levels() - 1) {
        h.coarse_lu->solve(r, z);
        return;
    }
    for (int s = 0; s < h.params.pre_sweeps; ++s)
        smooth_sweep(level, h.params, r, z, /*backward=*/false);

    Vec resid(n);
    spmv(level.A, z, resid);
    for (int i = 0; i < n; ++i) resid[i] = r[i] - resid[i];

    const Vec rc = spmv(level.R, resid);
    Vec zc;
    vcycle_level(h, lev + 1, rc, zc);
    const Vec corr = spmv(level.P, zc);
    axpy(1.0, corr, z);

    for (int s = 0; s < h.params.post_sweeps; ++s)
        smooth_sweep(level, h.params, r, z, /*backward=*/true);
}

} // namespace

AmgHierarchy amg_setup(const CsrMatrix& A, AmgParams params) {
    require(A.square(), "amg_setup: matrix must be square");
    require(A.n_rows > 0, "amg_setup: empty matrix");
    require(params.theta > 0.0 && params.theta < 1.0,
            "amg_setup: theta must be in (0,1)");
    require(params.pre_sweeps >= 1 && params.post_sweeps >= 1,
            "amg_setup: sweeps must be >= 1");

    AmgHierarchy h;
    h.params = params;
    h.levels.push_back({A, inverse_diagonal(A), {}, {}});

    while (h.levels.back().A.n_rows > params.max_coarse &&
           h.n_levels() < params.max_levels) {
        AmgHierarchy::Level& fine = h.levels.back();
        const int n = fine.A.n_rows;

        const CsrMatrix C = abs_symmetrize(fine.A);
        int n_agg = 0;
        const std::vector<int> agg = aggregate(C, params.theta, &n_agg);
        if (n_agg == 0) throw NumericalError("amg_setup: aggregation stalled");
        if (n_agg > (9 * n) / 10) break; // no useful coarsening; solve here

        // Tentative piecewise-constant prolongator.
        CsrMatrix T;
        T.n_rows = n;
        T.n_cols = n_agg;
        T.row_ptr.resize(n + 1);
        T.col_idx.resize(n);
        T.vals.assign(n, 1.0);
        for (int i = 0; i <= n; ++i) T.row_ptr[i] = i;
        for (int i = 0; i < n; ++i) T.col_idx[i] = agg[i];

        // Damped-Jacobi smoothing of the tentative prolongator:
        // P = (I - w D^{-1} A)^steps T.
        const double rho = spectral_radius_estimate(fine.A, fine.inv_diag);
        const double w = params.prolongation_weight / rho;
        CsrMatrix P = std::move(T);
        for (int step = 0; step < params.prolongation_steps; ++step) {
            CsrMatrix AP = csr_matmul(fine.A, P);
            for (int i = 0; i < n; ++i)
                for (int k = AP.row_ptr[i]; k < AP.row_ptr[i + 1]; ++k)
                    AP.vals[k] *= w * fine.inv_diag[i];
            P = csr_add(1.0, P, -1.0, AP);
        }
        fine.P = std::move(P);
        fine.R = csr_transpose(fine.P);

        CsrMatrix Ac = csr_matmul(fine.R, csr_matmul(fine.A, fine.P));
        h.levels.push_back({std::move(Ac), {}, {}, {}});
        h.levels.back().inv_diag = inverse_diagonal(h.levels.back().A);
    }

    h.coarse_lu.emplace(h.levels.back().A);
    return h;
}

void amg_vcycle(const AmgHierarchy& h, std::span<const double> r,
                std::span<double> z) {
    require(static_cast<int>(r.size()) == h.fine_size(),
            "amg_vcycle: dimension mismatch");
    require(r.size() == z.size(), "amg_vcycle: dimension mismatch");
    Vec out;
    vcycle_level(h, 0, r, out);
    copy(out, z);
}

Vec amg_vcycle(const AmgHierarchy& h, std::span<const double> r) {
    Vec z(r.size());
    amg_vcycle(h, r, z);
    return z;
}

AmgStats amg_stats(const AmgHierarchy& h) {
    AmgStats s;
    s.levels = h.n_levels();
    double nnz = 0.0;
    for (const auto& lev : h.levels) {
        s.sizes.push_back(lev.A.n_rows);
        nnz += lev.A.nnz();
    }
    s.operator_complexity = nnz / h.levels.front().A.nnz();
    return s;
}

std::string to_string(const AmgStats& s) {
    std::ostringstream os;
    os << "levels=" << s.levels << " sizes=";
    for (std::size_t i = 0; i < s.sizes.size(); ++i)
        os << (i ? "/" : "") << s.sizes[i];
    os << " operator_complexity=" << s.operator_complexity;
    return os.str();
}

} // namespace irkprec
