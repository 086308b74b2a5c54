#include "irkprec/spectra.hpp"

#include <cstdio>
#include <fstream>

#include "irkprec/kernels.hpp"

namespace irkprec {

LinearOperator preconditioned_operator(const StageOperator& op,
                                       const BlockPreconditioner* P,
                                       PrecondSide side) {
    if (P) {
        require(P->size() == op.size(),
                "preconditioned_operator: size mismatch");
        require(P->subsolver() == SubsolverKind::ExactLU,
                "preconditioned_operator: exact subsolves required");
    }
    LinearOperator h;
    h.n = op.size();
    if (!P) {
        h.apply = [&op](std::span<const double> x, std::span<double> y) {
            op.apply(x, y);
        };
        h.apply_transpose = [&op](std::span<const double> x,
                                  std::span<double> y) {
            op.apply_transpose(x, y);
        };
        return h;
    }
    if (side == PrecondSide::Right) {
        h.apply = [&op, P](std::span<const double> x, std::span<double> y) {
            Vec t(x.size());
            P->apply(x, t);
            op.apply(t, y);
        };
        // (A P^{-1})^T = P^{-T} A^T
        h.apply_transpose = [&op, P](std::span<const double> x,
                                     std::span<double> y) {
            Vec t(x.size());
            op.apply_transpose(x, t);
            P->apply_transpose(t, y);
        };
    } else {
        h.apply = [&op, P](std::span<const double> x, std::span<double> y) {
            Vec t(x.size());
            op.apply(x, t);
            P->apply(t, y);
        };
        h.apply_transpose = [&op, P](std::span<const double> x,
                                     std::span<double> y) {
            Vec t(x.size());
            P->apply_transpose(x, t);
            op.apply_transpose(t, y);
        };
    }
    return h;
}

SpectralReport analyze(const LinearOperator& handle, const std::string& label,
                       bool want_eigs, unsigned long seed) {
    SpectralReport rep;
    rep.label = label;
    rep.n = handle.n;
    if (want_eigs) require(handle.n <= 8000, "analyze: eigenvalue path capped "
                                             "at n = 8000");
    if (handle.n <= 8000) {
        const DenseMatrix A = materialize(handle);
        const auto sv = dense_singular_values(A);
        if (sv.back() <= 0.0)
            throw NumericalError("analyze: operator is singular",
                                 {sv.front(), sv.back()});
        rep.kappa2 = sv.front() / sv.back();
        if (want_eigs) rep.eigenvalues = dense_eigenvalues(A);
    } else {
        rep.kappa2 = condition_number_lanczos(handle, seed);
    }
    return rep;
}

void export_eigen_scatter(const std::vector<SpectralReport>& reports,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "label,re,im\n";
    char buf[128];
    for (const auto& rep : reports)
        for (const auto& ev : rep.eigenvalues) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n",
                          rep.label.c_str(), ev.real(), ev.imag());
            out << buf;
        }
}

} // namespace irkprec
