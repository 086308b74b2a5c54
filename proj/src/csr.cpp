#include "irkprec/csr.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace irkprec {

void CsrMatrix::validate() const {
    require(n_rows >= 0 && n_cols >= 0, "csr: negative dimension");
    require(static_cast<int>(row_ptr.size()) == n_rows + 1,
            "csr: row_ptr size mismatch");
    require(row_ptr.front() == 0, "csr: row_ptr[0] != 0");
    require(row_ptr.back() == nnz(), "csr: row_ptr[n] != nnz");
    require(col_idx.size() == vals.size(), "csr: col/val size mismatch");
    for (int i = 0; i < n_rows; ++i) {
        require(row_ptr[i] <= row_ptr[i + 1], "csr: row_ptr not nondecreasing");
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            require(col_idx[k] >= 0 && col_idx[k] < n_cols,
                    "csr: column index out of range");
            if (k > row_ptr[i])
                require(col_idx[k - 1] < col_idx[k],
                        "csr: columns not strictly increasing in row");
        }
    }
}

double CsrMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::fabs(v));
    return m;
}

CsrMatrix CsrMatrix::identity(int n) {
    CsrMatrix I;
    I.n_rows = I.n_cols = n;
    I.row_ptr.resize(n + 1);
    I.col_idx.resize(n);
    I.vals.assign(n, 1.0);
    std::iota(I.row_ptr.begin(), I.row_ptr.end(), 0);
    std::iota(I.col_idx.begin(), I.col_idx.end(), 0);
    return I;
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
    CsrMatrix D = identity(static_cast<int>(d.size()));
    std::copy(d.begin(), d.end(), D.vals.begin());
    return D;
}

CsrMatrix TripletBuilder::compress() const {
    const std::size_t nt = vals_.size();
    std::vector<std::size_t> order(nt);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rows_[a] != rows_[b]) return rows_[a] < rows_[b];
        return cols_[a] < cols_[b];
    });

    CsrMatrix A;
    A.n_rows = n_rows_;
    A.n_cols = n_cols_;
    A.row_ptr.assign(n_rows_ + 1, 0);
    A.col_idx.reserve(nt);
    A.vals.reserve(nt);

    int prev_row = -1, prev_col = -1;
    for (std::size_t t : order) {
        const int r = rows_[t], c = cols_[t];
        require(r >= 0 && r < n_rows_ && c >= 0 && c < n_cols_,
                "builder: index out of range");
        if (r == prev_row && c == prev_col) {
            A.vals.back() += vals_[t];
        } else {
            A.col_idx.push_back(c);
            A.vals.push_back(vals_[t]);
            A.row_ptr[r + 1] += 1;
            prev_row = r;
            prev_col = c;
        }
    }
    for (int i = 0; i < n_rows_; ++i) A.row_ptr[i + 1] += A.row_ptr[i];
    return A;
}

void spmv_serial(const CsrMatrix& A, std::span<const double> x,
                 std::span<double> y) {
    require(static_cast<int>(x.size()) == A.n_cols, "spmv: dimension mismatch");
    require(static_cast<int>(y.size()) == A.n_rows, "spmv: dimension mismatch");
    for (int i = 0; i < A.n_rows; ++i) {
        double s = 0.0;
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            s += A.vals[k] * x[A.col_idx[k]];
        y[i] = s;
    }
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    require(static_cast<int>(x.size()) == A.n_cols, "spmv: dimension mismatch");
    require(static_cast<int>(y.size()) == A.n_rows, "spmv: dimension mismatch");
    // Row results are independent; each row accumulates serially, so the
    // output is identical to the serial kernel for any thread count.
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.n_rows; ++i) {
        double s = 0.0;
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            s += A.vals[k] * x[A.col_idx[k]];
        y[i] = s;
    }
}

Vec spmv(const CsrMatrix& A, std::span<const double> x) {
    Vec y(static_cast<std::size_t>(A.n_rows));
    spmv(A, x, y);
    return y;
}

Vec spmv_serial(const CsrMatrix& A, std::span<const double> x) {
    Vec y(static_cast<std::size_t>(A.n_rows));
    spmv_serial(A, x, y);
    return y;
}

CsrMatrix csr_transpose(const CsrMatrix& A) {
    CsrMatrix T;
    T.n_rows = A.n_cols;
    T.n_cols = A.n_rows;
    T.row_ptr.assign(T.n_rows + 1, 0);
    T.col_idx.resize(A.vals.size());
    T.vals.resize(A.vals.size());
    for (int c : A.col_idx) T.row_ptr[c + 1] += 1;
    for (int i = 0; i < T.n_rows; ++i) T.row_ptr[i + 1] += T.row_ptr[i];
    std::vector<int> next(T.row_ptr.begin(), T.row_ptr.end() - 1);
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            const int pos = next[A.col_idx[k]]++;
            T.col_idx[pos] = i;
            T.vals[pos] = A.vals[k];
        }
    return T;
}

CsrMatrix csr_add(double alpha, const CsrMatrix& A, double beta,
                  const CsrMatrix& B) {
    require(A.n_rows == B.n_rows && A.n_cols == B.n_cols,
            "csr_add: shape mismatch");
    if (A.row_ptr == B.row_ptr && A.col_idx == B.col_idx) {
        CsrMatrix C = A;
        for (std::size_t k = 0; k < C.vals.size(); ++k)
            C.vals[k] = alpha * A.vals[k] + beta * B.vals[k];
        return C;
    }
    CsrMatrix C;
    C.n_rows = A.n_rows;
    C.n_cols = A.n_cols;
    C.row_ptr.assign(A.n_rows + 1, 0);
    C.col_idx.reserve(A.vals.size() + B.vals.size());
    C.vals.reserve(A.vals.size() + B.vals.size());
    for (int i = 0; i < A.n_rows; ++i) {
        int ka = A.row_ptr[i], kb = B.row_ptr[i];
        const int ea = A.row_ptr[i + 1], eb = B.row_ptr[i + 1];
        while (ka < ea || kb < eb) {
            int c;
            double v;
            if (kb >= eb || (ka < ea && A.col_idx[ka] < B.col_idx[kb])) {
                c = A.col_idx[ka];
                v = alpha * A.vals[ka++];
            } else if (ka >= ea || B.col_idx[kb] < A.col_idx[ka]) {
                c = B.col_idx[kb];
                v = beta * B.vals[kb++];
            } else {
                c = A.col_idx[ka];
                v = alpha * A.vals[ka++] + beta * B.vals[kb++];
            }
            C.col_idx.push_back(c);
            C.vals.push_back(v);
            C.row_ptr[i + 1] += 1;
        }
    }
    for (int i = 0; i < C.n_rows; ++i) C.row_ptr[i + 1] += C.row_ptr[i];
    return C;
}

CsrMatrix csr_matmul(const CsrMatrix& A, const CsrMatrix& B) {
    require(A.n_cols == B.n_rows, "csr_matmul: shape mismatch");
    CsrMatrix C;
    C.n_rows = A.n_rows;
    C.n_cols = B.n_cols;
    C.row_ptr.assign(A.n_rows + 1, 0);

    std::vector<double> acc(static_cast<std::size_t>(B.n_cols), 0.0);
    std::vector<int> marker(static_cast<std::size_t>(B.n_cols), -1);
    std::vector<int> cols_in_row;
    for (int i = 0; i < A.n_rows; ++i) {
        cols_in_row.clear();
        for (int ka = A.row_ptr[i]; ka < A.row_ptr[i + 1]; ++ka) {
            const int j = A.col_idx[ka];
            const double a = A.vals[ka];
            for (int kb = B.row_ptr[j]; kb < B.row_ptr[j + 1]; ++kb) {
                const int c = B.col_idx[kb];
                if (marker[c] != i) {
                    marker[c] = i;
                    acc[c] = 0.0;
                    cols_in_row.push_back(c);
                }
                acc[c] += a * B.vals[kb];
            }
        }
        std::sort(cols_in_row.begin(), cols_in_row.end());
        for (int c : cols_in_row) {
            C.col_idx.push_back(c);
            C.vals.push_back(acc[c]);
        }
        C.row_ptr[i + 1] = static_cast<int>(C.col_idx.size());
    }
    return C;
}

CsrMatrix csr_prune(const CsrMatrix& A, double tol) {
    CsrMatrix C;
    C.n_rows = A.n_rows;
    C.n_cols = A.n_cols;
    C.row_ptr.assign(A.n_rows + 1, 0);
    for (int i = 0; i < A.n_rows; ++i) {
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            if (std::fabs(A.vals[k]) > tol || A.col_idx[k] == i) {
                C.col_idx.push_back(A.col_idx[k]);
                C.vals.push_back(A.vals[k]);
            }
        }
        C.row_ptr[i + 1] = static_cast<int>(C.col_idx.size());
    }
    return C;
}

void write_matrix_market(const CsrMatrix& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << A.n_rows << ' ' << A.n_cols << ' ' << A.nnz() << '\n';
    char buf[64];
    for (int i = 0; i < A.n_rows; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1,
                          A.col_idx[k] + 1, A.vals[k]);
            out << buf;
        }
}

CsrMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::string line;
    bool header_seen = false;
    bool symmetric = false;
    int nr = 0, nc = 0, nz = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '%') {
            if (!header_seen && line.rfind("%%MatrixMarket", 0) == 0) {
                header_seen = true;
                if (line.find("symmetric") != std::string::npos)
                    symmetric = true;
                require(line.find("coordinate") != std::string::npos &&
                            line.find("real") != std::string::npos,
                        "matrix market: only coordinate real supported");
            }
            continue;
        }
        std::istringstream ss(line);
        ss >> nr >> nc >> nz;
        require(static_cast<bool>(ss), "matrix market: bad size line");
        break;
    }
    TripletBuilder b(nr, nc);
    b.reserve(static_cast<std::size_t>(nz));
    for (int t = 0; t < nz; ++t) {
        int i, j;
        double v;
        if (!(in >> i >> j >> v))
            throw std::runtime_error("matrix market: truncated entry list");
        b.add(i - 1, j - 1, v);
        if (symmetric && i != j) b.add(j - 1, i - 1, v);
    }
    return b.compress();
}

} // namespace irkprec
