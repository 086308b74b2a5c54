#ifndef IRKPREC_CSR_HPP
#define IRKPREC_CSR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "irkprec/common.hpp"

namespace irkprec {

/// Compressed sparse row matrix. Within each row the column indices are
/// strictly increasing and duplicates have been summed away.
struct CsrMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<int> row_ptr; // size n_rows + 1
    std::vector<int> col_idx;
    std::vector<double> vals;

    int nnz() const { return static_cast<int>(vals.size()); }
    bool square() const { return n_rows == n_cols; }

    /// Checks the structural invariants; throws std::invalid_argument.
    void validate() const;

    double max_abs() const;

    static CsrMatrix identity(int n);
    static CsrMatrix diagonal(std::span<const double> d);
};

/// Coordinate-triplet accumulator. Duplicate entries are summed when the
/// triplets are compressed into CSR.
class TripletBuilder {
public:
    TripletBuilder(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {
        require(n_rows >= 0 && n_cols >= 0, "builder: negative dimension");
    }

    void add(int row, int col, double value) {
        rows_.push_back(row);
        cols_.push_back(col);
        vals_.push_back(value);
    }

    void reserve(std::size_t n) {
        rows_.reserve(n);
        cols_.reserve(n);
        vals_.reserve(n);
    }

    CsrMatrix compress() const;

private:
    int n_rows_, n_cols_;
    std::vector<int> rows_, cols_;
    std::vector<double> vals_;
};

/// y = A * x
Vec spmv(const CsrMatrix& A, std::span<const double> x);
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);

/// Serial reference version, kept for kernel parity tests and benchmarks.
Vec spmv_serial(const CsrMatrix& A, std::span<const double> x);
void spmv_serial(const CsrMatrix& A, std::span<const double> x,
                 std::span<double> y);

CsrMatrix csr_transpose(const CsrMatrix& A);

/// alpha*A + beta*B. Uses a fast path when A and B share their pattern.
CsrMatrix csr_add(double alpha, const CsrMatrix& A, double beta,
                  const CsrMatrix& B);

CsrMatrix csr_matmul(const CsrMatrix& A, const CsrMatrix& B);

/// Drops stored entries with |value| <= tol (keeps the diagonal).
CsrMatrix csr_prune(const CsrMatrix& A, double tol);

/// Matrix Market coordinate format, real general. Values are written with
/// 17 significant digits so a round trip preserves doubles exactly.
void write_matrix_market(const CsrMatrix& A, const std::string& path);
CsrMatrix read_matrix_market(const std::string& path);

} // namespace irkprec

#endif
