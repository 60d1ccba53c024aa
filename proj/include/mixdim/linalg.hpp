#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace mixdim {

struct Triplet {
    int row, col;
    double value;
};

/// Compressed sparse row matrix. Columns sorted per row, no duplicates;
/// explicit zeros are allowed.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);

    /// Duplicates are summed.
    static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
    static SparseMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nonzeros() const { return values_.size(); }

    const std::vector<int>& row_offsets() const { return row_ptr_; }
    const std::vector<int>& column_ids() const { return col_idx_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double coeff(int i, int j) const;

    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;
    /// x^T A y
    double bilinear(std::span<const double> x, std::span<const double> y) const;

    SparseMatrix transpose() const;
    std::vector<std::vector<double>> to_dense() const;

    /// Replace row i by the i-th identity row, keeping its sparsity pattern.
    void set_identity_row(int i);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

/// a*A + B
SparseMatrix add_scaled(double a, const SparseMatrix& A, const SparseMatrix& B);

/// Flatten [[A, B], [C, D]] into one matrix; empty (0x0) blocks count as zero.
SparseMatrix block_compose(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& C,
                           const SparseMatrix& D);

double norm2(std::span<const double> x);

/// Sparse LU with partial pivoting and fill-reducing ordering; factor once, solve many.
class Factorization {
public:
    explicit Factorization(const SparseMatrix& S);
    ~Factorization();
    Factorization(Factorization&&) noexcept;
    Factorization& operator=(Factorization&&) noexcept;

    int size() const;

    /// Solves S x = b and verifies ||Sx - b|| / ||b|| <= tolerance.
    std::vector<double> solve(std::span<const double> b) const;

    double last_residual() const { return last_residual_; }
    double max_residual() const { return max_residual_; }

    static constexpr double residual_tolerance = 1e-10;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    mutable double last_residual_ = 0.0;
    mutable double max_residual_ = 0.0;
};

inline Factorization factorize(const SparseMatrix& S) { return Factorization(S); }

} // namespace mixdim
