#include "mixdim/linalg.hpp"

#include "mixdim/common.hpp"

#include <Eigen/Sparse>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mixdim {

SparseMatrix::SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
    SparseMatrix m(rows, cols);
    for (const auto& t : triplets)
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw DomainError("triplet index outside matrix shape");
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r) {
        while (k < triplets.size() && triplets[k].row == r) {
            const int c = triplets[k].col;
            double v = 0.0;
            while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) v += triplets[k++].value;
            m.col_idx_.push_back(c);
            m.values_.push_back(v);
        }
        m.row_ptr_[r + 1] = static_cast<int>(m.col_idx_.size());
    }
    return m;
}

SparseMatrix SparseMatrix::identity(int n)
{
    std::vector<Triplet> t;
    t.reserve(n);
    for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return from_triplets(n, n, std::move(t));
}

double SparseMatrix::coeff(int i, int j) const
{
    const auto first = col_idx_.begin() + row_ptr_[i], last = col_idx_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values_[it - col_idx_.begin()] : 0.0;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    if (static_cast<int>(x.size()) != cols_ || static_cast<int>(y.size()) != rows_)
        throw DomainError("spmv: shape mismatch");
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k] * x[col_idx_[k]];
        y[i] = s;
    }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const
{
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
}

double SparseMatrix::bilinear(std::span<const double> x, std::span<const double> y) const
{
    if (static_cast<int>(x.size()) != rows_ || static_cast<int>(y.size()) != cols_)
        throw DomainError("bilinear: shape mismatch");
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double r = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) r += values_[k] * y[col_idx_[k]];
        s += x[i] * r;
    }
    return s;
}

SparseMatrix SparseMatrix::transpose() const
{
    std::vector<Triplet> t;
    t.reserve(values_.size());
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({col_idx_[k], i, values_[k]});
    return from_triplets(cols_, rows_, std::move(t));
}

std::vector<std::vector<double>> SparseMatrix::to_dense() const
{
    std::vector<std::vector<double>> d(rows_, std::vector<double>(cols_, 0.0));
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i][col_idx_[k]] = values_[k];
    return d;
}

void SparseMatrix::set_identity_row(int i)
{
    bool has_diagonal = false;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        values_[k] = (col_idx_[k] == i) ? 1.0 : 0.0;
        has_diagonal = has_diagonal || col_idx_[k] == i;
    }
    if (has_diagonal) return;
    const auto pos = std::lower_bound(col_idx_.begin() + row_ptr_[i], col_idx_.begin() + row_ptr_[i + 1], i) -
                     col_idx_.begin();
    col_idx_.insert(col_idx_.begin() + pos, i);
    values_.insert(values_.begin() + pos, 1.0);
    for (int r = i + 1; r <= rows_; ++r) ++row_ptr_[r];
}

SparseMatrix add_scaled(double a, const SparseMatrix& A, const SparseMatrix& B)
{
    if (A.rows() != B.rows() || A.cols() != B.cols()) throw DomainError("add_scaled: shape mismatch");
    std::vector<Triplet> t;
    t.reserve(A.nonzeros() + B.nonzeros());
    for (const auto* M : {&A, &B}) {
        const double f = (M == &A) ? a : 1.0;
        for (int i = 0; i < M->rows(); ++i)
            for (int k = M->row_offsets()[i]; k < M->row_offsets()[i + 1]; ++k)
                t.push_back({i, M->column_ids()[k], f * M->values()[k]});
    }
    return SparseMatrix::from_triplets(A.rows(), A.cols(), std::move(t));
}

SparseMatrix block_compose(const SparseMatrix& A, const SparseMatrix& B, const SparseMatrix& C,
                           const SparseMatrix& D)
{
    const int n0 = A.rows(), n1 = D.rows();
    if (A.cols() != n0 || D.cols() != n1) throw DomainError("block_compose: diagonal blocks must be square");
    const auto check = [](const SparseMatrix& M, int r, int c) {
        if (M.rows() == 0 && M.cols() == 0) return;
        if (M.rows() != r || M.cols() != c) throw DomainError("block_compose: off-diagonal block shape mismatch");
    };
    check(B, n0, n1);
    check(C, n1, n0);
    std::vector<Triplet> t;
    t.reserve(A.nonzeros() + B.nonzeros() + C.nonzeros() + D.nonzeros());
    const auto append = [&t](const SparseMatrix& M, int r0, int c0) {
        for (int i = 0; i < M.rows(); ++i)
            for (int k = M.row_offsets()[i]; k < M.row_offsets()[i + 1]; ++k)
                t.push_back({r0 + i, c0 + M.column_ids()[k], M.values()[k]});
    };
    append(A, 0, 0);
    append(B, 0, n0);
    append(C, n0, 0);
    append(D, n0, n0);
    return SparseMatrix::from_triplets(n0 + n1, n0 + n1, std::move(t));
}

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

struct Factorization::Impl {
    SparseMatrix matrix;
    Eigen::SparseMatrix<double> eigen_matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
};

Factorization::Factorization(const SparseMatrix& S) : impl_(std::make_unique<Impl>())
{
    if (S.rows() != S.cols()) throw DomainError("factorize: matrix must be square");
    impl_->matrix = S;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(S.nonzeros());
    for (int i = 0; i < S.rows(); ++i)
        for (int k = S.row_offsets()[i]; k < S.row_offsets()[i + 1]; ++k)
            t.emplace_back(i, S.column_ids()[k], S.values()[k]);
    impl_->eigen_matrix.resize(S.rows(), S.cols());
    impl_->eigen_matrix.setFromTriplets(t.begin(), t.end());
    impl_->eigen_matrix.makeCompressed();
    impl_->lu.compute(impl_->eigen_matrix);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU failed: matrix is numerically singular");
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const { return impl_->matrix.rows(); }

std::vector<double> Factorization::solve(std::span<const double> b) const
{
    const int n = size();
    if (static_cast<int>(b.size()) != n) throw DomainError("solve: rhs length mismatch");
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        last_residual_ = 0.0;
        return std::vector<double>(n, 0.0);
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
    const Eigen::VectorXd sol = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw SolverError("sparse LU back-substitution failed");
    std::vector<double> x(sol.data(), sol.data() + n);

    auto r = impl_->matrix * x;
    for (int i = 0; i < n; ++i) r[i] -= b[i];
    last_residual_ = norm2(r) / bnorm;
    max_residual_ = std::max(max_residual_, last_residual_);
    if (!(last_residual_ <= residual_tolerance)) {
        std::ostringstream msg;
        msg << "linear solve residual " << last_residual_ << " exceeds " << residual_tolerance << " (n = " << n
            << ", ||b|| = " << bnorm << ")";
        throw SolverError(msg.str());
    }
    return x;
}

} // namespace mixdim
