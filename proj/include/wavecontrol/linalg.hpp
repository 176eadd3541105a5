#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace wavecontrol {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense row-major complex matrix. Sized for the small systems used here
/// (coupling matrices, Gram matrices of a few hundred exponentials).
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix from_real(std::size_t rows, std::size_t cols, std::span<const double> row_major);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    CVector column(std::size_t j) const;
    void set_column(std::size_t j, std::span<const Complex> values);

    ComplexMatrix adjoint() const;
    bool all_finite() const noexcept;

    double norm1() const;          // max column sum
    double norm_frobenius() const;

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
    friend CVector operator*(const ComplexMatrix& a, std::span<const Complex> x);
    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

double norm2(std::span<const Complex> v);
Complex inner(std::span<const Complex> x, std::span<const Complex> y);  // sum x_m conj(y_m)

struct EigenResult {
    CVector eigenvalues;
    ComplexMatrix eigenvectors;  // columns, unit Euclidean norm
    std::vector<double> residuals;
};

inline constexpr std::size_t kMaxEigenDimension = 32;

/// Eigenpairs of a square matrix (dimension <= 32) by Hessenberg reduction and
/// Wilkinson-shifted complex QR. Eigenvalues come back in ascending (Re, Im)
/// order; each eigenvector is unit-norm with its largest component real positive.
EigenResult eig_dense(const ComplexMatrix& a, double eig_tol = 1e-10);

struct HermitianSolution {
    CVector x;
    double cond_estimate = 0.0;  // ||G||_1 ||G^-1||_1
};

/// Solve G x = rhs for Hermitian G by an LDL^H factorization. Throws
/// SingularSystem when a pivot falls below pivot_tol * ||G||_1.
HermitianSolution solve_hermitian(const ComplexMatrix& g, std::span<const Complex> rhs, double pivot_tol = 1e-12);

/// Numerical rank from column-pivoted Householder QR.
std::size_t rank_qr(const ComplexMatrix& m, double rank_tol = 1e-9);

/// Inverse by Gauss-Jordan with partial pivoting; throws SingularSystem.
ComplexMatrix inverse(const ComplexMatrix& a);

/// 1-norm condition number; +inf if the matrix is singular to working precision.
double condition_1norm(const ComplexMatrix& a);

}  // namespace wavecontrol
