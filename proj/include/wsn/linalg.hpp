#pragma once

#include <cstddef>
#include <vector>

namespace wsn::linalg {

// Dense row-major matrix of doubles. Deliberately minimal: the MLP engine
// needs three product shapes and elementwise ops, nothing more.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    std::size_t size() const { return data.size(); }
};

// OpenMP kernels parallelize over output rows; each output element is
// accumulated in a fixed k-order, so results are bit-identical to the
// serial reference at any thread count.

// C = A * B            A[m,k], B[k,n]
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
// C = A^T * B          A[k,m], B[k,n]
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
// C = A * B^T          A[m,k], B[n,k]
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);

namespace serial {
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c);
}  // namespace serial

}  // namespace wsn::linalg
