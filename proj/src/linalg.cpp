#include "wsn/linalg.hpp"

#include <cassert>
#include <cstring>

namespace wsn::linalg {

namespace {

inline void row_axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) y[j] += alpha * x[j];
}

inline double row_dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += x[k] * y[k];
    return acc;
}

}  // namespace

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    c = Matrix(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) row_axpy(ai[k], b.row(k), ci, b.cols);
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    c = Matrix(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.rows; ++k) row_axpy(a(k, i), b.row(k), ci, b.cols);
    }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    c = Matrix(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) ci[j] = row_dot(ai, b.row(j), a.cols);
    }
}

}  // namespace serial

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.rows);
    c = Matrix(a.rows, b.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.rows; ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) row_axpy(ai[k], b.row(k), ci, b.cols);
    }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.rows == b.rows);
    c = Matrix(a.cols, b.cols);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.cols; ++i) {
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.rows; ++k) row_axpy(a(k, i), b.row(k), ci, b.cols);
    }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    assert(a.cols == b.cols);
    c = Matrix(a.rows, b.rows);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) ci[j] = row_dot(ai, b.row(j), a.cols);
    }
}

}  // namespace wsn::linalg
