#pragma once

#include <cstddef>

namespace greenport::kernels::detail {

double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger_scalar(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y);

#if defined(GREENPORT_HAVE_AVX2)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void gemv_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t_avx2(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger_avx2(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y);
#endif

#if defined(GREENPORT_HAVE_NEON)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger_neon(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y);
#endif

}  // namespace greenport::kernels::detail
