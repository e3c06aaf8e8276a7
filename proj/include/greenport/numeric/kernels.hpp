#pragma once

// Inner-loop kernels used by the matrix and LSTM code. Every kernel has a
// scalar reference implementation; vectorised variants (AVX2+FMA on x86-64,
// NEON on AArch64) are selected at runtime and must agree with the scalar
// reference to rounding error.

#include <cstddef>
#include <string_view>

namespace greenport::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y += A x, A is rows x cols row-major
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y += A^T x, A is rows x cols row-major, x has rows entries, y has cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // A += x y^T, A is rows x cols row-major
  void (*ger)(double* a, std::size_t rows, std::size_t cols, const double* x, const double* y);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

// The table used by the library. Defaults to the widest supported ISA; the
// GREENPORT_ISA environment variable (scalar|avx2|neon) overrides at first use.
const KernelTable& active() noexcept;

// Forces a specific ISA. Returns false (and leaves the selection unchanged)
// when that ISA is unavailable.
bool select(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;
bool parse_isa(std::string_view name, Isa& out) noexcept;

}  // namespace greenport::kernels
