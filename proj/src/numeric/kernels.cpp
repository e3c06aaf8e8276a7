#include "greenport/numeric/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace greenport::kernels {

namespace {

using namespace detail;

constexpr KernelTable kScalar{Isa::Scalar, dot_scalar, axpy_scalar, gemv_scalar, gemv_t_scalar, ger_scalar};

#if defined(GREENPORT_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, dot_avx2, axpy_avx2, gemv_avx2, gemv_t_avx2, ger_avx2};
#endif

#if defined(GREENPORT_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, dot_neon, axpy_neon, gemv_neon, gemv_t_neon, ger_neon};
#endif

const KernelTable* best_available() noexcept {
  if (const auto* t = avx2_table()) return t;
  if (const auto* t = neon_table()) return t;
  return &kScalar;
}

const KernelTable* initial_selection() noexcept {
  if (const char* env = std::getenv("GREENPORT_ISA")) {
    Isa isa{};
    if (parse_isa(env, isa)) {
      switch (isa) {
        case Isa::Scalar: return &kScalar;
        case Isa::Avx2: if (const auto* t = avx2_table()) return t; break;
        case Isa::Neon: if (const auto* t = neon_table()) return t; break;
      }
    }
  }
  return best_available();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_selection()};
  return table;
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(GREENPORT_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(GREENPORT_HAVE_NEON)
  return &kNeon;  // baseline on AArch64
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
  const KernelTable* t = nullptr;
  switch (isa) {
    case Isa::Scalar: t = &kScalar; break;
    case Isa::Avx2: t = avx2_table(); break;
    case Isa::Neon: t = neon_table(); break;
  }
  if (t == nullptr) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool parse_isa(std::string_view name, Isa& out) noexcept {
  if (name == "scalar") { out = Isa::Scalar; return true; }
  if (name == "avx2") { out = Isa::Avx2; return true; }
  if (name == "neon") { out = Isa::Neon; return true; }
  return false;
}

}  // namespace greenport::kernels
