#include <atomic>
#include <cstdlib>
#include <string>

#include "synlstm/error.hpp"
#include "synlstm/kernels.hpp"

namespace synlstm::kernels {

#if defined(SYNLSTM_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(SYNLSTM_HAVE_NEON)
const KernelTable& neon_table();
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::vector<Isa> compiled_isas() {
  std::vector<Isa> out;
#if defined(SYNLSTM_HAVE_AVX2)
  out.push_back(Isa::avx2);
#endif
#if defined(SYNLSTM_HAVE_NEON)
  out.push_back(Isa::neon);
#endif
  out.push_back(Isa::scalar);
  return out;
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(SYNLSTM_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SYNLSTM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw ContractError("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  }
  switch (isa) {
#if defined(SYNLSTM_HAVE_AVX2)
    case Isa::avx2: return avx2_table();
#endif
#if defined(SYNLSTM_HAVE_NEON)
    case Isa::neon: return neon_table();
#endif
    default: return scalar_table();
  }
}

namespace {

const KernelTable* initial_table() {
  if (const char* env = std::getenv("SYNLSTM_ISA")) {
    const std::string want(env);
    for (Isa isa : compiled_isas()) {
      if (isa_name(isa) == want && available(isa)) return &table(isa);
    }
    return &scalar_table();
  }
  for (Isa isa : compiled_isas()) {
    if (available(isa)) return &table(isa);
  }
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  const KernelTable& kt = active();
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (!accumulate) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    }
    for (std::size_t p = 0; p < k; ++p) kt.axpy(a[i * k + p], b + p * n, crow, n);
  }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  const KernelTable& kt = active();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = kt.dot(a + i * k, b + j * k, k);
      c[i * n + j] = accumulate ? c[i * n + j] + v : v;
    }
  }
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  const KernelTable& kt = active();
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < m; ++i) kt.axpy(a[p * m + i], b + p * n, c + i * n, n);
  }
}

}  // namespace synlstm::kernels
