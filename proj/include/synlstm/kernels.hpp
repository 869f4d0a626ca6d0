#pragma once

// Dense double-precision inner loops. Each primitive has a portable scalar
// reference implementation and optional SIMD variants; the active variant is
// picked once at startup from the host CPU (override with SYNLSTM_ISA=scalar).
//
// Reductions in every variant use a fixed per-element order that does not
// depend on how many rows a call covers, so results for one row are identical
// whether it is computed alone or as part of a larger batch.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace synlstm::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out += a * b (elementwise)
  void (*mul_acc)(const double* a, const double* b, double* out, std::size_t n);
  // out = a + b (elementwise)
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  // out = a * b (elementwise)
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_table();

// Variants compiled into this build, in preference order (scalar last).
std::vector<Isa> compiled_isas();
// Compiled and supported by the running CPU.
bool available(Isa isa);
const KernelTable& table(Isa isa);

const KernelTable& active();
Isa active_isa();
// Switches the process-wide variant; throws ContractError when unavailable.
void select(Isa isa);

// Matrix helpers on row-major storage, built on the active table.
//
// C[m x n] (+)= A[m x k] * B[k x n]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
// C[m x n] (+)= A[m x k] * B[n x k]^T
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate);
// C[m x n] += A[k x m]^T * B[k x n]
void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c);

}  // namespace synlstm::kernels
