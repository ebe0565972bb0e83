#pragma once

#include <cstddef>

namespace hubcast::detail {

/**
 * C(m x n) = A(m x k) * B(k x n) + beta * C, all row-major.
 *
 * op_a/op_b transpose the logical operand (the pointer still addresses the
 * untransposed row-major storage). Dispatches to OpenBLAS when the shared
 * library is available and falls back to a blocked OpenMP loop otherwise.
 * Both paths compute every output element as one fixed-order dot product,
 * so results are reproducible run to run.
 */
void gemm(bool transpose_a, bool transpose_b, std::size_t m, std::size_t n, std::size_t k,
          const double* a, const double* b, double beta, double* c);

/// Name of the active backend ("openblas" or "builtin"), for diagnostics.
const char* gemm_backend();

} // namespace hubcast::detail
