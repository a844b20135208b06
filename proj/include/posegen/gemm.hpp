#pragma once

#include <cstddef>

namespace posegen {

/// Row-major GEMM: C = alpha * op(A) * op(B) + beta * C, with op(A) m-by-k,
/// op(B) k-by-n and C m-by-n. A is stored (m x k) when trans_a is false and
/// (k x m) otherwise; likewise for B. Backed by Eigen's blocked kernels; the
/// implementation lives in a single translation unit so the heavy headers are
/// compiled once.
template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, T alpha, const T* a, const T* b, T beta, T* c);

}  // namespace posegen
