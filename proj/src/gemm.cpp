#include "posegen/gemm.hpp"

#include <Eigen/Core>

namespace posegen {

namespace {

template <typename T>
using RowMajorMat =
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename T>
using ConstMap = Eigen::Map<const RowMajorMat<T>>;

template <typename T>
using Map = Eigen::Map<RowMajorMat<T>>;

}  // namespace

template <typename T>
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, T alpha, const T* a, const T* b, T beta, T* c) {
  using Index = Eigen::Index;
  const Index mi = static_cast<Index>(m);
  const Index ni = static_cast<Index>(n);
  const Index ki = static_cast<Index>(k);

  ConstMap<T> ma(a, trans_a ? ki : mi, trans_a ? mi : ki);
  ConstMap<T> mb(b, trans_b ? ni : ki, trans_b ? ki : ni);
  Map<T> mc(c, mi, ni);

  auto assign = [&](const auto& prod) {
    if (beta == T(0)) {
      mc.noalias() = alpha * prod;
    } else {
      mc *= beta;
      mc.noalias() += alpha * prod;
    }
  };

  if (!trans_a && !trans_b) {
    assign(ma * mb);
  } else if (trans_a && !trans_b) {
    assign(ma.transpose() * mb);
  } else if (!trans_a && trans_b) {
    assign(ma * mb.transpose());
  } else {
    assign(ma.transpose() * mb.transpose());
  }
}

template void gemm<float>(bool, bool, std::size_t, std::size_t, std::size_t,
                          float, const float*, const float*, float, float*);
template void gemm<double>(bool, bool, std::size_t, std::size_t, std::size_t,
                           double, const double*, const double*, double,
                           double*);

}  // namespace posegen
