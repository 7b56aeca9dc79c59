#ifndef GLHARM_TENSOR_HPP
#define GLHARM_TENSOR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace glharm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense row-major tensor of fixed rank and runtime extents.
template <typename Scalar, int Rank>
class Tensor {
 public:
  Tensor() { extents_.fill(0); }
  explicit Tensor(int extent, Scalar fill = Scalar(0)) {
    extents_.fill(extent);
    data_.assign(size_from_extents(), fill);
  }
  explicit Tensor(std::array<int, Rank> extents, Scalar fill = Scalar(0)) : extents_(extents) {
    data_.assign(size_from_extents(), fill);
  }

  template <typename... Idx>
    requires(sizeof...(Idx) == Rank)
  Scalar& operator()(Idx... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <typename... Idx>
    requires(sizeof...(Idx) == Rank)
  const Scalar& operator()(Idx... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  int extent(int axis) const { return extents_[axis]; }
  const std::array<int, Rank>& extents() const { return extents_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<Scalar>& data() const { return data_; }
  std::vector<Scalar>& data() { return data_; }

  template <typename F>
  auto map(F&& f) const {
    using Out = decltype(f(std::declval<const Scalar&>()));
    Tensor<Out, Rank> out(extents_);
    std::transform(data_.begin(), data_.end(), out.data().begin(), f);
    return out;
  }

 private:
  std::size_t size_from_extents() const {
    std::size_t s = 1;
    for (int e : extents_) s *= static_cast<std::size_t>(e);
    return s;
  }
  std::size_t offset(std::array<int, Rank> idx) const {
    std::size_t o = 0;
    for (int r = 0; r < Rank; ++r) o = o * extents_[r] + idx[r];
    return o;
  }

  std::array<int, Rank> extents_;
  std::vector<Scalar> data_;
};

template <typename Scalar>
using Tensor3 = Tensor<Scalar, 3>;
template <typename Scalar>
using Tensor4 = Tensor<Scalar, 4>;
using Tensor3d = Tensor3<double>;
using Tensor4d = Tensor4<double>;

template <typename Scalar, int Rank>
double max_abs(const Tensor<Scalar, Rank>& t) {
  double m = 0;
  for (const auto& v : t.data()) m = std::max(m, std::abs(double(v)));
  return m;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace glharm

#endif  // GLHARM_TENSOR_HPP
