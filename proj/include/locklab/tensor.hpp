#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace locklab {

using Matrix3 = Eigen::Matrix3d;
using Matrix2 = Eigen::Matrix2d;
using Vector3 = Eigen::Vector3d;
using Vector2 = Eigen::Vector2d;

/// Deviatoric part of a symmetric 3x3 tensor: A - (tr A / 3) I.
inline Matrix3 deviatoric(const Matrix3& a) {
  return a - (a.trace() / 3.0) * Matrix3::Identity();
}

/// Dense fourth-order tensor on R^3, stored as 81 doubles.
///
/// Index convention c(i,j,k,l) with the pairs (i,j) and (k,l) mapping to
/// second-order tensors, as in s_ij = c_ijkl d_kl.
class Tensor4 {
public:
  Tensor4() { data_.fill(0.0); }

  double& operator()(int i, int j, int k, int l) {
    return data_[((i * 3 + j) * 3 + k) * 3 + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return data_[((i * 3 + j) * 3 + k) * 3 + l];
  }

  /// Double contraction with a second-order tensor: (c : d)_ij = c_ijkl d_kl.
  Matrix3 contract(const Matrix3& d) const {
    Matrix3 out = Matrix3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) s += (*this)(i, j, k, l) * d(k, l);
        out(i, j) = s;
      }
    return out;
  }

  Tensor4& axpy(double c, const Tensor4& other) {
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += c * other.data_[n];
    return *this;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  /// a_ij b_kl
  static Tensor4 outer(const Matrix3& a, const Matrix3& b) {
    Tensor4 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) t(i, j, k, l) = a(i, j) * b(k, l);
    return t;
  }

  /// Symmetrized dyadic (a ◇ b)_ijkl = (a_ik b_jl + a_il b_jk) / 2.
  static Tensor4 sym_dyad(const Matrix3& a, const Matrix3& b) {
    Tensor4 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            t(i, j, k, l) = 0.5 * (a(i, k) * b(j, l) + a(i, l) * b(j, k));
    return t;
  }

private:
  std::array<double, 81> data_;
};

}  // namespace locklab
