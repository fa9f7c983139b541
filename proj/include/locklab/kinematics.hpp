#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "locklab/tensor.hpp"

namespace locklab {

inline constexpr double kMinJacobian = 1e-12;

/// Deformation gradient. Construction rejects non-positive determinants,
/// so a DefGrad always maps to an orientation-preserving deformation.
/// Immutable after construction.
class DefGrad {
public:
  explicit DefGrad(const Matrix3& f) : f_(f), det_(f.determinant()) {
    if (!(det_ > kMinJacobian))
      throw std::domain_error("deformation gradient must have det F > 0");
  }

  static DefGrad identity() { return DefGrad(Matrix3::Identity()); }

  /// F = I + gamma e1 (x) e2.
  static DefGrad simple_shear(double gamma) {
    Matrix3 f = Matrix3::Identity();
    f(0, 1) = gamma;
    return DefGrad(f);
  }

  /// Incompressible uniaxial stretch diag(l, 1/sqrt(l), 1/sqrt(l)).
  static DefGrad uniaxial(double stretch) {
    Matrix3 f = Matrix3::Zero();
    f(0, 0) = stretch;
    f(1, 1) = f(2, 2) = 1.0 / std::sqrt(stretch);
    return DefGrad(f);
  }

  /// Incompressible equibiaxial stretch diag(l, l, 1/l^2).
  static DefGrad equibiaxial(double stretch) {
    Matrix3 f = Matrix3::Zero();
    f(0, 0) = f(1, 1) = stretch;
    f(2, 2) = 1.0 / (stretch * stretch);
    return DefGrad(f);
  }

  /// Plane-strain stretch diag(l, 1/l, 1).
  static DefGrad plane_strain(double stretch) {
    Matrix3 f = Matrix3::Zero();
    f(0, 0) = stretch;
    f(1, 1) = 1.0 / stretch;
    f(2, 2) = 1.0;
    return DefGrad(f);
  }

  const Matrix3& matrix() const noexcept { return f_; }
  double det() const noexcept { return det_; }

private:
  Matrix3 f_;
  double det_;
};

/// Invariants of the Cauchy-Green tensors together with the tensors they
/// come from. I1_bar/I2_bar are invariants of the volume-preserving part
/// B_bar = F_bar F_bar^T with F_bar = J^(-1/3) F.
struct InvariantSet {
  double I1 = 3.0;
  double I2 = 3.0;
  double I3 = 1.0;
  double J = 1.0;
  double I1_bar = 3.0;
  double I2_bar = 3.0;
  Matrix3 B = Matrix3::Identity();
  Matrix3 C = Matrix3::Identity();
  Matrix3 B_bar = Matrix3::Identity();
  Matrix3 F_bar = Matrix3::Identity();
};

inline InvariantSet invariants(const DefGrad& fg) {
  const Matrix3& f = fg.matrix();
  InvariantSet inv;
  inv.J = fg.det();
  inv.B = f * f.transpose();
  inv.C = f.transpose() * f;
  inv.I1 = inv.B.trace();
  inv.I2 = 0.5 * (inv.I1 * inv.I1 - (inv.B * inv.B).trace());
  inv.I3 = inv.J * inv.J;
  const double jm13 = std::cbrt(1.0 / inv.J);
  inv.F_bar = jm13 * f;
  inv.B_bar = (jm13 * jm13) * inv.B;
  inv.I1_bar = inv.B_bar.trace();
  inv.I2_bar = 0.5 * (inv.I1_bar * inv.I1_bar - (inv.B_bar * inv.B_bar).trace());
  return inv;
}

/// Invariant set of the isochoric stretch triple (l1, l2, l3) rescaled to
/// unit volume; handy for energy surfaces and equilibrium paths where the
/// deformation is given by principal stretches directly.
inline InvariantSet invariants_from_stretches(double l1, double l2, double l3) {
  Matrix3 f = Matrix3::Zero();
  f(0, 0) = l1;
  f(1, 1) = l2;
  f(2, 2) = l3;
  return invariants(DefGrad(f));
}

/// Principal stretches (descending) and their referential axes.
/// Axes are columns of `axes`, sign-fixed so the largest-magnitude
/// component of each axis is positive.
struct PrincipalStretches {
  std::array<double, 3> stretch{1.0, 1.0, 1.0};
  Matrix3 axes = Matrix3::Identity();
};

inline PrincipalStretches polar_stretch_eigen(const DefGrad& fg) {
  const Matrix3 c = fg.matrix().transpose() * fg.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix3> es(c);
  PrincipalStretches out;
  // Eigen returns ascending order; report descending.
  for (int k = 0; k < 3; ++k) {
    const int src = 2 - k;
    out.stretch[k] = std::sqrt(std::max(es.eigenvalues()(src), 0.0));
    Vector3 v = es.eigenvectors().col(src);
    int imax = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    if (v(imax) < 0.0) v = -v;
    out.axes.col(k) = v;
  }
  return out;
}

}  // namespace locklab
