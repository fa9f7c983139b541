#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "locklab/errors.hpp"
#include "locklab/kinematics.hpp"
#include "locklab/tensor.hpp"

namespace locklab {

enum class MaterialKind { NeoHookean, Gent, Kilian };

inline const char* to_string(MaterialKind k) {
  switch (k) {
    case MaterialKind::NeoHookean: return "neo-hookean";
    case MaterialKind::Gent: return "gent";
    case MaterialKind::Kilian: return "kilian";
  }
  return "?";
}

/// Hyperelastic model definition. Immutable; all evaluations are pure
/// functions of (model, state), so models can be shared freely across
/// threads.
///
/// mu0    initial shear modulus (stress scale; outputs are in multiples
///        of mu0 when mu0 = 1)
/// a      locking parameter: bounds I1_bar by 3 + a (Gent) or the mixed
///        invariant by a^2 (Kilian)
/// alpha  global interaction parameter (Kilian only)
/// f      invariant mixing weight in (1-f) I1_bar + f I2_bar (Kilian only)
class MaterialModel {
public:
  static MaterialModel neo_hookean(double mu0) {
    return MaterialModel(MaterialKind::NeoHookean, mu0, 0.0, 0.0, 0.0);
  }

  static MaterialModel gent(double mu0, double a) {
    if (!(a > 0.0)) throw ParameterError("gent: locking parameter a must be > 0");
    return MaterialModel(MaterialKind::Gent, mu0, a, 0.0, 0.0);
  }

  static MaterialModel kilian(double mu0, double a, double alpha = 0.0, double f = 0.0) {
    if (!(a * a > 3.0))
      throw ParameterError("kilian: requires a^2 > 3");
    if (!(f >= 0.0 && f <= 1.0))
      throw ParameterError("kilian: mixing weight f must lie in [0, 1]");
    return MaterialModel(MaterialKind::Kilian, mu0, a, alpha, f);
  }

  MaterialKind kind() const noexcept { return kind_; }
  double mu0() const noexcept { return mu0_; }
  double a() const noexcept { return a_; }
  double alpha() const noexcept { return alpha_; }
  double f() const noexcept { return f_; }

  bool operator==(const MaterialModel&) const = default;

private:
  MaterialModel(MaterialKind kind, double mu0, double a, double alpha, double f)
      : kind_(kind), mu0_(mu0), a_(a), alpha_(alpha), f_(f) {
    if (!(mu0 > 0.0)) throw ParameterError("shear modulus mu0 must be > 0");
  }

  MaterialKind kind_;
  double mu0_;
  double a_;
  double alpha_;
  double f_;
};

/// Quantity bounded by the locking constraint.
enum class BoundQuantity { None, IsochoricI1, MixedInvariant };

struct LockingLimit {
  BoundQuantity quantity = BoundQuantity::None;
  double limit = std::numeric_limits<double>::infinity();
  bool bounded() const noexcept { return quantity != BoundQuantity::None; }
};

/// Bounding quantity and limit value: I1_bar < 3 + a for Gent, the mixed
/// invariant < a^2 for Kilian; neo-Hookean is unbounded.
inline LockingLimit locking_limit(const MaterialModel& m) {
  switch (m.kind()) {
    case MaterialKind::Gent:
      return {BoundQuantity::IsochoricI1, 3.0 + m.a()};
    case MaterialKind::Kilian:
      return {BoundQuantity::MixedInvariant, m.a() * m.a()};
    case MaterialKind::NeoHookean:
      break;
  }
  return {};
}

/// Energy density and its invariant derivatives at one state.
///
/// Outside the locking domain W is undefined (NaN) while the derivative
/// fields keep their raw algebraic values wherever those are real; this is
/// the "unguarded" evaluation used to reproduce solver behavior past the
/// bound. in_domain is equivalent to locking_margin > 0.
struct EnergyEval {
  double W = 0.0;
  double dW_dI1 = 0.0;
  double dW_dI2 = 0.0;
  double d2W_dI1I1 = 0.0;
  double d2W_dI1I2 = 0.0;
  double d2W_dI2I2 = 0.0;
  double bound_value = 0.0;      // attained value of the bounding quantity
  double locking_margin = std::numeric_limits<double>::infinity();
  bool in_domain = true;
};

/// Evaluate the stored-energy function and its first/second invariant
/// derivatives. Derivative formulas are evaluated algebraically even past
/// the locking bound; evaluation exactly at a derivative pole throws.
inline EnergyEval energy(const MaterialModel& m, const InvariantSet& inv) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  constexpr double inf = std::numeric_limits<double>::infinity();
  EnergyEval ev;
  const double mu = m.mu0();

  switch (m.kind()) {
    case MaterialKind::NeoHookean: {
      ev.W = 0.5 * mu * (inv.I1_bar - 3.0);
      ev.dW_dI1 = 0.5 * mu;
      ev.bound_value = inv.I1_bar;
      return ev;
    }
    case MaterialKind::Gent: {
      const double a = m.a();
      const double x = inv.I1_bar - 3.0;
      ev.bound_value = inv.I1_bar;
      ev.locking_margin = (3.0 + a) - inv.I1_bar;
      ev.in_domain = ev.locking_margin > 0.0;
      if (a == x) throw EvaluationError("gent: derivative pole at I1_bar = 3 + a");
      ev.dW_dI1 = 0.5 * mu * a / (a - x);
      ev.d2W_dI1I1 = 0.5 * mu * a / ((a - x) * (a - x));
      ev.W = ev.in_domain ? -0.5 * mu * a * std::log1p(-x / a) : nan;
      return ev;
    }
    case MaterialKind::Kilian: {
      const double a = m.a();
      const double alpha = m.alpha();
      const double f = m.f();
      const double itilde = (1.0 - f) * inv.I1_bar + f * inv.I2_bar;
      const double c = a * a - 3.0;
      const double x = std::max(itilde - 3.0, 0.0);
      ev.bound_value = itilde;
      ev.locking_margin = a * a - itilde;
      ev.in_domain = ev.locking_margin > 0.0;

      const double eta = std::sqrt(x / c);
      // exactly at the bound 1/(1 - eta) overflows to infinity, the
      // algebraic continuation of the derivative formula
      double dW = 0.5 * mu / (1.0 - eta);
      double d2W;
      if (x == 0.0) {
        d2W = inf;  // second derivative is singular at the natural state
      } else {
        d2W = mu * eta / (4.0 * x * (1.0 - eta) * (1.0 - eta));
      }
      if (alpha != 0.0) {
        dW += 0.5 * mu * alpha * std::sqrt(0.5 * x);
        d2W += (x == 0.0) ? inf : mu * alpha / (8.0 * std::sqrt(0.5 * x));
      }
      ev.dW_dI1 = (1.0 - f) * dW;
      ev.dW_dI2 = f * dW;
      ev.d2W_dI1I1 = (1.0 - f) * (1.0 - f) * d2W;
      ev.d2W_dI1I2 = f * (1.0 - f) * d2W;
      ev.d2W_dI2I2 = f * f * d2W;
      if (ev.in_domain) {
        ev.W = -mu * (c * (std::log1p(-eta) + eta) -
                      (2.0 / 3.0) * alpha * std::pow(0.5 * x, 1.5));
      } else {
        ev.W = nan;
      }
      return ev;
    }
  }
  throw ParameterError("unknown material kind");
}

/// Isochoric Kirchhoff stress
///   s = 2 (dW/dI1 + I1_bar dW/dI2) dev(B_bar) - 2 dW/dI2 dev(B_bar^2).
/// Deviatoric by construction. Guarded mode rejects out-of-domain states.
inline Matrix3 isochoric_stress(const MaterialModel& m, const InvariantSet& inv,
                                EvalMode mode = EvalMode::Guarded) {
  const EnergyEval ev = energy(m, inv);
  if (mode == EvalMode::Guarded && !ev.in_domain)
    throw LockingViolation("state outside the locking domain", ev.locking_margin);
  Matrix3 s = 2.0 * (ev.dW_dI1 + inv.I1_bar * ev.dW_dI2) * deviatoric(inv.B_bar);
  if (ev.dW_dI2 != 0.0) s -= 2.0 * ev.dW_dI2 * deviatoric(inv.B_bar * inv.B_bar);
  return s;
}

/// All four stress measures of one incompressible state.
/// Consistency: kirchhoff = J cauchy = pk1 F^T = F pk2 F^T.
struct StressState {
  Matrix3 cauchy = Matrix3::Zero();
  Matrix3 kirchhoff = Matrix3::Zero();
  Matrix3 pk1 = Matrix3::Zero();
  Matrix3 pk2 = Matrix3::Zero();
  double pressure = 0.0;
};

/// Cauchy stress sigma = -p I + s of an incompressible state (det F = 1
/// within 1e-8), with the pressure supplied by the enclosing problem.
/// The Kirchhoff/Piola measures are populated through the standard pull-back
/// relations.
inline StressState cauchy_stress_general(const MaterialModel& m, const DefGrad& fg,
                                         double pressure,
                                         EvalMode mode = EvalMode::Guarded) {
  if (std::abs(fg.det() - 1.0) > 1e-8)
    throw std::invalid_argument("cauchy_stress_general: requires det F = 1 within 1e-8");
  const InvariantSet inv = invariants(fg);
  StressState st;
  st.pressure = pressure;
  st.cauchy = -pressure * Matrix3::Identity() + isochoric_stress(m, inv, mode);
  st.kirchhoff = inv.J * st.cauchy;
  const Matrix3 finv = fg.matrix().inverse();
  st.pk1 = st.kirchhoff * finv.transpose();
  st.pk2 = finv * st.pk1;
  return st;
}

/// Natural-state regularization width for the Kilian tangent (the second
/// derivative is singular at I1_bar = 3).
inline constexpr double kTangentRegularization = 1e-8;

/// Spatial tangent relating the Jaumann rate of the isochoric stress to
/// dev D, for energies of the form W = U(I1_bar) (f = 0):
///   c_d = 4 U'' B(x)B - 4/3 (U' + I1 U'') (I(x)B + B(x)I)
///         + 2 U' (I<>B + B<>I),   B = B_bar.
/// With regularize = false, a Kilian model at the natural state raises
/// EvaluationError instead of being nudged off the singularity.
inline Tensor4 tangent_tensor(const MaterialModel& m, const DefGrad& fg,
                              EvalMode mode = EvalMode::Guarded,
                              bool regularize = true) {
  if (m.f() != 0.0)
    throw ParameterError("tangent_tensor: only I1_bar-only energies (f = 0) are supported");
  const InvariantSet inv = invariants(fg);
  InvariantSet deriv_state = inv;
  if (m.kind() == MaterialKind::Kilian && inv.I1_bar < 3.0 + kTangentRegularization) {
    if (!regularize)
      throw EvaluationError("kilian: singular tangent at the natural state");
    deriv_state.I1_bar = 3.0 + kTangentRegularization;
  }
  const EnergyEval ev = energy(m, deriv_state);
  if (mode == EvalMode::Guarded && !ev.in_domain)
    throw LockingViolation("state outside the locking domain", ev.locking_margin);

  const Matrix3 id = Matrix3::Identity();
  const Matrix3& b = inv.B_bar;
  Tensor4 c = Tensor4::outer(b, b);
  Tensor4 mixed = Tensor4::outer(id, b);
  mixed.axpy(1.0, Tensor4::outer(b, id));
  Tensor4 dyad = Tensor4::sym_dyad(id, b);
  dyad.axpy(1.0, Tensor4::sym_dyad(b, id));

  Tensor4 out;
  out.axpy(4.0 * ev.d2W_dI1I1, c);
  out.axpy(-(4.0 / 3.0) * (ev.dW_dI1 + inv.I1_bar * ev.d2W_dI1I1), mixed);
  out.axpy(2.0 * ev.dW_dI1, dyad);
  return out;
}

/// Convergence of a locking family toward the neo-Hookean limit as the
/// locking parameter grows.
struct NeoHookeanLimitReport {
  std::vector<double> a_values;
  std::vector<double> max_error;  // max |W_a - W_nh| over the probe states, in mu0 units
  bool monotone_decreasing = true;
  double rate = 0.0;  // fitted slope of log(err) vs log(a); O(1/a) gives -1
};

inline NeoHookeanLimitReport neo_hookean_limit_check(MaterialKind family,
                                                     const std::vector<double>& a_values,
                                                     double mu0 = 1.0) {
  if (family == MaterialKind::NeoHookean) {
    NeoHookeanLimitReport r;
    r.a_values = a_values;
    r.max_error.assign(a_values.size(), 0.0);
    return r;
  }
  const MaterialModel nh = MaterialModel::neo_hookean(mu0);
  std::vector<InvariantSet> probes;
  probes.push_back(invariants(DefGrad::simple_shear(0.5)));
  probes.push_back(invariants(DefGrad::simple_shear(1.0)));
  probes.push_back(invariants(DefGrad::uniaxial(1.5)));
  probes.push_back(invariants(DefGrad::uniaxial(2.0)));
  probes.push_back(invariants(DefGrad::equibiaxial(1.3)));

  NeoHookeanLimitReport r;
  r.a_values = a_values;
  for (double a : a_values) {
    const MaterialModel m = (family == MaterialKind::Gent)
                                ? MaterialModel::gent(mu0, a)
                                : MaterialModel::kilian(mu0, a);
    double err = 0.0;
    for (const auto& inv : probes)
      err = std::max(err, std::abs(energy(m, inv).W - energy(nh, inv).W));
    r.max_error.push_back(err);
  }
  for (std::size_t i = 1; i < r.max_error.size(); ++i)
    if (r.max_error[i] >= r.max_error[i - 1]) r.monotone_decreasing = false;
  if (r.a_values.size() >= 2) {
    const std::size_t n = r.a_values.size() - 1;
    r.rate = std::log(r.max_error[n] / r.max_error[0]) /
             std::log(r.a_values[n] / r.a_values[0]);
  }
  return r;
}

}  // namespace locklab
