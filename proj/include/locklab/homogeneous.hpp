#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "locklab/errors.hpp"
#include "locklab/kinematics.hpp"
#include "locklab/materials.hpp"

namespace locklab {

/// The three prescribed-displacement homogeneous deformations.
enum class CaseKind { SimpleShear, Uniaxial, Equibiaxial };

inline const char* to_string(CaseKind k) {
  switch (k) {
    case CaseKind::SimpleShear: return "shear";
    case CaseKind::Uniaxial: return "uniaxial";
    case CaseKind::Equibiaxial: return "biaxial";
  }
  return "?";
}

/// Deformation gradient of a case at the given control value
/// (amount of shear, or principal stretch).
inline DefGrad case_def_grad(CaseKind kind, double control) {
  switch (kind) {
    case CaseKind::SimpleShear: return DefGrad::simple_shear(control);
    case CaseKind::Uniaxial: return DefGrad::uniaxial(control);
    case CaseKind::Equibiaxial: return DefGrad::equibiaxial(control);
  }
  throw std::invalid_argument("unknown deformation case");
}

/// Value of the bounding invariant (I1_bar; equal to the mixed invariant
/// at f = 0) as a function of the case control.
inline double case_i1_bar(CaseKind kind, double control) {
  switch (kind) {
    case CaseKind::SimpleShear: return 3.0 + control * control;
    case CaseKind::Uniaxial: return control * control + 2.0 / control;
    case CaseKind::Equibiaxial:
      return 2.0 * control * control + 1.0 / std::pow(control, 4);
  }
  throw std::invalid_argument("unknown deformation case");
}

/// One point of a closed-form stress-stretch response.
struct ResponseSample {
  double control = 0.0;
  double sigma11 = 0.0;
  double sigma22 = 0.0;
  double sigma33 = 0.0;
  double sigma12 = 0.0;
  double I1_bar = 3.0;
  double locking_margin = std::numeric_limits<double>::infinity();
  bool at_asymptote = false;  // locking_margin <= kAsymptoteMarginTol
};

inline constexpr double kAsymptoteMarginTol = 1e-9;

namespace detail {

// Closed forms are the alpha = f = 0 specialization; the general-energy
// route handles the full parameter set.
inline void require_closed_form_params(const MaterialModel& m) {
  if (m.kind() == MaterialKind::Kilian && (m.alpha() != 0.0 || m.f() != 0.0))
    throw ParameterError("closed-form responses require alpha = f = 0");
}

// Closed-form dW/dI1_bar as a function of I1_bar, in mu0 units times mu0.
inline double closed_form_dW(const MaterialModel& m, double i1_bar) {
  const double mu = m.mu0();
  switch (m.kind()) {
    case MaterialKind::NeoHookean:
      return 0.5 * mu;
    case MaterialKind::Gent: {
      const double den = m.a() - (i1_bar - 3.0);
      if (den == 0.0) throw EvaluationError("gent: derivative pole at I1_bar = 3 + a");
      return 0.5 * mu * m.a() / den;
    }
    case MaterialKind::Kilian: {
      const double b = std::sqrt(std::max(i1_bar - 3.0, 0.0) / (m.a() * m.a() - 3.0));
      return 0.5 * mu / (1.0 - b);  // infinite exactly at the bound
    }
  }
  throw ParameterError("unknown material kind");
}

inline void fill_margin(const MaterialModel& m, ResponseSample& s, EvalMode mode) {
  const LockingLimit lim = locking_limit(m);
  s.locking_margin = lim.bounded() ? lim.limit - s.I1_bar
                                   : std::numeric_limits<double>::infinity();
  s.at_asymptote = s.locking_margin <= kAsymptoteMarginTol;
  if (mode == EvalMode::Guarded && s.locking_margin <= 0.0)
    throw LockingViolation("control at or beyond the locking asymptote", s.locking_margin);
}

}  // namespace detail

/// Simple shear response, reported in the deviatoric convention
/// (sigma11 + sigma22 + sigma33 = 0). A traction-free-face convention
/// would differ by a hydrostatic shift.
inline ResponseSample shear_response(const MaterialModel& m, double gamma,
                                     EvalMode mode = EvalMode::Guarded) {
  detail::require_closed_form_params(m);
  ResponseSample s;
  s.control = gamma;
  s.I1_bar = case_i1_bar(CaseKind::SimpleShear, gamma);
  detail::fill_margin(m, s, mode);
  const double two_dw = 2.0 * detail::closed_form_dW(m, s.I1_bar);
  const double g2 = gamma * gamma;
  s.sigma12 = two_dw * gamma;
  s.sigma11 = two_dw * (2.0 / 3.0) * g2;
  s.sigma22 = s.sigma33 = -two_dw * (1.0 / 3.0) * g2;
  return s;
}

/// Uniaxial stretch response; sigma11 is the only nonzero component
/// (lateral faces traction-free).
inline ResponseSample uniaxial_response(const MaterialModel& m, double stretch,
                                        EvalMode mode = EvalMode::Guarded) {
  detail::require_closed_form_params(m);
  if (!(stretch > 0.0)) throw std::invalid_argument("uniaxial stretch must be positive");
  ResponseSample s;
  s.control = stretch;
  s.I1_bar = case_i1_bar(CaseKind::Uniaxial, stretch);
  detail::fill_margin(m, s, mode);
  s.sigma11 = 2.0 * detail::closed_form_dW(m, s.I1_bar) *
              (stretch * stretch - 1.0 / stretch);
  return s;
}

/// Equibiaxial stretch response; sigma11 = sigma22 are the only nonzero
/// components (out-of-plane face traction-free).
inline ResponseSample biaxial_response(const MaterialModel& m, double stretch,
                                       EvalMode mode = EvalMode::Guarded) {
  detail::require_closed_form_params(m);
  if (!(stretch > 0.0)) throw std::invalid_argument("biaxial stretch must be positive");
  ResponseSample s;
  s.control = stretch;
  s.I1_bar = case_i1_bar(CaseKind::Equibiaxial, stretch);
  detail::fill_margin(m, s, mode);
  s.sigma11 = s.sigma22 = 2.0 * detail::closed_form_dW(m, s.I1_bar) *
                          (stretch * stretch - 1.0 / std::pow(stretch, 4));
  return s;
}

inline ResponseSample case_response(const MaterialModel& m, CaseKind kind, double control,
                                    EvalMode mode = EvalMode::Guarded) {
  switch (kind) {
    case CaseKind::SimpleShear: return shear_response(m, control, mode);
    case CaseKind::Uniaxial: return uniaxial_response(m, control, mode);
    case CaseKind::Equibiaxial: return biaxial_response(m, control, mode);
  }
  throw std::invalid_argument("unknown deformation case");
}

/// Bracketed bisection for a continuous scalar function with a sign change.
inline double bisect(const std::function<double(double)>& fn, double lo, double hi,
                     double tol = 1e-12) {
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect: bracket does not straddle a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// All positive control values at which the case hits the model's locking
/// bound, in ascending order. Stretch-controlled cases have a sub-unity
/// root as well as the super-unity one. Empty for unbounded models.
inline std::vector<double> asymptote(const MaterialModel& m, CaseKind kind) {
  const LockingLimit lim = locking_limit(m);
  if (!lim.bounded()) return {};
  const double L = lim.limit;

  std::vector<double> roots;
  if (kind == CaseKind::SimpleShear) {
    roots.push_back(std::sqrt(L - 3.0));
    return roots;
  }
  const auto residual = [&](double c) { return case_i1_bar(kind, c) - L; };
  // I1_bar decreases on (0,1) and increases on (1,inf), with minimum 3 at 1.
  double lo = 1e-6;
  while (residual(lo) < 0.0) lo *= 0.5;
  roots.push_back(bisect(residual, lo, 1.0));
  double hi = 2.0;
  while (residual(hi) < 0.0) hi *= 2.0;
  roots.push_back(bisect(residual, 1.0, hi));
  return roots;
}

/// Stored-energy samples over a grid of in-plane isochoric stretch pairs,
/// with lambda3 = 1/(lambda1 lambda2). Out-of-domain cells carry NaN and a
/// cleared mask bit.
struct EnergySurface {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<double> energy;     // row-major: [i1 * lambda2.size() + i2]
  std::vector<char> in_domain;    // same layout
};

inline EnergySurface energy_surface(const MaterialModel& m,
                                    const std::vector<double>& lambda1,
                                    const std::vector<double>& lambda2) {
  EnergySurface surf;
  surf.lambda1 = lambda1;
  surf.lambda2 = lambda2;
  surf.energy.reserve(lambda1.size() * lambda2.size());
  surf.in_domain.reserve(lambda1.size() * lambda2.size());
  for (double l1 : lambda1)
    for (double l2 : lambda2) {
      if (!(l1 > 0.0 && l2 > 0.0))
        throw std::invalid_argument("energy_surface: stretches must be positive");
      const InvariantSet inv = invariants_from_stretches(l1, l2, 1.0 / (l1 * l2));
      try {
        const EnergyEval ev = energy(m, inv);
        surf.energy.push_back(ev.W);  // NaN outside the domain
        surf.in_domain.push_back(ev.in_domain ? 1 : 0);
      } catch (const EvaluationError&) {
        // grid point exactly on the bounding level set
        surf.energy.push_back(std::numeric_limits<double>::quiet_NaN());
        surf.in_domain.push_back(0);
      }
    }
  return surf;
}

}  // namespace locklab
