#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "locklab/errors.hpp"
#include "locklab/kinematics.hpp"
#include "locklab/materials.hpp"

namespace locklab {

enum class Branch { Trivial, NonTrivial };

inline const char* to_string(Branch b) {
  return b == Branch::Trivial ? "trivial" : "non-trivial";
}

/// One equilibrium state of a dead-load problem. Stretches satisfy
/// lambda1 * lambda2 = 1 with lambda3 = 1.
struct PathSample {
  double S_nominal = 0.0;  // prescribed reference-area traction, units mu0
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double sigma11 = 0.0;
  Branch branch = Branch::NonTrivial;
  double locking_margin = std::numeric_limits<double>::infinity();
  bool at_bifurcation = false;
};

/// A traced equilibrium branch. Samples are ordered by the continuation
/// parameter. A traced branch is not a complete solution set; other
/// equilibria may exist outside it.
struct EquilibriumCurve {
  std::vector<PathSample> samples;
  double mu0 = 1.0;
  bool locking_terminated = false;  // guarded sweep stopped at the bound
  double termination_margin = std::numeric_limits<double>::infinity();
};

namespace detail {

// Difference of the principal isochoric Kirchhoff stresses s11 - s22 for
// the stretch state (l, 1/l, 1); this is the pressure-free combination all
// dead-load relations here reduce to.
inline double principal_stress_difference(const MaterialModel& m, double l,
                                          EvalMode mode) {
  const InvariantSet inv = invariants_from_stretches(l, 1.0 / l, 1.0);
  const Matrix3 s = isochoric_stress(m, inv, mode);
  return s(0, 0) - s(1, 1);
}

inline double margin_at(const MaterialModel& m, double l) {
  const LockingLimit lim = locking_limit(m);
  if (!lim.bounded()) return std::numeric_limits<double>::infinity();
  const InvariantSet inv = invariants_from_stretches(l, 1.0 / l, 1.0);
  return lim.limit - energy(m, inv).bound_value;
}

}  // namespace detail

/// Exact bifurcation load of the equibiaxial dead-load cube: the limit of
/// the non-trivial branch as lambda1 -> 1. Equal to twice the initial shear
/// modulus for every model with dW/dI at the natural state = mu0/2.
inline double cube_bifurcation_load(const MaterialModel& m) {
  const EnergyEval ev = energy(m, InvariantSet{});
  return 4.0 * (ev.dW_dI1 + ev.dW_dI2);
}

/// Non-trivial branch of the biaxially dead-loaded cube (equal nominal
/// tractions on faces 1 and 2, lambda3 held at 1):
///   S = (s11 - s22) / (lambda1 - lambda2),  lambda2 = 1/lambda1.
/// In guarded mode the sweep terminates (with a marker) at the first
/// out-of-domain grid point.
inline EquilibriumCurve cube_nontrivial_path(const MaterialModel& m,
                                             const std::vector<double>& lambda1_grid,
                                             EvalMode mode = EvalMode::Guarded) {
  EquilibriumCurve curve;
  curve.mu0 = m.mu0();
  for (double l1 : lambda1_grid) {
    if (!(l1 > 1.0))
      throw std::invalid_argument("cube_nontrivial_path: grid must satisfy lambda1 > 1");
    const double margin = detail::margin_at(m, l1);
    if (mode == EvalMode::Guarded && margin <= 0.0) {
      curve.locking_terminated = true;
      curve.termination_margin = margin;
      break;
    }
    PathSample s;
    s.lambda1 = l1;
    s.lambda2 = 1.0 / l1;
    s.locking_margin = margin;
    s.S_nominal = detail::principal_stress_difference(m, l1, mode) / (l1 - s.lambda2);
    s.sigma11 = s.S_nominal * l1;
    s.branch = Branch::NonTrivial;
    curve.samples.push_back(s);
  }
  return curve;
}

/// Trivial branch of the dead-load cube: the undeformed state, in
/// equilibrium for every load level (equal biaxial dead load carried by
/// the pressure). The sample at the bifurcation load is flagged.
inline EquilibriumCurve cube_trivial_path(const MaterialModel& m,
                                          const std::vector<double>& traction_grid) {
  EquilibriumCurve curve;
  curve.mu0 = m.mu0();
  const double s_bif = cube_bifurcation_load(m);
  const double margin = detail::margin_at(m, 1.0);
  for (double s_val : traction_grid) {
    PathSample s;
    s.S_nominal = s_val;
    s.lambda1 = s.lambda2 = 1.0;
    s.sigma11 = s_val;
    s.branch = Branch::Trivial;
    s.locking_margin = margin;
    s.at_bifurcation = std::abs(s_val - s_bif) <= 1e-9 * std::max(1.0, std::abs(s_bif));
    curve.samples.push_back(s);
  }
  return curve;
}

/// Plane-strain block under dead load normal to face 1 (face 2 traction
/// free, lambda3 = 1):  sigma11 = s11 - s22,  S = sigma11 / lambda1.
inline EquilibriumCurve block_plane_strain_path(const MaterialModel& m,
                                                const std::vector<double>& lambda1_grid,
                                                EvalMode mode = EvalMode::Guarded) {
  EquilibriumCurve curve;
  curve.mu0 = m.mu0();
  for (double l1 : lambda1_grid) {
    if (!(l1 > 0.0))
      throw std::invalid_argument("block_plane_strain_path: stretches must be positive");
    const double margin = detail::margin_at(m, l1);
    if (mode == EvalMode::Guarded && margin <= 0.0) {
      curve.locking_terminated = true;
      curve.termination_margin = margin;
      break;
    }
    PathSample s;
    s.lambda1 = l1;
    s.lambda2 = 1.0 / l1;
    s.locking_margin = margin;
    s.sigma11 = detail::principal_stress_difference(m, l1, mode);
    s.S_nominal = s.sigma11 / l1;
    s.branch = Branch::NonTrivial;
    curve.samples.push_back(s);
  }
  return curve;
}

struct BifurcationPoint {
  double S_star = 0.0;          // extrapolated branch intercept at lambda1 = 1
  double deviation = 0.0;       // S_star - 2 mu0
  int samples_used = 0;
};

/// Locate the branch intersection at lambda1 = 1 by polynomial (Neville)
/// extrapolation of the non-trivial branch's traction toward lambda1 -> 1.
/// Uses the (up to) eight samples closest to 1.
inline BifurcationPoint bifurcation_detect(const EquilibriumCurve& trivial,
                                           const EquilibriumCurve& nontrivial) {
  if (nontrivial.samples.empty())
    throw std::invalid_argument(
        "bifurcation_detect: non-trivial branch is empty; widen the input range");
  for (const PathSample& s : trivial.samples)
    if (s.branch != Branch::Trivial || s.lambda1 != 1.0)
      throw std::invalid_argument("bifurcation_detect: first curve is not a trivial branch");

  std::vector<PathSample> sorted = nontrivial.samples;
  std::sort(sorted.begin(), sorted.end(),
            [](const PathSample& a, const PathSample& b) { return a.lambda1 < b.lambda1; });
  const int n = std::min<std::size_t>(8, sorted.size());

  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = sorted[i].lambda1 - 1.0;
    y[i] = sorted[i].S_nominal;
  }
  // Neville tableau evaluated at x = 0.
  for (int level = 1; level < n; ++level)
    for (int i = 0; i < n - level; ++i)
      y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);

  BifurcationPoint bp;
  bp.S_star = y[0];
  bp.deviation = bp.S_star - 2.0 * nontrivial.mu0;
  bp.samples_used = n;
  return bp;
}

/// Geometric grid 1 + d0 * r^k, k = 0..steps-1, reaching lambda_max; suited
/// to extrapolation toward lambda1 = 1.
inline std::vector<double> geometric_lambda_grid(double lambda_min, double lambda_max,
                                                 int steps) {
  if (!(lambda_min > 1.0 && lambda_max > lambda_min) || steps < 2)
    throw std::invalid_argument("geometric_lambda_grid: need 1 < lambda_min < lambda_max, steps >= 2");
  std::vector<double> grid(steps);
  const double d0 = lambda_min - 1.0;
  const double r = std::pow((lambda_max - 1.0) / d0, 1.0 / (steps - 1));
  for (int k = 0; k < steps; ++k) grid[k] = 1.0 + d0 * std::pow(r, k);
  grid.back() = lambda_max;
  return grid;
}

}  // namespace locklab
