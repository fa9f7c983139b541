#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "locklab/errors.hpp"
#include "locklab/kinematics.hpp"
#include "locklab/materials.hpp"

namespace locklab::fem {

/// Plane-strain mesh of 4-node quadrilaterals, counter-clockwise
/// connectivity, one constant pressure per element.
struct Mesh2D {
  std::vector<Vector2> nodes;  // reference coordinates
  std::vector<std::array<int, 4>> elems;

  static Mesh2D strip(int nx, int ny, double lx, double ly) {
    Mesh2D mesh;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mesh.nodes.emplace_back(lx * i / nx, ly * j / ny);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int n = j * (nx + 1) + i;
        mesh.elems.push_back({n, n + 1, n + nx + 2, n + nx + 1});
      }
    return mesh;
  }

  static Mesh2D unit_square() { return strip(1, 1, 1.0, 1.0); }
};

/// Prescribed displacement component on one node; the applied value is
/// target * load_factor.
struct DisplacementBC {
  int node = 0;
  int component = 0;  // 0 = u1, 1 = u2
  double target = 0.0;
};

/// Dead load: nominal traction per unit reference length on the edge
/// (node_a, node_b), direction fixed in the reference configuration.
/// The applied value is traction * load_factor.
struct TractionBC {
  int node_a = 0;
  int node_b = 0;
  Vector2 traction = Vector2::Zero();
};

struct SolverConfig {
  EvalMode locking_mode = EvalMode::Guarded;
  double kappa = 1e5;        // penalty bulk parameter, units mu0
  double newton_tol = 1e-9;  // relative residual tolerance
  int max_iterations = 25;
  double initial_increment = 0.01;  // load-factor step sizes
  double min_increment = 1e-9;
  double max_increment = 0.05;
  double cut_factor = 0.5;
  double growth_factor = 1.5;
  // Guarded ramps stop once some element's margin falls below this fraction
  // of the locking span (limit minus the natural-state value); 0 disables.
  double stop_margin_fraction = 1e-4;

  void validate() const {
    if (!(stop_margin_fraction >= 0.0))
      throw ParameterError("solver: stop margin fraction must be >= 0");
    if (!(kappa >= 1e3))
      throw ParameterError("solver: kappa must be >= 1e3 (in mu0 units)");
    if (!(cut_factor > 0.0 && cut_factor < 1.0))
      throw ParameterError("solver: cut factor must lie in (0, 1)");
    if (!(min_increment > 0.0 && min_increment <= initial_increment &&
          initial_increment <= max_increment && max_increment <= 1.0))
      throw ParameterError("solver: need 0 < min <= initial <= max <= 1 increments");
    if (!(newton_tol > 0.0) || max_iterations < 1 || !(growth_factor >= 1.0))
      throw ParameterError("solver: invalid Newton settings");
  }

  bool operator==(const SolverConfig&) const = default;
};

/// State of one deviatoric quadrature point at a converged increment.
struct QuadRecord {
  Matrix2 F = Matrix2::Identity();  // in-plane block; F33 = 1
  double J = 1.0;
  double I1_bar = 3.0;
  double bound_value = 3.0;  // bounding invariant of the material
  double locking_margin = std::numeric_limits<double>::infinity();
  Matrix3 cauchy = Matrix3::Zero();
  double le11 = 0.0;            // 11-component of 0.5 log(B)
  double stretch_max = 1.0;     // largest principal stretch
};

struct FemState {
  Eigen::VectorXd u;                 // nodal displacements, 2 per node
  std::vector<double> pressure;      // element-constant pressure -kappa (J - 1)
  std::vector<std::array<QuadRecord, 4>> qp_records;  // per element
  double load_factor = 0.0;
};

struct FemProblem {
  Mesh2D mesh;
  MaterialModel model;
  std::vector<DisplacementBC> displacement_bcs;
  std::vector<TractionBC> traction_bcs;
  SolverConfig config;

  FemProblem(Mesh2D mesh_, MaterialModel model_, std::vector<DisplacementBC> dbc,
             std::vector<TractionBC> tbc, SolverConfig cfg)
      : mesh(std::move(mesh_)),
        model(std::move(model_)),
        displacement_bcs(std::move(dbc)),
        traction_bcs(std::move(tbc)),
        config(cfg) {
    if (model.f() != 0.0)
      throw ParameterError("fem: only I1_bar-only energies (f = 0) are supported");
    config.validate();
    std::vector<char> seen(2 * mesh.nodes.size(), 0);
    for (const auto& bc : displacement_bcs) {
      const int dof = 2 * bc.node + bc.component;
      if (bc.node < 0 || bc.node >= static_cast<int>(mesh.nodes.size()) ||
          bc.component < 0 || bc.component > 1)
        throw std::invalid_argument("fem: displacement BC references an invalid DOF");
      if (seen[dof]) throw std::invalid_argument("fem: DOF constrained twice");
      seen[dof] = 1;
    }
    check_reference_jacobians();
  }

  FemState initial_state() const {
    FemState st;
    st.u = Eigen::VectorXd::Zero(2 * mesh.nodes.size());
    st.pressure.assign(mesh.elems.size(), 0.0);
    st.qp_records.assign(mesh.elems.size(), {});
    return st;
  }

private:
  void check_reference_jacobians() const;
};

namespace detail {

struct ShapeDerivs {
  std::array<Vector2, 4> dN;  // with respect to reference coordinates
  double weight = 0.0;        // gauss weight times reference jacobian
};

inline void shape_gradients(const std::array<Vector2, 4>& x, double xi, double eta,
                            double gauss_w, ShapeDerivs& out) {
  static constexpr double sx[4] = {-1.0, 1.0, 1.0, -1.0};
  static constexpr double sy[4] = {-1.0, -1.0, 1.0, 1.0};
  std::array<Vector2, 4> dNdxi;
  for (int a = 0; a < 4; ++a)
    dNdxi[a] = Vector2(0.25 * sx[a] * (1.0 + sy[a] * eta),
                       0.25 * sy[a] * (1.0 + sx[a] * xi));
  Matrix2 jac = Matrix2::Zero();  // dX/dxi
  for (int a = 0; a < 4; ++a) jac += x[a] * dNdxi[a].transpose();
  const double det = jac.determinant();
  if (!(det > 0.0))
    throw std::invalid_argument("fem: non-positive reference Jacobian");
  const Matrix2 jinv = jac.inverse();
  for (int a = 0; a < 4; ++a) out.dN[a] = jinv.transpose() * dNdxi[a];
  out.weight = gauss_w * det;
}

// Deviatoric quadrature (2x2 Gauss) plus the single-point volumetric rule.
inline const std::array<std::array<double, 2>, 4>& dev_points() {
  static const double g = 1.0 / std::sqrt(3.0);
  static const std::array<std::array<double, 2>, 4> pts = {
      {{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
  return pts;
}

struct QpKinematics {
  Matrix2 F = Matrix2::Identity();
  Matrix2 Finv = Matrix2::Identity();
  double Jm1 = 0.0;  // J - 1, formed without cancellation
  double J = 1.0;
  double I1 = 3.0;  // 3-D first invariant, tr(F F^T) + 1
};

inline QpKinematics qp_kinematics(const std::array<Vector2, 4>& u,
                                  const ShapeDerivs& sd) {
  Matrix2 h = Matrix2::Zero();  // displacement gradient
  for (int a = 0; a < 4; ++a) h += u[a] * sd.dN[a].transpose();
  QpKinematics k;
  k.F = Matrix2::Identity() + h;
  k.Jm1 = h(0, 0) + h(1, 1) + h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  k.J = 1.0 + k.Jm1;
  k.I1 = k.F.squaredNorm() + 1.0;
  if (!(k.J > kMinJacobian)) throw std::domain_error("inverted");
  k.Finv = k.F.inverse();
  return k;
}

}  // namespace detail

inline void FemProblem::check_reference_jacobians() const {
  detail::ShapeDerivs sd;
  for (const auto& conn : mesh.elems) {
    std::array<Vector2, 4> x;
    for (int a = 0; a < 4; ++a) x[a] = mesh.nodes[conn[a]];
    for (const auto& pt : detail::dev_points())
      detail::shape_gradients(x, pt[0], pt[1], 1.0, sd);
    detail::shape_gradients(x, 0.0, 0.0, 4.0, sd);
  }
}

struct Assembly {
  Eigen::VectorXd residual;  // internal minus external forces
  Eigen::VectorXd f_int;
  Eigen::VectorXd f_ext;
  Eigen::SparseMatrix<double> tangent;
  std::vector<std::array<QuadRecord, 4>> records;
  std::vector<double> pressure;
};

/// Assemble residual and consistent tangent at the given state.
///
/// Total Lagrangian Q1 elements with selective reduced integration: the
/// isochoric energy U(I1_bar) at 2x2 Gauss points, the penalty term
/// kappa/2 (J-1)^2 at the element centroid (element-constant pressure
/// p = -kappa (J-1) condensed out). The tangent is the exact second
/// derivative of the discrete energy, so it is symmetric and carries both
/// the material and geometric parts.
///
/// Guarded mode rejects any quadrature point outside the locking domain
/// with LockingViolation; a non-positive Jacobian raises ElementInversion.
inline Assembly assemble(const FemProblem& problem, const FemState& state) {
  const Mesh2D& mesh = problem.mesh;
  const MaterialModel& model = problem.model;
  const double kappa = problem.config.kappa * model.mu0();
  const int ndof = 2 * static_cast<int>(mesh.nodes.size());

  Assembly out;
  out.f_int = Eigen::VectorXd::Zero(ndof);
  out.f_ext = Eigen::VectorXd::Zero(ndof);
  out.records.assign(mesh.elems.size(), {});
  out.pressure.assign(mesh.elems.size(), 0.0);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.elems.size() * 64);

  detail::ShapeDerivs sd;
  for (std::size_t e = 0; e < mesh.elems.size(); ++e) {
    const auto& conn = mesh.elems[e];
    std::array<Vector2, 4> x, u;
    for (int a = 0; a < 4; ++a) {
      x[a] = mesh.nodes[conn[a]];
      u[a] = Vector2(state.u[2 * conn[a]], state.u[2 * conn[a] + 1]);
    }

    Eigen::Matrix<double, 8, 1> fe = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> ke = Eigen::Matrix<double, 8, 8>::Zero();

    // One quadrature-point contribution: first Piola stress from the stress
    // derivative, exact material+geometric tangent from the (possibly
    // regularized) tangent derivatives. In-plane blocks only; F33 = 1.
    const auto add_point = [&](const detail::QpKinematics& k, double w, bool volumetric,
                               double U1_stress, double U1_tan, double U11_tan,
                               double jm23) {
      const Matrix2& F = k.F;
      Matrix2 T;  // F^{-T}
      T(0, 0) = k.Finv(0, 0);
      T(0, 1) = k.Finv(1, 0);
      T(1, 0) = k.Finv(0, 1);
      T(1, 1) = k.Finv(1, 1);

      Matrix2 P;
      std::array<std::array<double, 4>, 4> A{};  // [iJ][kL], iJ = 2*i + J
      if (!volumetric) {
        // G = d(I1_bar)/dF; P = U' G, A = U'' G(x)G + U' d2(I1_bar)/dF2
        const Matrix2 G = 2.0 * jm23 * (F - (k.I1 / 3.0) * T);
        P = U1_stress * G;
        for (int i = 0; i < 2; ++i)
          for (int J = 0; J < 2; ++J)
            for (int kk = 0; kk < 2; ++kk)
              for (int L = 0; L < 2; ++L) {
                double v = U11_tan * G(i, J) * G(kk, L);
                double m = (i == kk && J == L) ? 1.0 : 0.0;
                m -= (2.0 / 3.0) * (T(i, J) * F(kk, L) + F(i, J) * T(kk, L));
                m += (2.0 / 9.0) * k.I1 * T(i, J) * T(kk, L);
                m += (k.I1 / 3.0) * k.Finv(L, i) * k.Finv(J, kk);
                v += U1_tan * 2.0 * jm23 * m;
                A[2 * i + J][2 * kk + L] = v;
              }
      } else {
        P = kappa * k.Jm1 * k.J * T;
        const double c1 = kappa * k.J * (2.0 * k.J - 1.0);
        const double c2 = kappa * k.J * k.Jm1;
        for (int i = 0; i < 2; ++i)
          for (int J = 0; J < 2; ++J)
            for (int kk = 0; kk < 2; ++kk)
              for (int L = 0; L < 2; ++L)
                A[2 * i + J][2 * kk + L] =
                    c1 * T(i, J) * T(kk, L) - c2 * k.Finv(J, kk) * k.Finv(L, i);
      }

      for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 2; ++i) {
          double f = 0.0;
          for (int J = 0; J < 2; ++J) f += P(i, J) * sd.dN[a][J];
          fe[2 * a + i] += w * f;
        }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              double v = 0.0;
              for (int J = 0; J < 2; ++J)
                for (int L = 0; L < 2; ++L)
                  v += A[2 * i + J][2 * j + L] * sd.dN[a][J] * sd.dN[b][L];
              ke(2 * a + i, 2 * b + j) += w * v;
            }
    };

    // Deviatoric part at the 2x2 points.
    for (int q = 0; q < 4; ++q) {
      const auto& pt = detail::dev_points()[q];
      detail::shape_gradients(x, pt[0], pt[1], 1.0, sd);
      detail::QpKinematics k;
      try {
        k = detail::qp_kinematics(u, sd);
      } catch (const std::domain_error&) {
        throw ElementInversion("fem: non-positive Jacobian at a quadrature point",
                               static_cast<int>(e));
      }
      const double jm23 = std::pow(k.J, -2.0 / 3.0);

      InvariantSet inv;
      inv.J = k.J;
      inv.I1 = k.I1;
      inv.I1_bar = jm23 * k.I1;
      const EnergyEval ev = energy(model, inv);
      if (problem.config.locking_mode == EvalMode::Guarded && !ev.in_domain)
        throw LockingViolation("fem: quadrature point outside the locking domain",
                               ev.locking_margin, static_cast<int>(e));

      // Natural-state regularization applies to the tangent only.
      double U11 = ev.d2W_dI1I1;
      double U1_tan = ev.dW_dI1;
      if (model.kind() == MaterialKind::Kilian &&
          inv.I1_bar < 3.0 + kTangentRegularization) {
        InvariantSet reg = inv;
        reg.I1_bar = 3.0 + kTangentRegularization;
        const EnergyEval evr = energy(model, reg);
        U11 = evr.d2W_dI1I1;
        U1_tan = evr.dW_dI1;
      }
      add_point(k, sd.weight, false, ev.dW_dI1, U1_tan, U11, jm23);

      QuadRecord& rec = out.records[e][q];
      rec.F = k.F;
      rec.J = k.J;
      rec.I1_bar = inv.I1_bar;
      rec.bound_value = ev.bound_value;
      rec.locking_margin = ev.locking_margin;
      Matrix3 bbar = Matrix3::Identity();
      bbar.topLeftCorner<2, 2>() = k.F * k.F.transpose();
      bbar *= jm23;
      rec.cauchy = (2.0 * ev.dW_dI1 / k.J) * deviatoric(bbar);
      {
        Eigen::SelfAdjointEigenSolver<Matrix2> es(k.F * k.F.transpose());
        const Matrix2 le = es.eigenvectors() *
                           (0.5 * es.eigenvalues().array().log()).matrix().asDiagonal() *
                           es.eigenvectors().transpose();
        rec.le11 = le(0, 0);
        rec.stretch_max = std::sqrt(std::max(es.eigenvalues()(1), 1.0));
      }
    }

    // Volumetric part at the centroid.
    detail::shape_gradients(x, 0.0, 0.0, 4.0, sd);
    detail::QpKinematics kc;
    try {
      kc = detail::qp_kinematics(u, sd);
    } catch (const std::domain_error&) {
      throw ElementInversion("fem: non-positive Jacobian at the element centroid",
                             static_cast<int>(e));
    }
    add_point(kc, sd.weight, true, 0.0, 0.0, 0.0, 0.0);
    out.pressure[e] = -kappa * kc.Jm1;
    for (int q = 0; q < 4; ++q)
      out.records[e][q].cauchy += kappa * kc.Jm1 * Matrix3::Identity();

    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 2; ++i) {
        out.f_int[2 * conn[a] + i] += fe[2 * a + i];
        for (int b = 0; b < 4; ++b)
          for (int j = 0; j < 2; ++j)
            trips.emplace_back(2 * conn[a] + i, 2 * conn[b] + j, ke(2 * a + i, 2 * b + j));
      }
  }

  for (const auto& bc : problem.traction_bcs) {
    const double len = (mesh.nodes[bc.node_b] - mesh.nodes[bc.node_a]).norm();
    const Vector2 f = 0.5 * len * state.load_factor * bc.traction;
    for (int i = 0; i < 2; ++i) {
      out.f_ext[2 * bc.node_a + i] += f[i];
      out.f_ext[2 * bc.node_b + i] += f[i];
    }
  }

  out.tangent.resize(ndof, ndof);
  out.tangent.setFromTriplets(trips.begin(), trips.end());
  out.residual = out.f_int - out.f_ext;
  return out;
}

struct IterationReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms;  // relative, one entry per assembly
  double achieved_increment = 0.0;
  int cuts = 0;
  std::string failure;  // description of the last failed attempt
  int limiting_element = -1;
  double limiting_margin = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void apply_prescribed(const FemProblem& p, FemState& st) {
  for (const auto& bc : p.displacement_bcs)
    st.u[2 * bc.node + bc.component] = bc.target * st.load_factor;
}

inline std::vector<int> free_dofs(const FemProblem& p) {
  std::vector<char> fixed(2 * p.mesh.nodes.size(), 0);
  for (const auto& bc : p.displacement_bcs) fixed[2 * bc.node + bc.component] = 1;
  std::vector<int> free;
  for (int d = 0; d < static_cast<int>(fixed.size()); ++d)
    if (!fixed[d]) free.push_back(d);
  return free;
}

// Newton iteration at a fixed load factor. Throws on locking/inversion.
inline bool newton_solve(const FemProblem& p, FemState& st, IterationReport& rep) {
  const std::vector<int> free = free_dofs(p);
  const int nf = static_cast<int>(free.size());
  apply_prescribed(p, st);

  for (int it = 0; it <= p.config.max_iterations; ++it) {
    Assembly asmb = assemble(p, st);
    Eigen::VectorXd rf(nf);
    for (int i = 0; i < nf; ++i) rf[i] = asmb.residual[free[i]];
    if (!rf.allFinite()) return false;
    const double ref = std::max({asmb.f_ext.norm(), asmb.f_int.norm(),
                                 p.model.mu0() * 1e-8});
    const double rel = rf.norm() / ref;
    rep.residual_norms.push_back(rel);
    if (rf.norm() == 0.0 || rel <= p.config.newton_tol) {
      st.qp_records = std::move(asmb.records);
      st.pressure = std::move(asmb.pressure);
      rep.iterations = it;
      return true;
    }
    if (it == p.config.max_iterations) return false;

    Eigen::SparseMatrix<double> kff(nf, nf);
    std::vector<Eigen::Triplet<double>> trips;
    std::vector<int> pos(asmb.tangent.rows(), -1);
    for (int i = 0; i < nf; ++i) pos[free[i]] = i;
    for (int col = 0; col < asmb.tangent.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator iter(asmb.tangent, col); iter;
           ++iter)
        if (pos[iter.row()] >= 0 && pos[iter.col()] >= 0)
          trips.emplace_back(pos[iter.row()], pos[iter.col()], iter.value());
    kff.setFromTriplets(trips.begin(), trips.end());

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(kff);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::VectorXd du = lu.solve(-rf);
    if (lu.info() != Eigen::Success || !du.allFinite()) return false;
    for (int i = 0; i < nf; ++i) st.u[free[i]] += du[i];
  }
  return false;
}

}  // namespace detail

/// Advance the state by up to `target_increment` in load factor. On
/// non-convergence or a locking/inversion error the increment is cut by
/// the configured factor and retried; the report comes back with
/// converged = false only once the minimum increment is exhausted, in
/// which case `state` is left at the last converged point.
inline IterationReport solve_increment(const FemProblem& problem, FemState& state,
                                       double target_increment) {
  IterationReport rep;
  double d = target_increment;
  while (true) {
    FemState trial = state;
    trial.load_factor = state.load_factor + d;
    IterationReport attempt;
    attempt.cuts = rep.cuts;
    bool ok = false;
    try {
      ok = detail::newton_solve(problem, trial, attempt);
      if (!ok) rep.failure = "no convergence within the iteration budget";
    } catch (const LockingViolation& lv) {
      rep.failure = lv.what();
      rep.limiting_element = lv.element();
      rep.limiting_margin = lv.margin();
    } catch (const ElementInversion& ei) {
      rep.failure = ei.what();
      rep.limiting_element = ei.element();
    } catch (const EvaluationError& ee) {
      rep.failure = ee.what();
    }
    if (ok) {
      state = std::move(trial);
      rep.converged = true;
      rep.iterations = attempt.iterations;
      rep.residual_norms = std::move(attempt.residual_norms);
      rep.achieved_increment = d;
      return rep;
    }
    d *= problem.config.cut_factor;
    ++rep.cuts;
    if (d < problem.config.min_increment) {
      rep.converged = false;
      rep.achieved_increment = 0.0;
      return rep;
    }
  }
}

enum class TerminationReason { RampCompleted, LockingLimit, NoConvergence };

inline const char* to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::RampCompleted: return "ramp-completed";
    case TerminationReason::LockingLimit: return "locking-limit";
    case TerminationReason::NoConvergence: return "no-convergence";
  }
  return "?";
}

struct ElementSummary {
  double max_le11 = -std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  double max_bound = 3.0;
  double pressure = 0.0;
  bool violated = false;
};

/// Per-increment history row of an FE run.
struct FemSample {
  int increment = 0;
  double load_factor = 0.0;
  double control = 0.0;  // ramped quantity: traction level or stretch
  double lambda1 = 1.0;  // largest principal stretch over all points
  double sigma11 = 0.0;  // mean Cauchy 11 over all points
  double max_le11 = -std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  double max_bound = 3.0;
  bool violated = false;  // some quadrature point is outside the domain
  std::vector<ElementSummary> elements;
};

struct TerminationInfo {
  TerminationReason reason = TerminationReason::RampCompleted;
  std::string detail;
  int limiting_element = -1;
  double limiting_margin = std::numeric_limits<double>::quiet_NaN();
  double last_load_factor = 0.0;
};

struct FemRunResult {
  std::vector<FemSample> history;
  TerminationInfo termination;
  FemState final_state;
};

inline FemSample make_sample(const FemProblem& problem, const FemState& st, int inc,
                             double control) {
  FemSample s;
  s.increment = inc;
  s.load_factor = st.load_factor;
  s.control = control;
  double sig = 0.0;
  int n = 0;
  s.elements.resize(problem.mesh.elems.size());
  for (std::size_t e = 0; e < problem.mesh.elems.size(); ++e) {
    ElementSummary& es = s.elements[e];
    es.pressure = st.pressure[e];
    for (const QuadRecord& r : st.qp_records[e]) {
      es.max_le11 = std::max(es.max_le11, r.le11);
      es.min_margin = std::min(es.min_margin, r.locking_margin);
      es.max_bound = std::max(es.max_bound, r.bound_value);
      s.lambda1 = std::max(s.lambda1, r.stretch_max);
      sig += r.cauchy(0, 0);
      ++n;
    }
    es.violated = es.min_margin <= 0.0;
    s.max_le11 = std::max(s.max_le11, es.max_le11);
    s.min_margin = std::min(s.min_margin, es.min_margin);
    s.max_bound = std::max(s.max_bound, es.max_bound);
  }
  s.sigma11 = n ? sig / n : 0.0;
  s.violated = s.min_margin <= 0.0;
  return s;
}

/// Drive the load factor from 0 to 1 with adaptive incrementation.
/// `control_of` maps the load factor to the reported control value.
inline FemRunResult run_ramp(const FemProblem& problem,
                             const std::function<double(double)>& control_of) {
  FemRunResult result;
  FemState state = problem.initial_state();
  {  // record the undeformed state
    Assembly asmb = assemble(problem, state);
    state.qp_records = std::move(asmb.records);
    state.pressure = std::move(asmb.pressure);
  }
  result.history.push_back(make_sample(problem, state, 0, control_of(0.0)));

  const LockingLimit lim = locking_limit(problem.model);
  const double stop_margin =
      (problem.config.locking_mode == EvalMode::Guarded && lim.bounded())
          ? problem.config.stop_margin_fraction * (lim.limit - 3.0)
          : 0.0;

  double d = problem.config.initial_increment;
  int inc = 0;
  while (state.load_factor < 1.0 - 1e-12) {
    const double step = std::min(d, 1.0 - state.load_factor);
    IterationReport rep = solve_increment(problem, state, step);
    if (!rep.converged) {
      TerminationInfo& t = result.termination;
      t.reason = rep.limiting_margin == rep.limiting_margin  // not NaN => locking
                     ? TerminationReason::LockingLimit
                     : TerminationReason::NoConvergence;
      t.detail = rep.failure;
      t.limiting_element = rep.limiting_element;
      t.limiting_margin = rep.limiting_margin;
      break;
    }
    ++inc;
    result.history.push_back(make_sample(problem, state, inc, control_of(state.load_factor)));
    if (stop_margin > 0.0 && result.history.back().min_margin <= stop_margin) {
      TerminationInfo& t = result.termination;
      t.reason = TerminationReason::LockingLimit;
      t.detail = "an element reached its locking bound";
      break;
    }
    d = rep.achieved_increment;
    if (rep.cuts == 0 && rep.iterations <= std::max(5, (3 * problem.config.max_iterations) / 4))
      d *= problem.config.growth_factor;
    d = std::min(d, problem.config.max_increment);
  }
  if (state.load_factor >= 1.0 - 1e-12)
    result.termination.reason = TerminationReason::RampCompleted;
  result.termination.last_load_factor = state.load_factor;
  if (result.termination.limiting_element < 0 && !result.history.empty()) {
    // identify the element closest to its bound at the end
    const FemSample& last = result.history.back();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < last.elements.size(); ++e)
      if (last.elements[e].min_margin < best) {
        best = last.elements[e].min_margin;
        result.termination.limiting_element = static_cast<int>(e);
        result.termination.limiting_margin = best;
      }
  }
  result.final_state = std::move(state);
  return result;
}

/// Unit square, rollers on the left/bottom faces, dead load on the right
/// face; reproduces the traction-driven single-element test.
inline FemProblem make_single_element_traction(const MaterialModel& model,
                                               double traction_max,
                                               const SolverConfig& cfg) {
  // strip(1,1) numbering: 0 (0,0), 1 (1,0), 2 (0,1), 3 (1,1)
  Mesh2D mesh = Mesh2D::unit_square();
  std::vector<DisplacementBC> dbc = {
      {0, 0, 0.0}, {2, 0, 0.0},  // left face u1 = 0
      {0, 1, 0.0}, {1, 1, 0.0},  // bottom face u2 = 0
  };
  std::vector<TractionBC> tbc = {{1, 3, Vector2(traction_max, 0.0)}};
  return FemProblem(std::move(mesh), model, std::move(dbc), std::move(tbc), cfg);
}

inline FemRunResult run_single_element_traction(const MaterialModel& model,
                                                double traction_max,
                                                const SolverConfig& cfg) {
  const FemProblem p = make_single_element_traction(model, traction_max, cfg);
  return run_ramp(p, [traction_max](double lf) { return traction_max * lf; });
}

/// Unit square, rollers on the left/bottom faces, prescribed stretch on the
/// right face (u1 ramped to stretch_target - 1); the displacement-driven
/// single-element test.
inline FemProblem make_single_element_displacement(const MaterialModel& model,
                                                   double stretch_target,
                                                   const SolverConfig& cfg) {
  Mesh2D mesh = Mesh2D::unit_square();
  const double u = stretch_target - 1.0;
  std::vector<DisplacementBC> dbc = {
      {0, 0, 0.0}, {2, 0, 0.0},
      {0, 1, 0.0}, {1, 1, 0.0},
      {1, 0, u},   {3, 0, u},  // right face stretch
  };
  return FemProblem(std::move(mesh), model, std::move(dbc), {}, cfg);
}

inline FemRunResult run_single_element_displacement(const MaterialModel& model,
                                                    double stretch_target,
                                                    const SolverConfig& cfg) {
  const FemProblem p = make_single_element_displacement(model, stretch_target, cfg);
  return run_ramp(p, [stretch_target](double lf) { return 1.0 + (stretch_target - 1.0) * lf; });
}

/// 3x1 strip of unit squares stretched along its axis: the left face is
/// fully fixed and the right face is driven along direction 1. With
/// clamp_driven_face (the default) the driven face cannot move
/// transversely either, so both end elements are shielded from lateral
/// contraction and the nonhomogeneous response concentrates the stretch in
/// the middle element, which is the first to reach its locking bound.
inline FemProblem make_three_element_strip(const MaterialModel& model, double pull,
                                           const SolverConfig& cfg,
                                           bool clamp_driven_face = true) {
  // strip(3,1) numbering: bottom row 0..3, top row 4..7
  Mesh2D mesh = Mesh2D::strip(3, 1, 3.0, 1.0);
  std::vector<DisplacementBC> dbc = {
      {0, 0, 0.0}, {0, 1, 0.0}, {4, 0, 0.0}, {4, 1, 0.0},  // left face fixed
      {3, 0, pull}, {7, 0, pull},                          // right face driven
  };
  if (clamp_driven_face) {
    dbc.push_back({3, 1, 0.0});
    dbc.push_back({7, 1, 0.0});
  }
  return FemProblem(std::move(mesh), model, std::move(dbc), {}, cfg);
}

inline FemRunResult run_three_element_strip(const MaterialModel& model, double pull,
                                            const SolverConfig& cfg,
                                            bool clamp_driven_face = true) {
  const FemProblem p = make_three_element_strip(model, pull, cfg, clamp_driven_face);
  return run_ramp(p, [pull](double lf) { return pull * lf; });
}

}  // namespace locklab::fem
